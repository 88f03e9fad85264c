#pragma once

// Fresnel-style multistatic measurement files, calibration to scattered
// fields, and the text interchange format for ScatterDataset.
//
// Measurement files hold one record per line: whitespace-separated numbers in
// the order given by a ColumnMap; lines starting with '#' are comments.
//
// Interchange format (version 1):
//   #version: 1
//   #M: <emitters>
//   #N: <receivers>
//   #A: <emitter radius m>
//   #B: <receiver radius m>
//   #frequency_Hz: <f>
//   #seed: <unsigned or none>
//   #noise_db: <snr or inf>
// followed by M*N rows "m n re im" (1-based indices, %.17g), with "nan nan"
// for missing cells.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "osm/detail/atomic_file.hpp"
#include "osm/error.hpp"
#include "osm/forward.hpp"
#include "osm/geometry.hpp"
#include "osm/specfun.hpp"

namespace osm {

struct RawMeasurement {
    double tx_deg = 0.0;
    double rx_deg = 0.0;
    double freq_ghz = 0.0;
    Complex total;
    Complex incident;

    friend bool operator==(const RawMeasurement&, const RawMeasurement&) = default;
};

// Column order of a measurement file. "skip" ignores a column.
struct ColumnMap {
    std::vector<std::string> columns{"tx_angle", "rx_angle", "freq_ghz", "re_total",
                                     "im_total", "re_incident", "im_incident"};

    static const std::vector<std::string>& known() {
        static const std::vector<std::string> k{"tx_angle", "rx_angle", "freq_ghz", "re_total",
                                                "im_total", "re_incident", "im_incident"};
        return k;
    }

    // Comma-separated names, case-insensitive.
    static ColumnMap parse(std::string_view spec) {
        ColumnMap map;
        map.columns.clear();
        std::string cur;
        auto flush = [&] {
            std::string name;
            for (char c : cur)
                if (c != ' ' && c != '\t') name += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            map.columns.push_back(name);
            cur.clear();
        };
        for (char c : spec) {
            if (c == ',') flush();
            else cur += c;
        }
        flush();
        map.validate();
        return map;
    }

    void validate() const {
        for (const auto& c : columns) {
            if (c != "skip" && std::find(known().begin(), known().end(), c) == known().end())
                throw ConfigError("column map: unknown column '" + c + "'");
        }
        for (const auto& k : known()) {
            const auto count = std::count(columns.begin(), columns.end(), k);
            if (count != 1)
                throw ConfigError("column map: column '" + k + "' must appear exactly once (found " +
                                  std::to_string(count) + ")");
        }
    }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
        return s;
    }
};

namespace detail {

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Locale-independent parse of the whole token.
inline std::optional<double> parse_double(std::string_view tok) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
    return v;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t b = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > b) out.push_back(line.substr(b, i - b));
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline double wrap_degrees(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    if (w >= 360.0) w -= 360.0;
    return w;
}

// Smallest absolute difference of two angles in degrees.
inline double angle_gap_deg(double a, double b) {
    const double d = wrap_degrees(a - b);
    return std::min(d, 360.0 - d);
}

}  // namespace detail

inline std::vector<RawMeasurement> parse_fresnel(std::istream& in, const ColumnMap& map = {}) {
    map.validate();
    std::vector<RawMeasurement> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto toks = detail::split_ws(body);
        if (toks.size() != map.columns.size())
            throw ParseError("expected " + std::to_string(map.columns.size()) + " columns, found " +
                                 std::to_string(toks.size()),
                             lineno);
        RawMeasurement r;
        double re_t = 0, im_t = 0, re_i = 0, im_i = 0;
        for (std::size_t c = 0; c < toks.size(); ++c) {
            const auto& name = map.columns[c];
            if (name == "skip") continue;
            const auto v = detail::parse_double(toks[c]);
            if (!v || !std::isfinite(*v))
                throw ParseError("non-numeric value '" + std::string(toks[c]) + "' in column " + name, lineno);
            if (name == "tx_angle") r.tx_deg = detail::wrap_degrees(*v);
            else if (name == "rx_angle") r.rx_deg = detail::wrap_degrees(*v);
            else if (name == "freq_ghz") r.freq_ghz = *v;
            else if (name == "re_total") re_t = *v;
            else if (name == "im_total") im_t = *v;
            else if (name == "re_incident") re_i = *v;
            else if (name == "im_incident") im_i = *v;
        }
        if (!(r.freq_ghz > 0.0)) throw ParseError("frequency must be positive", lineno);
        r.total = {re_t, im_t};
        r.incident = {re_i, im_i};
        out.push_back(r);
    }
    return out;
}

inline std::vector<RawMeasurement> parse_fresnel_file(const std::filesystem::path& path, const ColumnMap& map = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_fresnel(in, map);
}

inline void write_fresnel(std::ostream& out, const std::vector<RawMeasurement>& records, const ColumnMap& map = {}) {
    map.validate();
    out << "# " << map.to_string() << '\n';
    for (const auto& r : records) {
        for (std::size_t c = 0; c < map.columns.size(); ++c) {
            const auto& name = map.columns[c];
            double v = 0.0;
            if (name == "tx_angle") v = r.tx_deg;
            else if (name == "rx_angle") v = r.rx_deg;
            else if (name == "freq_ghz") v = r.freq_ghz;
            else if (name == "re_total") v = r.total.real();
            else if (name == "im_total") v = r.total.imag();
            else if (name == "re_incident") v = r.incident.real();
            else if (name == "im_incident") v = r.incident.imag();
            out << (c ? " " : "") << detail::format_double(v);
        }
        out << '\n';
    }
}

inline void write_fresnel_file(const std::filesystem::path& path, const std::vector<RawMeasurement>& records,
                               const ColumnMap& map = {}) {
    detail::write_atomically(path, [&](std::ostream& out) { write_fresnel(out, records, map); });
}

struct CalibrationOptions {
    double snap_deg = 0.5;
    double freq_tol_ghz = 1e-6;
    // Complex factor applied to (total - incident), keyed by frequency in GHz.
    // Frequencies not listed use 1.
    std::map<double, Complex> factors;
};

struct CalibrationReport {
    std::string source;
    std::string column_map;
    std::string mode = "subtract";
    std::size_t records = 0;
    std::size_t used = 0;
    std::size_t rejected_off_lattice = 0;  // transmitter angle matches no emitter
    std::size_t rejected_out_of_arc = 0;   // receiver angle outside the emitter's arc
    std::size_t ignored_frequency = 0;     // frequency not requested
    std::size_t missing_cells = 0;
};

struct CalibratedDataset {
    std::vector<ScatterDataset> datasets;  // one per requested frequency, same order
    CalibrationReport provenance;
};

inline CalibratedDataset calibrate(const std::vector<RawMeasurement>& raw, std::shared_ptr<const ArrayGeometry> geom,
                                   const std::vector<double>& freqs_ghz, const CalibrationOptions& opts = {}) {
    if (!geom) throw ArgumentError("calibrate: null geometry");
    if (freqs_ghz.empty()) throw ArgumentError("calibrate: no frequencies requested");
    if (!(opts.snap_deg > 0.0)) throw ArgumentError("calibrate: snap tolerance must be positive");
    const int M = geom->emitters(), N = geom->receivers();
    constexpr double kDeg = 180.0 / std::numbers::pi;

    CalibratedDataset out;
    out.provenance.records = raw.size();
    out.provenance.mode = opts.factors.empty() ? "subtract" : "subtract+factor";
    std::vector<std::vector<unsigned char>> filled;
    for (double f : freqs_ghz) {
        if (!(f > 0.0)) throw ArgumentError("calibrate: frequencies must be positive");
        ScatterDataset ds(f * 1e9, geom);
        for (int m = 0; m < M; ++m)
            for (int n = 0; n < N; ++n) ds.set_missing(m, n);
        out.datasets.push_back(std::move(ds));
        filled.emplace_back(static_cast<std::size_t>(M) * N, 0);
    }

    for (const auto& r : raw) {
        std::optional<std::size_t> fi;
        for (std::size_t i = 0; i < freqs_ghz.size(); ++i)
            if (std::abs(r.freq_ghz - freqs_ghz[i]) <= opts.freq_tol_ghz) fi = i;
        if (!fi) {
            ++out.provenance.ignored_frequency;
            continue;
        }
        int m_hit = -1;
        for (int m = 0; m < M; ++m) {
            if (detail::angle_gap_deg(r.tx_deg, geom->emitter_angle(m) * kDeg) <= opts.snap_deg) {
                if (m_hit >= 0)
                    throw FormatError("calibrate: transmitter angle " + detail::format_double(r.tx_deg) +
                                      " deg is ambiguous");
                m_hit = m;
            }
        }
        if (m_hit < 0) {
            ++out.provenance.rejected_off_lattice;
            continue;
        }
        int n_hit = -1;
        for (int n = 0; n < N; ++n) {
            if (detail::angle_gap_deg(r.rx_deg, geom->receiver_angle(m_hit, n) * kDeg) <= opts.snap_deg) {
                if (n_hit >= 0)
                    throw FormatError("calibrate: receiver angle " + detail::format_double(r.rx_deg) +
                                      " deg is ambiguous");
                n_hit = n;
            }
        }
        if (n_hit < 0) {
            ++out.provenance.rejected_out_of_arc;
            continue;
        }
        auto& mask = filled[*fi];
        const std::size_t cell = geom->flat(m_hit, n_hit);
        if (mask[cell])
            throw FormatError("calibrate: duplicate record for transmitter " + std::to_string(m_hit + 1) +
                              ", receiver " + std::to_string(n_hit + 1) + " at " +
                              detail::format_double(r.freq_ghz) + " GHz");
        mask[cell] = 1;
        Complex factor{1.0, 0.0};
        for (const auto& [f, c] : opts.factors)
            if (std::abs(f - freqs_ghz[*fi]) <= opts.freq_tol_ghz) factor = c;
        out.datasets[*fi].set(m_hit, n_hit, factor * (r.total - r.incident));
        ++out.provenance.used;
    }
    for (const auto& ds : out.datasets) out.provenance.missing_cells += ds.missing_count();
    return out;
}

inline constexpr int kDatasetFormatVersion = 1;

inline void write_dataset(std::ostream& out, const ScatterDataset& ds) {
    const auto& g = ds.geometry();
    out << "#version: " << kDatasetFormatVersion << '\n'
        << "#M: " << g.emitters() << '\n'
        << "#N: " << g.receivers() << '\n'
        << "#A: " << detail::format_double(g.emitter_radius()) << '\n'
        << "#B: " << detail::format_double(g.receiver_radius()) << '\n'
        << "#frequency_Hz: " << detail::format_double(ds.frequency()) << '\n'
        << "#seed: " << (ds.seed ? std::to_string(*ds.seed) : std::string("none")) << '\n'
        << "#noise_db: " << detail::format_double(ds.noise_db) << '\n';
    for (int m = 0; m < g.emitters(); ++m) {
        for (int n = 0; n < g.receivers(); ++n) {
            out << m + 1 << ' ' << n + 1 << ' ';
            if (ds.present(m, n))
                out << detail::format_double(ds(m, n).real()) << ' ' << detail::format_double(ds(m, n).imag());
            else
                out << "nan nan";
            out << '\n';
        }
    }
}

inline void write_dataset(const std::filesystem::path& path, const ScatterDataset& ds) {
    detail::write_atomically(path, [&](std::ostream& out) { write_dataset(out, ds); });
}

inline ScatterDataset read_dataset(std::istream& in) {
    std::map<std::string, std::string> header;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::pair<std::size_t, std::string>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        if (body.front() == '#') {
            const auto colon = body.find(':');
            if (colon == std::string_view::npos) continue;
            header[std::string(detail::trim(body.substr(1, colon - 1)))] =
                std::string(detail::trim(body.substr(colon + 1)));
            continue;
        }
        rows.emplace_back(lineno, std::string(body));
    }
    const auto get = [&](const std::string& key) -> const std::string& {
        const auto it = header.find(key);
        if (it == header.end()) throw FormatError("dataset: missing header '" + key + "'");
        return it->second;
    };
    const auto number = [&](const std::string& key) {
        const auto v = detail::parse_double(get(key));
        if (!v) throw FormatError("dataset: bad value for '" + key + "': " + get(key));
        return *v;
    };
    const auto version = get("version");
    if (version != std::to_string(kDatasetFormatVersion))
        throw FormatError("dataset: format version mismatch (expected " + std::to_string(kDatasetFormatVersion) +
                          ", found " + version + ")");
    const double Md = number("M"), Nd = number("N");
    if (Md != std::floor(Md) || Nd != std::floor(Nd) || Md < 1 || Nd < 2 || Md * Nd > 1e8)
        throw FormatError("dataset: invalid M/N header");
    const int M = static_cast<int>(Md), N = static_cast<int>(Nd);
    auto geom = std::make_shared<const ArrayGeometry>(M, N, number("A"), number("B"));
    ScatterDataset ds(number("frequency_Hz"), geom);
    const auto& seed = get("seed");
    if (seed != "none") {
        std::uint64_t s = 0;
        const auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), s);
        if (ec != std::errc{} || ptr != seed.data() + seed.size()) throw FormatError("dataset: bad seed '" + seed + "'");
        ds.seed = s;
    }
    ds.noise_db = number("noise_db");

    const std::size_t expected = static_cast<std::size_t>(M) * N;
    if (rows.size() != expected)
        throw FormatError("dataset: expected " + std::to_string(expected) + " rows, found " +
                          std::to_string(rows.size()) + " (truncated or padded file)");
    std::vector<unsigned char> seen(expected, 0);
    for (const auto& [ln, text] : rows) {
        const auto toks = detail::split_ws(text);
        if (toks.size() != 4) throw ParseError("dataset: expected 'm n re im'", ln);
        const auto m = detail::parse_double(toks[0]);
        const auto n = detail::parse_double(toks[1]);
        const auto re = detail::parse_double(toks[2]);
        const auto im = detail::parse_double(toks[3]);
        if (!m || !n || !re || !im) throw ParseError("dataset: non-numeric field", ln);
        if (*m != std::floor(*m) || *n != std::floor(*n) || *m < 1 || *m > M || *n < 1 || *n > N)
            throw ParseError("dataset: index out of range", ln);
        const int mi = static_cast<int>(*m) - 1, ni = static_cast<int>(*n) - 1;
        const std::size_t cell = geom->flat(mi, ni);
        if (seen[cell]) throw ParseError("dataset: duplicate cell", ln);
        seen[cell] = 1;
        if (std::isnan(*re) && std::isnan(*im)) {
            ds.set_missing(mi, ni);
        } else {
            if (!std::isfinite(*re) || !std::isfinite(*im)) throw ParseError("dataset: non-finite value", ln);
            ds.set(mi, ni, {*re, *im});
        }
    }
    return ds;
}

inline ScatterDataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset " + path.string());
    return read_dataset(in);
}

// Plain CSV export "m,n,re,im" (1-based; missing cells as nan).
inline void write_dataset_csv(std::ostream& out, const ScatterDataset& ds) {
    out << "m,n,re,im\n";
    for (int m = 0; m < ds.emitters(); ++m)
        for (int n = 0; n < ds.receivers(); ++n) {
            const Complex v = ds(m, n);
            out << m + 1 << ',' << n + 1 << ',' << detail::format_double(v.real()) << ','
                << detail::format_double(v.imag()) << '\n';
        }
}

// Records for a synthetic measurement: total = incident + scattered, at the
// lattice angles of the geometry. Missing cells are skipped.
inline std::vector<RawMeasurement> export_measurements(const ScatterDataset& ds,
                                                       const std::vector<Complex>& incident) {
    const auto& g = ds.geometry();
    if (incident.size() != static_cast<std::size_t>(g.emitters()) * g.receivers())
        throw ArgumentError("export_measurements: incident field size mismatch");
    constexpr double kDeg = 180.0 / std::numbers::pi;
    std::vector<RawMeasurement> out;
    for (int m = 0; m < g.emitters(); ++m)
        for (int n = 0; n < g.receivers(); ++n) {
            if (!ds.present(m, n)) continue;
            RawMeasurement r;
            r.tx_deg = detail::wrap_degrees(g.emitter_angle(m) * kDeg);
            r.rx_deg = detail::wrap_degrees(g.receiver_angle(m, n) * kDeg);
            r.freq_ghz = ds.frequency() / 1e9;
            r.incident = incident[g.flat(m, n)];
            r.total = r.incident + ds(m, n);
            out.push_back(r);
        }
    return out;
}

}  // namespace osm
