#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "osm/osm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace osm::cli {

namespace {

std::string fmt(double v) { return detail::format_double(v); }

// "8", "2,4,6" or "start:stop:step" (inclusive).
std::vector<double> parse_freq_list(const std::string& s) {
    std::vector<double> out;
    if (s.empty()) return out;
    if (s.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ':')) {
            const auto v = detail::parse_double(detail::trim(tok));
            if (!v) throw ConfigError("bad frequency range '" + s + "'");
            parts.push_back(*v);
        }
        if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
            throw ConfigError("frequency range must be start:stop:step with step > 0");
        const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
        for (long i = 0; i <= count; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    } else {
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const auto v = detail::parse_double(detail::trim(tok));
            if (!v) throw ConfigError("bad frequency '" + tok + "'");
            out.push_back(*v);
        }
    }
    for (double f : out)
        if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("frequencies must be positive");
    return out;
}

std::pair<int, int> parse_grid(const std::string& s) {
    const auto comma = s.find(',');
    const auto a = detail::parse_double(detail::trim(s.substr(0, comma)));
    const auto b = comma == std::string::npos ? a : detail::parse_double(detail::trim(s.substr(comma + 1)));
    if (!a || !b || *a != std::floor(*a) || *b != std::floor(*b) || *a < 2 || *b < 2 || *a > 10000 || *b > 10000)
        throw ConfigError("--grid expects nx,ny with 2 <= n <= 10000");
    return {static_cast<int>(*a), static_cast<int>(*b)};
}

std::string freq_tag(double ghz) {
    std::string s = fmt(ghz);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s + "GHz";
}

std::shared_ptr<const ArrayGeometry> make_geometry(const RunConfig& cfg) {
    try {
        return std::make_shared<const ArrayGeometry>(cfg.M, cfg.N, cfg.A, cfg.B);
    } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
    }
}

ImagingGrid make_cli_grid(const RunConfig& cfg, const ArrayGeometry& geom) {
    if (!(cfg.extent > 0.0)) throw ConfigError("--extent must be positive");
    try {
        return make_grid(-cfg.extent, cfg.extent, -cfg.extent, cfg.extent, cfg.nx, cfg.ny, geom);
    } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    detail::write_atomically(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

json metadata(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["config"] = config_json(cfg);
    j["rerun"] = rerun_args(cfg);
    return j;
}

fs::path prepare_out(const RunConfig& cfg) {
    const fs::path out(cfg.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory " + out.string());
    return out;
}

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

json to_json(const CheckResult& c) {
    return json{{"name", c.name}, {"measured", c.measured}, {"threshold", c.threshold}, {"pass", c.pass}};
}

std::vector<CheckResult> verify_series() {
    struct Row { std::int64_t q; double s1, s2; };
    static const Row table[] = {{10, 3.3211, 5.8579},          {100, 7.8744, 10.3748},
                                {1000, 12.4709, 14.9709},      {10000, 17.0752, 19.5752},
                                {100000, 21.6803, 24.1803},    {1000000, 26.2855, 28.7855},
                                {10000000, 30.8906, 33.3906},  {100000000, 35.4958, 37.9958},
                                {1000000000, 40.1010, 42.6010}};
    std::vector<CheckResult> out;
    for (const auto& r : table) {
        const auto [s1, s2] = series_s1_s2(r.q);
        const double gap = std::max(std::abs(s1 - r.s1), std::abs(s2 - r.s2));
        out.push_back({"series Q=" + std::to_string(r.q), gap, 1e-4, gap <= 1e-4});
    }
    return out;
}

std::vector<CheckResult> verify_lemma() {
    const double pi = std::numbers::pi;
    double worst = 0.0;
    for (int ix = 0; ix < 5; ++ix) {
        const double x = 95.0 * ix / 4.0;
        for (int iv = 0; iv < 5; ++iv) {
            const double v = 2.0 * pi * iv / 5.0 + 0.1;
            for (int ip = 0; ip < 5; ++ip) {
                const double p = -pi + 2.0 * pi * ip / 5.0 + 0.05;
                const Complex c = lemma_integral_closed(x, v + pi / 3.0, v + 5.0 * pi / 3.0, v, p);
                const Complex q = lemma_integral_quadrature(x, v + pi / 3.0, v + 5.0 * pi / 3.0, v, p);
                worst = std::max(worst, std::abs(c - q));
            }
        }
    }
    return {{"lemma closed vs quadrature (125 points, x <= 95)", worst, 1e-8, worst < 1e-8}};
}

std::vector<CheckResult> verify_structure(const RunConfig& cfg) {
    auto geom = make_geometry(cfg);
    const ImagingGrid grid = make_cli_grid(cfg, *geom);
    const MediumParams med = MediumParams::at_frequency(8e9);
    const std::vector<SmallObject> obj{{{0.0, 0.0}, 0.01, 5.0 * kVacuumPermeability}};
    const auto ds = born_scattered(obj, med, geom, {cfg.threads});
    IndicatorOptions opts;
    opts.threads = cfg.threads;
    const auto single = osm_single(ds, 0, grid, opts);
    const auto multi = osm_multi(ds, grid, opts);
    const auto ts = structure_single_map(grid, 0, obj, med, *geom, {}, SeriesForm::exact, cfg.threads);
    const auto tm = structure_multi_map(grid, obj, med, *geom, {}, SeriesForm::exact, cfg.threads);
    const double gs = normalized_rms_gap(single.values, ts);
    const double gm = normalized_rms_gap(multi.values, tm);
    return {{"single-source map vs closed form (normalized RMS, 8 GHz)", gs, 0.05, gs <= 0.05},
            {"multi-source map vs closed form (normalized RMS, 8 GHz)", gm, 0.05, gm <= 0.05}};
}

}  // namespace

std::string dataset_filename(double freq_ghz) { return "dataset_" + freq_tag(freq_ghz) + ".txt"; }

std::vector<SmallObject> parse_case_json(const json& j) {
    if (!j.is_object() || !j.contains("objects") || !j["objects"].is_array())
        throw ConfigError("case file: expected an object with an 'objects' array");
    std::vector<SmallObject> out;
    for (const auto& o : j["objects"]) {
        try {
            const auto& c = o.at("center");
            if (!c.is_array() || c.size() != 2) throw ConfigError("case file: center must be [x, y]");
            out.push_back({{c[0].get<double>(), c[1].get<double>()},
                           o.at("radius").get<double>(),
                           o.at("mu_rel").get<double>() * kVacuumPermeability});
        } catch (const json::exception& e) {
            throw ConfigError(std::string("case file: ") + e.what());
        }
    }
    return out;
}

std::vector<SmallObject> load_case(const std::string& spec) {
    if (spec.size() == 5 && spec.rfind("case", 0) == 0 && spec[4] >= '1' && spec[4] <= '4')
        return preset_case(spec[4] - '0').objects;
    std::ifstream in(spec);
    if (!in) throw ConfigError("unknown case '" + spec + "' (expected case1..case4 or a JSON file)");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("case file " + spec + ": " + e.what());
    }
    return parse_case_json(j);
}

json config_json(const RunConfig& cfg) {
    json j;
    j["geometry"] = {{"M", cfg.M}, {"N", cfg.N}, {"A", cfg.A}, {"B", cfg.B}};
    j["grid"] = {{"nx", cfg.nx}, {"ny", cfg.ny}, {"extent", cfg.extent}};
    j["freq_ghz"] = cfg.freq_ghz;
    j["threads"] = cfg.threads;
    j["out"] = cfg.out;
    if (cfg.command == "synth") {
        j["case"] = cfg.case_spec;
        json objs = json::array();
        for (const auto& o : cfg.objects)
            objs.push_back({{"center", {o.center.x, o.center.y}},
                            {"radius", o.radius},
                            {"mu_rel", o.permeability / kVacuumPermeability}});
        j["objects"] = objs;
        j["noise_db"] = cfg.noise_db ? json(*cfg.noise_db) : json(nullptr);
        j["seed"] = cfg.seed;
        j["model"] = cfg.model;
    } else if (cfg.command == "image") {
        j["data"] = cfg.data;
        j["mode"] = cfg.mode;
        j["variant"] = cfg.variant;
        j["c"] = {cfg.cx, cfg.cy};
    } else if (cfg.command == "profile") {
        j["kind"] = cfg.kind;
        j["points"] = cfg.points;
        j["xmax"] = cfg.xmax;
    } else if (cfg.command == "verify") {
        j["suite"] = cfg.suite;
    } else if (cfg.command == "ingest") {
        j["file"] = cfg.file;
        j["columns"] = cfg.columns.empty() ? ColumnMap{}.to_string() : cfg.columns;
        j["snap_deg"] = cfg.snap_deg;
    }
    return j;
}

std::vector<std::string> rerun_args(const RunConfig& cfg) {
    std::vector<std::string> a{cfg.command};
    auto add = [&](const std::string& k, const std::string& v) {
        a.push_back(k);
        a.push_back(v);
    };
    add("--M", std::to_string(cfg.M));
    add("--N", std::to_string(cfg.N));
    add("--A", fmt(cfg.A));
    add("--B", fmt(cfg.B));
    if (cfg.command == "image" || cfg.command == "verify") {
        add("--grid", std::to_string(cfg.nx) + "," + std::to_string(cfg.ny));
        add("--extent", fmt(cfg.extent));
    }
    if (!cfg.freq_ghz.empty()) {
        std::string f;
        for (std::size_t i = 0; i < cfg.freq_ghz.size(); ++i) f += (i ? "," : "") + fmt(cfg.freq_ghz[i]);
        add("--freq-ghz", f);
    }
    add("--threads", std::to_string(cfg.threads));
    add("--out", cfg.out);
    if (cfg.command == "synth") {
        add("--case", cfg.case_spec);
        if (cfg.noise_db) add("--noise-db", fmt(*cfg.noise_db));
        add("--seed", std::to_string(cfg.seed));
        add("--model", cfg.model);
    } else if (cfg.command == "image") {
        for (const auto& d : cfg.data) add("--data", d);
        add("--mode", cfg.mode);
        add("--variant", cfg.variant);
        add("--c", fmt(cfg.cx) + "," + fmt(cfg.cy));
    } else if (cfg.command == "profile") {
        add("--kind", cfg.kind);
        add("--points", std::to_string(cfg.points));
        add("--xmax", fmt(cfg.xmax));
    } else if (cfg.command == "verify") {
        add("--suite", cfg.suite);
    } else if (cfg.command == "ingest") {
        add("--file", cfg.file);
        if (!cfg.columns.empty()) add("--columns", cfg.columns);
        add("--snap-deg", fmt(cfg.snap_deg));
    }
    return a;
}

int cmd_synth(const RunConfig& cfg, std::ostream& log) {
    if (cfg.freq_ghz.empty()) throw ConfigError("synth: --freq-ghz is required");
    if (cfg.model != "born" && cfg.model != "foldy-lax") throw ConfigError("synth: --model must be born or foldy-lax");
    auto geom = make_geometry(cfg);
    try {
        validate_objects(cfg.objects, *geom);
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("synth: invalid case: ") + e.what());
    }
    if (cfg.objects.empty()) throw ConfigError("synth: case has no objects");
    const fs::path out = prepare_out(cfg);
    json meta = metadata(cfg);
    meta["outputs"] = json::array();
    for (std::size_t i = 0; i < cfg.freq_ghz.size(); ++i) {
        const MediumParams med = MediumParams::at_frequency(cfg.freq_ghz[i] * 1e9);
        ScatterDataset ds = cfg.model == "born" ? born_scattered(cfg.objects, med, geom, {cfg.threads})
                                                : foldy_lax_scattered(cfg.objects, med, geom, {cfg.threads});
        // Each frequency draws from its own stream: seed + frequency index.
        if (cfg.noise_db) ds = add_awgn(ds, *cfg.noise_db, cfg.seed + i);
        const fs::path file = out / dataset_filename(cfg.freq_ghz[i]);
        write_dataset(file, ds);
        meta["outputs"].push_back(file.filename().string());
        log << "wrote " << file.string() << '\n';
    }
    write_json(out / "metadata.json", meta);
    return 0;
}

int cmd_image(const RunConfig& cfg, std::ostream& log) {
    if (cfg.data.empty()) throw ConfigError("image: at least one --data file is required");
    std::vector<ScatterDataset> datasets;
    for (const auto& d : cfg.data) {
        if (!fs::exists(d)) throw IoError("image: dataset file not found: " + d);
        datasets.push_back(read_dataset(fs::path(d)));
    }
    const ArrayGeometry& geom = datasets.front().geometry();
    const ImagingGrid grid = make_cli_grid(cfg, geom);

    IndicatorOptions opts;
    opts.threads = cfg.threads;
    if (cfg.variant == "g") opts.test_vector = TestVector::G;
    else if (cfg.variant == "f") opts.test_vector = TestVector::F;
    else if (cfg.variant == "h") opts.test_vector = TestVector::H;
    else throw ConfigError("image: --variant must be g, f or h");
    opts.c = {cfg.cx, cfg.cy};
    if (opts.test_vector == TestVector::H && cfg.cx == 0.0 && cfg.cy == 0.0)
        throw ConfigError("image: variant h needs a nonzero --c");

    struct Named { std::string stem; IndicatorMap map; };
    std::vector<Named> maps;
    if (cfg.mode == "multi") {
        for (const auto& ds : datasets)
            maps.push_back({"map_multi_" + freq_tag(ds.frequency() / 1e9), osm_multi(ds, grid, opts)});
    } else if (cfg.mode.rfind("single:", 0) == 0) {
        const auto m = detail::parse_double(cfg.mode.substr(7));
        if (!m || *m != std::floor(*m)) throw ConfigError("image: --mode single:<m> needs an integer m");
        for (const auto& ds : datasets) {
            if (*m < 1 || *m > ds.emitters())
                throw ConfigError("image: emitter " + cfg.mode.substr(7) + " out of range 1.." +
                                  std::to_string(ds.emitters()));
            maps.push_back({"map_single" + cfg.mode.substr(7) + "_" + freq_tag(ds.frequency() / 1e9),
                            osm_single(ds, static_cast<int>(*m) - 1, grid, opts)});
        }
    } else if (cfg.mode.rfind("fsm:", 0) == 0) {
        const std::string j = cfg.mode.substr(4);
        if (j != "1" && j != "2" && j != "3") throw ConfigError("image: --mode fsm:<1|2|3>");
        maps.push_back({"map_fsm" + j, osm_multifreq(datasets, std::stoi(j), grid, opts)});
    } else {
        throw ConfigError("image: --mode must be single:<m>, multi or fsm:<1|2|3>");
    }

    const fs::path out = prepare_out(cfg);
    json meta = metadata(cfg);
    meta["maps"] = json::array();
    for (const auto& [stem, map] : maps) {
        write_map_csv(out / (stem + ".csv"), map);
        write_map_pgm(out / (stem + ".pgm"), map);
        const Vec2 at = grid.point(map.argmax());
        json peaks = json::array();
        for (const auto& p : find_peaks(map, 5, 0.01))
            peaks.push_back({{"x", p.position.x}, {"y", p.position.y}, {"value", p.value}});
        std::vector<double> freqs;
        for (double f : map.frequencies) freqs.push_back(f / 1e9);
        meta["maps"].push_back({{"stem", stem},
                                {"raw_max", map.max()},
                                {"argmax", {at.x, at.y}},
                                {"frequencies_ghz", freqs},
                                {"excluded_points", map.excluded_points},
                                {"peaks", peaks}});
        log << "wrote " << (out / (stem + ".csv")).string() << " (max " << fmt(map.max()) << " at " << fmt(at.x)
            << ", " << fmt(at.y) << ")\n";
    }
    write_json(out / "metadata.json", meta);
    return 0;
}

int cmd_profile(const RunConfig& cfg, std::ostream& log) {
    if (cfg.freq_ghz.empty()) throw ConfigError("profile: --freq-ghz is required");
    if (cfg.points < 2) throw ConfigError("profile: --points must be at least 2");
    if (!(cfg.xmax > 0.0)) throw ConfigError("profile: --xmax must be positive");
    const ProfileKind kind = [&] {
        try {
            return parse_profile_kind(cfg.kind);
        } catch (const ArgumentError& e) {
            throw ConfigError(e.what());
        }
    }();
    const fs::path out = prepare_out(cfg);
    json meta = metadata(cfg);
    meta["profiles"] = json::array();
    for (double f : cfg.freq_ghz) {
        std::vector<double> xs(static_cast<std::size_t>(cfg.points)), vs(xs.size());
        detail::parallel_for(xs.size(), cfg.threads, [&](std::size_t i) {
            xs[i] = -cfg.xmax + 2.0 * cfg.xmax * static_cast<double>(i) / (cfg.points - 1);
            vs[i] = d_profile(kind, xs[i], f * 1e9);
        });
        const auto it = std::max_element(vs.begin(), vs.end());
        const fs::path file = out / ("profile_" + cfg.kind + "_" + freq_tag(f) + ".csv");
        detail::write_atomically(file, [&](std::ostream& o) { write_profile_csv(o, xs, vs); });
        meta["profiles"].push_back({{"file", file.filename().string()},
                                    {"freq_ghz", f},
                                    {"max", *it},
                                    {"argmax_x", xs[static_cast<std::size_t>(it - vs.begin())]}});
        log << "wrote " << file.string() << " (max " << fmt(*it) << ")\n";
    }
    write_json(out / "metadata.json", meta);
    return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
    const std::string& s = cfg.suite;
    if (s != "lemma" && s != "series" && s != "structure" && s != "all")
        throw ConfigError("verify: --suite must be lemma, series, structure or all");
    std::vector<CheckResult> checks;
    auto append = [&](std::vector<CheckResult> more) { checks.insert(checks.end(), more.begin(), more.end()); };
    if (s == "series" || s == "all") append(verify_series());
    if (s == "lemma" || s == "all") append(verify_lemma());
    if (s == "structure" || s == "all") append(verify_structure(cfg));

    bool ok = true;
    json report = metadata(cfg);
    report["checks"] = json::array();
    for (const auto& c : checks) {
        ok = ok && c.pass;
        report["checks"].push_back(to_json(c));
        log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << fmt(c.measured) << " (limit " << fmt(c.threshold)
            << ")\n";
    }
    report["pass"] = ok;
    const fs::path out = prepare_out(cfg);
    write_json(out / "verify.json", report);
    return ok ? 0 : 1;
}

int cmd_ingest(const RunConfig& cfg, std::ostream& log) {
    if (cfg.file.empty()) throw ConfigError("ingest: --file is required");
    const ColumnMap columns = cfg.columns.empty() ? ColumnMap{} : ColumnMap::parse(cfg.columns);
    auto geom = make_geometry(cfg);
    const auto raw = parse_fresnel_file(cfg.file, columns);
    std::vector<double> freqs = cfg.freq_ghz;
    if (freqs.empty()) {
        for (const auto& r : raw)
            if (std::none_of(freqs.begin(), freqs.end(), [&](double f) { return std::abs(f - r.freq_ghz) <= 1e-6; }))
                freqs.push_back(r.freq_ghz);
        std::sort(freqs.begin(), freqs.end());
    }
    if (freqs.empty()) throw ConfigError("ingest: no records and no --freq-ghz given");
    CalibrationOptions copt;
    copt.snap_deg = cfg.snap_deg;
    auto cal = calibrate(raw, geom, freqs, copt);
    cal.provenance.source = cfg.file;
    cal.provenance.column_map = columns.to_string();

    const fs::path out = prepare_out(cfg);
    RunConfig resolved = cfg;
    resolved.freq_ghz = freqs;
    json meta = metadata(resolved);
    const auto& p = cal.provenance;
    meta["provenance"] = {{"source", p.source},
                          {"column_map", p.column_map},
                          {"calibration", p.mode},
                          {"records", p.records},
                          {"used", p.used},
                          {"rejected_off_lattice", p.rejected_off_lattice},
                          {"rejected_out_of_arc", p.rejected_out_of_arc},
                          {"ignored_frequency", p.ignored_frequency},
                          {"missing_cells", p.missing_cells}};
    meta["outputs"] = json::array();
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        const fs::path file = out / dataset_filename(freqs[i]);
        write_dataset(file, cal.datasets[i]);
        meta["outputs"].push_back(file.filename().string());
    }
    write_json(out / "metadata.json", meta);
    log << "ingested " << p.used << " of " << p.records << " records (" << p.rejected_out_of_arc
        << " outside the receiver arc, " << p.rejected_off_lattice << " off the emitter lattice, "
        << p.missing_cells << " missing cells)\n";
    return 0;
}

int run(const std::vector<std::string>& args, std::ostream& log, std::ostream& err) {
    CLI::App app{"Orthogonality sampling imaging toolkit"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string freq, grid = "201,201", c = "1,0";
    std::optional<double> noise;

    auto common = [&](CLI::App* sub, bool imaging) {
        sub->add_option("--M", cfg.M, "number of emitters");
        sub->add_option("--N", cfg.N, "receivers per emitter");
        sub->add_option("--A", cfg.A, "emitter circle radius (m)");
        sub->add_option("--B", cfg.B, "receiver circle radius (m)");
        sub->add_option("--freq-ghz", freq, "frequencies in GHz: f | f1,f2,... | start:stop:step");
        sub->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
        sub->add_option("--out", cfg.out, "output directory");
        if (imaging) {
            sub->add_option("--grid", grid, "grid points nx,ny");
            sub->add_option("--extent", cfg.extent, "grid half-width (m)");
        }
    };

    auto* synth = app.add_subcommand("synth", "generate synthetic scattered-field datasets");
    common(synth, false);
    synth->add_option("--case", cfg.case_spec, "case1..case4 or JSON case file")->required();
    synth->add_option("--noise-db", noise, "signal-to-noise ratio in dB");
    synth->add_option("--seed", cfg.seed, "noise seed");
    synth->add_option("--model", cfg.model, "born | foldy-lax");

    auto* image = app.add_subcommand("image", "compute indicator maps from dataset files");
    common(image, true);
    image->add_option("--data", cfg.data, "dataset file(s)");
    image->add_option("--mode", cfg.mode, "single:<m> | multi | fsm:<1|2|3>");
    image->add_option("--variant", cfg.variant, "test vector g | f | h");
    image->add_option("--c", c, "vector c for variant h, cx,cy");

    auto* profile = app.add_subcommand("profile", "write diagnostic profile curves");
    common(profile, false);
    profile->add_option("--kind", cfg.kind, "osm1 | osm2 | osm | msm1 | msm2 | msm");
    profile->add_option("--points", cfg.points, "samples per curve");
    profile->add_option("--xmax", cfg.xmax, "half-width of the profile (m)");

    auto* verify = app.add_subcommand("verify", "run numerical self-checks");
    common(verify, true);
    verify->add_option("--suite", cfg.suite, "lemma | series | structure | all");

    auto* ingest = app.add_subcommand("ingest", "convert a measurement file to dataset files");
    common(ingest, false);
    ingest->add_option("--file", cfg.file, "measurement file")->required();
    ingest->add_option("--columns", cfg.columns, "comma-separated column map");
    ingest->add_option("--snap-deg", cfg.snap_deg, "angle snap tolerance (deg)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        log << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        cfg.freq_ghz = parse_freq_list(freq);
        std::tie(cfg.nx, cfg.ny) = parse_grid(grid);
        {
            const auto comma = c.find(',');
            const auto x = detail::parse_double(detail::trim(c.substr(0, comma)));
            const auto y = comma == std::string::npos ? std::optional<double>(0.0)
                                                      : detail::parse_double(detail::trim(c.substr(comma + 1)));
            if (!x || !y) throw ConfigError("--c expects cx,cy");
            cfg.cx = *x;
            cfg.cy = *y;
        }
        cfg.noise_db = noise;
        if (cfg.command == "synth") return cmd_synth([&] { cfg.objects = load_case(cfg.case_spec); return cfg; }(), log);
        if (cfg.command == "image") return cmd_image(cfg, log);
        if (cfg.command == "profile") return cmd_profile(cfg, log);
        if (cfg.command == "verify") return cmd_verify(cfg, log);
        if (cfg.command == "ingest") return cmd_ingest(cfg, log);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}

}  // namespace osm::cli
