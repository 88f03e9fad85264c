#pragma once

// Orthogonality-sampling indicator maps.
//
// For an emitter set E the pre-magnitude response at a search point r is
//   R(r) = sum_{m in E} sum_n u_scat(b_{m,n}, a_m) conj(t_{m,n}(r)),
// with the default test vector t_{m,n}(r) = grad G(b_{m,n}, r) . grad G(a_m, r).
// The single-source map is |R| with E = {m}; the multi-source map takes all
// emitters. Missing data cells are skipped.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osm/detail/parallel.hpp"
#include "osm/error.hpp"
#include "osm/forward.hpp"
#include "osm/geometry.hpp"
#include "osm/specfun.hpp"

namespace osm {

enum class MapMode { single, multi, multifreq };

// Alternative test vectors: G uses grad G(b, r) . grad G(a_m, r), F uses
// G(b, r), H uses c . grad G(b, r) for a fixed nonzero c.
enum class TestVector { G, F, H };

struct IndicatorMap {
    ImagingGrid grid;
    std::vector<double> values;  // row-major, grid.index(i, j)
    MapMode mode = MapMode::multi;
    std::optional<int> emitter;          // 0-based, single-source maps only
    std::optional<int> fusion;           // 1..3, multi-frequency maps only
    TestVector test_vector = TestVector::G;
    std::vector<double> frequencies;     // Hz
    bool normalized = false;
    std::size_t excluded_points = 0;     // grid points too close to an antenna

    double at(int i, int j) const { return values.at(grid.index(i, j)); }
    double at(Vec2 p) const {
        const auto [i, j] = grid.nearest(p);
        return at(i, j);
    }
    double max() const {
        return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    }
    std::size_t argmax() const {
        return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    }
    IndicatorMap normalized_copy() const {
        IndicatorMap out = *this;
        const double mx = max();
        if (mx > 0.0)
            for (auto& v : out.values) v /= mx;
        out.normalized = true;
        return out;
    }
};

struct IndicatorOptions {
    unsigned threads = 1;
    TestVector test_vector = TestVector::G;
    Vec2 c{1.0, 0.0};  // used by TestVector::H
    // Optional point-dependent c for TestVector::H; overrides c when set.
    std::function<CVec2(Vec2)> c_field;
};

// Grid points closer than this to an antenna are not evaluated (value 0).
inline constexpr double kAntennaExclusion = 1e-3;

namespace detail {

inline bool near_antenna(Vec2 r, const ArrayGeometry& geom) {
    for (const auto& a : geom.emitter_points())
        if (norm(r - a) < kAntennaExclusion) return true;
    for (const auto& b : geom.receiver_sites())
        if (norm(r - b) < kAntennaExclusion) return true;
    return false;
}

// Complex responses for the given emitters at every grid point.
inline std::vector<Complex> response(const ScatterDataset& ds, std::span<const int> emitters,
                                     const ImagingGrid& grid, const IndicatorOptions& opts,
                                     std::size_t* excluded = nullptr) {
    const ArrayGeometry& geom = ds.geometry();
    const double k = MediumParams::at_frequency(ds.frequency()).wavenumber();
    const int N = geom.receivers();
    if (opts.test_vector == TestVector::H && !opts.c_field && opts.c.x == 0.0 && opts.c.y == 0.0)
        throw ArgumentError("test vector H requires a nonzero c");

    // Sites actually touched by the requested emitters.
    std::vector<std::size_t> site_slot(geom.receiver_sites().size(), std::numeric_limits<std::size_t>::max());
    std::vector<std::size_t> sites;
    for (int m : emitters) {
        if (m < 0 || m >= geom.emitters())
            throw ArgumentError("emitter index " + std::to_string(m + 1) + " out of range 1.." +
                                std::to_string(geom.emitters()));
        for (int n = 0; n < N; ++n) {
            const std::size_t s = geom.receiver_site(m, n);
            if (site_slot[s] == std::numeric_limits<std::size_t>::max()) {
                site_slot[s] = sites.size();
                sites.push_back(s);
            }
        }
    }

    std::vector<Complex> out(grid.size());
    std::vector<unsigned char> skipped(grid.size(), 0);
    parallel_for(grid.size(), opts.threads, [&](std::size_t p) {
        const Vec2 r = grid.point(p);
        if (near_antenna(r, geom)) {
            skipped[p] = 1;
            return;
        }
        // Per-site receiver factor of the test vector.
        std::vector<CVec2> gb(sites.size());
        std::vector<Complex> fb;
        if (opts.test_vector == TestVector::G) {
            for (std::size_t i = 0; i < sites.size(); ++i)
                gb[i] = grad_green(k, geom.receiver_sites()[sites[i]], r);
        } else {
            fb.resize(sites.size());
            const bool field = opts.test_vector == TestVector::H && opts.c_field;
            const CVec2 c = field ? opts.c_field(r) : CVec2{opts.c.x, opts.c.y};
            for (std::size_t i = 0; i < sites.size(); ++i) {
                const Vec2 b = geom.receiver_sites()[sites[i]];
                fb[i] = opts.test_vector == TestVector::F ? green(k, b, r) : dot(c, grad_green(k, b, r));
            }
        }
        Complex acc{0.0, 0.0};
        for (int m : emitters) {
            CVec2 ga{};
            if (opts.test_vector == TestVector::G) ga = grad_green(k, geom.emitter_point(m), r);
            for (int n = 0; n < N; ++n) {
                if (!ds.present(m, n)) continue;
                const std::size_t slot = site_slot[geom.receiver_site(m, n)];
                const Complex t = opts.test_vector == TestVector::G ? dot(gb[slot], ga) : fb[slot];
                acc += ds(m, n) * std::conj(t);
            }
        }
        out[p] = acc;
    });
    if (excluded) {
        *excluded = 0;
        for (auto s : skipped) *excluded += s;
    }
    return out;
}

inline std::vector<int> all_emitters(const ScatterDataset& ds) {
    std::vector<int> e(static_cast<std::size_t>(ds.emitters()));
    for (int m = 0; m < ds.emitters(); ++m) e[static_cast<std::size_t>(m)] = m;
    return e;
}

inline IndicatorMap magnitude_map(const ImagingGrid& grid, const std::vector<Complex>& resp) {
    IndicatorMap map{grid, {}, MapMode::multi, {}, {}, TestVector::G, {}, false, 0};
    map.values.resize(resp.size());
    for (std::size_t i = 0; i < resp.size(); ++i) map.values[i] = std::abs(resp[i]);
    return map;
}

}  // namespace detail

// Pre-magnitude multi-source response, exposed for multi-frequency fusion.
inline std::vector<Complex> msm_response(const ScatterDataset& ds, const ImagingGrid& grid,
                                         IndicatorOptions opts = {}) {
    const auto e = detail::all_emitters(ds);
    return detail::response(ds, e, grid, opts);
}

// Single-source map for emitter m (0-based).
inline IndicatorMap osm_single(const ScatterDataset& ds, int m, const ImagingGrid& grid,
                               IndicatorOptions opts = {}) {
    if (m < 0 || m >= ds.emitters())
        throw ArgumentError("osm_single: emitter " + std::to_string(m + 1) + " out of range 1.." +
                            std::to_string(ds.emitters()));
    const int e[] = {m};
    std::size_t excluded = 0;
    IndicatorMap map = detail::magnitude_map(grid, detail::response(ds, e, grid, opts, &excluded));
    map.mode = MapMode::single;
    map.emitter = m;
    map.test_vector = opts.test_vector;
    map.frequencies = {ds.frequency()};
    map.excluded_points = excluded;
    return map;
}

inline IndicatorMap osm_multi(const ScatterDataset& ds, const ImagingGrid& grid, IndicatorOptions opts = {}) {
    const auto e = detail::all_emitters(ds);
    std::size_t excluded = 0;
    IndicatorMap map = detail::magnitude_map(grid, detail::response(ds, e, grid, opts, &excluded));
    map.mode = MapMode::multi;
    map.test_vector = opts.test_vector;
    map.frequencies = {ds.frequency()};
    map.excluded_points = excluded;
    return map;
}

// Single-source map with the F or H test vector (G gives osm_single).
inline IndicatorMap osm_single_variant(const ScatterDataset& ds, int m, const ImagingGrid& grid,
                                       TestVector variant, Vec2 c = {1.0, 0.0}, unsigned threads = 1) {
    if (variant == TestVector::H && c.x == 0.0 && c.y == 0.0)
        throw ArgumentError("osm_single_variant: H requires a nonzero vector c");
    IndicatorOptions opts;
    opts.threads = threads;
    opts.test_vector = variant;
    opts.c = c;
    return osm_single(ds, m, grid, opts);
}

// Variant H with a point-dependent (possibly complex) c(r).
inline IndicatorMap osm_single_variant(const ScatterDataset& ds, int m, const ImagingGrid& grid,
                                       std::function<CVec2(Vec2)> c_field, unsigned threads = 1) {
    if (!c_field) throw ArgumentError("osm_single_variant: empty c field");
    IndicatorOptions opts;
    opts.threads = threads;
    opts.test_vector = TestVector::H;
    opts.c_field = std::move(c_field);
    return osm_single(ds, m, grid, opts);
}

// Multi-frequency fusion of multi-source maps:
//   1: sum_f F_f(r) / max F_f     2: |sum_f R_f(r)|     3: sum_f F_f(r)
// where F_f = |R_f| is the multi-source map at frequency f and R_f its
// complex response.
inline IndicatorMap osm_multifreq(std::span<const ScatterDataset> datasets, int mode, const ImagingGrid& grid,
                                  IndicatorOptions opts = {}) {
    if (datasets.empty()) throw ArgumentError("osm_multifreq: empty frequency set");
    if (mode < 1 || mode > 3) throw ArgumentError("osm_multifreq: mode must be 1, 2 or 3");
    std::vector<double> acc(grid.size(), 0.0);
    std::vector<Complex> cacc(grid.size(), Complex{0.0, 0.0});
    IndicatorMap map{grid, {}, MapMode::multifreq, {}, mode, opts.test_vector, {}, false, 0};
    for (const auto& ds : datasets) {
        std::size_t excluded = 0;
        const auto e = detail::all_emitters(ds);
        const auto resp = detail::response(ds, e, grid, opts, &excluded);
        map.excluded_points = std::max(map.excluded_points, excluded);
        map.frequencies.push_back(ds.frequency());
        if (mode == 2) {
            for (std::size_t i = 0; i < resp.size(); ++i) cacc[i] += resp[i];
            continue;
        }
        double mx = 0.0;
        for (const auto& v : resp) mx = std::max(mx, std::abs(v));
        const double scale = (mode == 1) ? (mx > 0.0 ? 1.0 / mx : 0.0) : 1.0;
        for (std::size_t i = 0; i < resp.size(); ++i) acc[i] += std::abs(resp[i]) * scale;
    }
    if (mode == 2) {
        acc.resize(grid.size());
        for (std::size_t i = 0; i < cacc.size(); ++i) acc[i] = std::abs(cacc[i]);
    }
    map.values = std::move(acc);
    return map;
}

struct Peak {
    int i = 0;
    int j = 0;
    Vec2 position;
    double value = 0.0;
};

// Local maxima (value >= all 8 neighbours, strictly above at least one),
// strongest first, greedily thinned so no two are closer than min_separation.
inline std::vector<Peak> find_peaks(const IndicatorMap& map, std::size_t count, double min_separation) {
    const ImagingGrid& g = map.grid;
    std::vector<Peak> candidates;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double v = map.at(i, j);
            bool is_max = true;
            bool above_one = false;
            for (int dj = -1; dj <= 1 && is_max; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= g.nx() || jj >= g.ny()) continue;
                    const double w = map.at(ii, jj);
                    if (w > v) {
                        is_max = false;
                        break;
                    }
                    if (w < v) above_one = true;
                }
            }
            if (is_max && above_one) candidates.push_back({i, j, g.point(i, j), v});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Peak& a, const Peak& b) { return a.value > b.value; });
    std::vector<Peak> out;
    for (const auto& c : candidates) {
        if (out.size() >= count) break;
        bool far = true;
        for (const auto& o : out)
            if (norm(c.position - o.position) < min_separation) far = false;
        if (far) out.push_back(c);
    }
    return out;
}

// RMS of a/max(a) - b/max(b) over all grid points; with both maps scaled to
// unit peak this is the error relative to the peak height.
inline double normalized_rms_gap(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw ArgumentError("normalized_rms_gap: size mismatch");
    const double ma = *std::max_element(a.begin(), a.end());
    const double mb = *std::max_element(b.begin(), b.end());
    if (!(ma > 0.0) || !(mb > 0.0)) throw ArgumentError("normalized_rms_gap: zero map");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] / ma - b[i] / mb;
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(a.size()));
}

// ||a/max(a) - b/max(b)|| / ||b/max(b)||, the stricter energy-relative gap.
inline double normalized_relative_l2_gap(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw ArgumentError("normalized_relative_l2_gap: size mismatch");
    const double ma = *std::max_element(a.begin(), a.end());
    const double mb = *std::max_element(b.begin(), b.end());
    if (!(ma > 0.0) || !(mb > 0.0)) throw ArgumentError("normalized_relative_l2_gap: zero map");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] / ma - b[i] / mb;
        num += d * d;
        den += (b[i] / mb) * (b[i] / mb);
    }
    return std::sqrt(num / den);
}

}  // namespace osm
