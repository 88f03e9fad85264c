#pragma once

// Synthetic scattered-field data for small permeable disks.
//
// born_scattered evaluates the leading term of the small-obstacle expansion
//   u_scat(b, a) = sum_s alpha_s^2 pi mu0/(mu_s + mu0) grad G(b, r_s) . grad G(a, r_s).
// foldy_lax_scattered closes the same dipole model self-consistently: each
// disk carries a moment p_s = tau_s [grad u_inc(r_s) + sum_{t != s} P(r_s, r_t) p_t]
// with P the mixed second derivative of G, and reduces to the Born term for
// a single disk.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "osm/detail/parallel.hpp"
#include "osm/error.hpp"
#include "osm/geometry.hpp"
#include "osm/specfun.hpp"

namespace osm {

struct SmallObject {
    Vec2 center;              // m
    double radius = 0.0;      // m
    double permeability = 0;  // H/m
};

// tau_s = alpha^2 pi mu0 / (mu_s + mu0)
inline double polarizability(const SmallObject& obj, double background_permeability) {
    return obj.radius * obj.radius * std::numbers::pi * background_permeability /
           (obj.permeability + background_permeability);
}

inline void validate_objects(std::span<const SmallObject> objects, const ArrayGeometry& geom) {
    const double limit = std::min(geom.emitter_radius(), geom.receiver_radius());
    for (std::size_t s = 0; s < objects.size(); ++s) {
        const auto& o = objects[s];
        if (!(o.radius > 0.0) || !std::isfinite(o.radius))
            throw ArgumentError("object " + std::to_string(s + 1) + ": radius must be positive");
        if (!(o.permeability > 0.0) || !std::isfinite(o.permeability))
            throw ArgumentError("object " + std::to_string(s + 1) + ": permeability must be positive");
        if (!(norm(o.center) < limit))
            throw ArgumentError("object " + std::to_string(s + 1) + " lies outside the antenna circles");
        for (std::size_t t = 0; t < s; ++t) {
            if (!(norm(o.center - objects[t].center) > o.radius + objects[t].radius))
                throw ArgumentError("objects " + std::to_string(t + 1) + " and " + std::to_string(s + 1) +
                                    " overlap");
        }
    }
}

// M x N complex matrix of u_scat(b_{m,n}, a_m) at one frequency. Cells may be
// flagged missing (value NaN); indicator sums skip them.
class ScatterDataset {
public:
    ScatterDataset(double frequency_hz, std::shared_ptr<const ArrayGeometry> geometry)
        : frequency_(frequency_hz), geometry_(std::move(geometry)) {
        if (!geometry_) throw ArgumentError("ScatterDataset: null geometry");
        if (!(frequency_hz > 0.0)) throw ArgumentError("ScatterDataset: frequency must be positive");
        const std::size_t n = static_cast<std::size_t>(geometry_->emitters()) * geometry_->receivers();
        values_.assign(n, Complex{0.0, 0.0});
        present_.assign(n, 1);
    }

    double frequency() const noexcept { return frequency_; }
    const ArrayGeometry& geometry() const noexcept { return *geometry_; }
    const std::shared_ptr<const ArrayGeometry>& geometry_ptr() const noexcept { return geometry_; }
    int emitters() const noexcept { return geometry_->emitters(); }
    int receivers() const noexcept { return geometry_->receivers(); }

    Complex operator()(int m, int n) const { return values_[index(m, n)]; }
    bool present(int m, int n) const { return present_[index(m, n)] != 0; }

    void set(int m, int n, Complex v) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ArgumentError("ScatterDataset: entries must be finite");
        const auto i = index(m, n);
        values_[i] = v;
        present_[i] = 1;
    }
    void set_missing(int m, int n) {
        const auto i = index(m, n);
        values_[i] = Complex{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
        present_[i] = 0;
    }

    std::span<const Complex> values() const noexcept { return values_; }
    std::span<const unsigned char> mask() const noexcept { return present_; }
    std::size_t missing_count() const noexcept {
        std::size_t c = 0;
        for (auto p : present_) c += p == 0;
        return c;
    }

    // Multiplies every present entry by c.
    ScatterDataset scaled(Complex c) const {
        ScatterDataset out = *this;
        for (std::size_t i = 0; i < out.values_.size(); ++i)
            if (out.present_[i]) out.values_[i] *= c;
        return out;
    }

    // Provenance carried into the interchange format.
    std::optional<std::uint64_t> seed;
    double noise_db = std::numeric_limits<double>::infinity();

private:
    std::size_t index(int m, int n) const {
        if (m < 0 || m >= emitters() || n < 0 || n >= receivers())
            throw ArgumentError("ScatterDataset: index (" + std::to_string(m) + ", " + std::to_string(n) +
                                ") out of range");
        return geometry_->flat(m, n);
    }

    double frequency_;
    std::shared_ptr<const ArrayGeometry> geometry_;
    std::vector<Complex> values_;
    std::vector<unsigned char> present_;
};

struct ForwardOptions {
    unsigned threads = 1;
};

inline ScatterDataset born_scattered(std::span<const SmallObject> objects, const MediumParams& medium,
                                     std::shared_ptr<const ArrayGeometry> geom, ForwardOptions opts = {}) {
    validate_objects(objects, *geom);
    const double k = medium.wavenumber();
    ScatterDataset ds(medium.frequency, geom);
    const int M = geom->emitters(), N = geom->receivers();
    std::vector<Complex> rows(static_cast<std::size_t>(M) * N);
    detail::parallel_for(static_cast<std::size_t>(M), opts.threads, [&](std::size_t mi) {
        const int m = static_cast<int>(mi);
        for (const auto& obj : objects) {
            const double tau = polarizability(obj, medium.permeability);
            const CVec2 ga = grad_green(k, geom->emitter_point(m), obj.center);
            for (int n = 0; n < N; ++n) {
                const CVec2 gb = grad_green(k, geom->receiver_point(m, n), obj.center);
                rows[geom->flat(m, n)] += tau * dot(gb, ga);
            }
        }
    });
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) ds.set(m, n, rows[geom->flat(m, n)]);
    return ds;
}

inline ScatterDataset born_scattered(std::span<const SmallObject> objects, const MediumParams& medium,
                                     const ArrayGeometry& geom, ForwardOptions opts = {}) {
    return born_scattered(objects, medium, std::make_shared<const ArrayGeometry>(geom), opts);
}

// Reciprocal condition number below which the dipole interaction system is
// treated as singular.
inline constexpr double kFoldyLaxMinRcond = 1e-12;

inline ScatterDataset foldy_lax_scattered(std::span<const SmallObject> objects, const MediumParams& medium,
                                          std::shared_ptr<const ArrayGeometry> geom, ForwardOptions opts = {}) {
    validate_objects(objects, *geom);
    const double k = medium.wavenumber();
    const auto S = static_cast<Eigen::Index>(objects.size());
    ScatterDataset ds(medium.frequency, geom);
    if (S == 0) return ds;

    // (I - T P) p = T g, with T = diag(tau_s) and P the off-diagonal
    // propagator blocks. The matrix does not depend on the emitter.
    Eigen::MatrixXcd system = Eigen::MatrixXcd::Identity(2 * S, 2 * S);
    std::vector<double> tau(objects.size());
    for (Eigen::Index s = 0; s < S; ++s) {
        tau[s] = polarizability(objects[s], medium.permeability);
        for (Eigen::Index t = 0; t < S; ++t) {
            if (s == t) continue;
            const auto P = green_mixed_hessian(k, objects[s].center, objects[t].center);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) system(2 * s + i, 2 * t + j) = -tau[s] * P[2 * i + j];
        }
    }
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(system);
    const double rcond = lu.rcond();
    if (!(rcond > kFoldyLaxMinRcond))
        throw Error("foldy_lax_scattered: interaction matrix is singular (rcond = " + std::to_string(rcond) +
                    "); the configuration is near a multiple-scattering resonance");

    const int M = geom->emitters(), N = geom->receivers();
    std::vector<Complex> rows(static_cast<std::size_t>(M) * N);
    detail::parallel_for(static_cast<std::size_t>(M), opts.threads, [&](std::size_t mi) {
        const int m = static_cast<int>(mi);
        Eigen::VectorXcd rhs(2 * S);
        for (Eigen::Index s = 0; s < S; ++s) {
            const CVec2 g = grad_green(k, geom->emitter_point(m), objects[s].center);
            rhs(2 * s) = tau[s] * g.x;
            rhs(2 * s + 1) = tau[s] * g.y;
        }
        const Eigen::VectorXcd p = lu.solve(rhs);
        for (int n = 0; n < N; ++n) {
            Complex acc{0.0, 0.0};
            for (Eigen::Index s = 0; s < S; ++s) {
                const CVec2 gb = grad_green(k, geom->receiver_point(m, n), objects[s].center);
                acc += gb.x * p(2 * s) + gb.y * p(2 * s + 1);
            }
            rows[geom->flat(m, n)] = acc;
        }
    });
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) ds.set(m, n, rows[geom->flat(m, n)]);
    return ds;
}

inline ScatterDataset foldy_lax_scattered(std::span<const SmallObject> objects, const MediumParams& medium,
                                          const ArrayGeometry& geom, ForwardOptions opts = {}) {
    return foldy_lax_scattered(objects, medium, std::make_shared<const ArrayGeometry>(geom), opts);
}

// Adds i.i.d. circular complex Gaussian noise whose total power over the
// present entries is (sum |u|^2) / 10^(snr_db / 10). snr_db = +inf returns
// the input unchanged. Each emitter row draws from its own engine seeded by
// (seed, m), so results do not depend on evaluation order.
inline ScatterDataset add_awgn(const ScatterDataset& ds, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0) return ds;
    if (!std::isfinite(snr_db)) throw ArgumentError("add_awgn: SNR must be finite or +inf");
    const auto values = ds.values();
    const auto mask = ds.mask();
    double power = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!mask[i]) continue;
        power += std::norm(values[i]);
        ++count;
    }
    if (count == 0 || power == 0.0)
        throw ArgumentError("add_awgn: signal power is zero, SNR is undefined");
    const double sigma = std::sqrt(power / (static_cast<double>(count) * std::pow(10.0, snr_db / 10.0)) / 2.0);

    ScatterDataset out = ds;
    for (int m = 0; m < ds.emitters(); ++m) {
        std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(m)};
        std::mt19937_64 engine(sseq);
        std::normal_distribution<double> normal(0.0, sigma);
        for (int n = 0; n < ds.receivers(); ++n) {
            const double re = normal(engine);
            const double im = normal(engine);
            if (ds.present(m, n)) out.set(m, n, ds(m, n) + Complex{re, im});
        }
    }
    out.seed = seed;
    out.noise_db = snr_db;
    return out;
}

}  // namespace osm
