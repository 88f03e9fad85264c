#pragma once

// Bistatic circular array (emitters on radius A, a 4pi/3 receiver arc on
// radius B per emitter) and rectangular imaging grids.

#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "osm/error.hpp"
#include "osm/specfun.hpp"

namespace osm {

inline constexpr double kVacuumPermittivity = 8.854e-12;                 // F/m
inline constexpr double kVacuumPermeability = 4.0 * std::numbers::pi * 1e-7;  // H/m

struct MediumParams {
    double frequency = 0.0;                      // Hz
    double permittivity = kVacuumPermittivity;   // F/m
    double permeability = kVacuumPermeability;   // H/m
    double conductivity = 0.0;                   // S/m, carried as metadata only

    // k = 2 pi f sqrt(eps mu)
    double wavenumber() const noexcept {
        return 2.0 * std::numbers::pi * frequency * std::sqrt(permittivity * permeability);
    }

    static MediumParams at_frequency(double frequency_hz) {
        if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz))
            throw ArgumentError("frequency must be positive");
        MediumParams p;
        p.frequency = frequency_hz;
        return p;
    }
};

// Emitter m (0-based here) sits at angle 2 m pi / M on radius A. Receiver n of
// emitter m sits at angle theta_m + pi/3 + 4 n pi / (3 (N - 1)) on radius B.
class ArrayGeometry {
public:
    ArrayGeometry(int emitters, int receivers, double emitter_radius, double receiver_radius)
        : M_(emitters), N_(receivers), A_(emitter_radius), B_(receiver_radius) {
        if (M_ < 1) throw ArgumentError("fresnel_geometry: need at least one emitter");
        if (N_ < 2) throw ArgumentError("fresnel_geometry: need at least two receivers per emitter");
        if (!(A_ > 0.0) || !(B_ > 0.0))
            throw ArgumentError("fresnel_geometry: radii must be positive");

        emitter_angles_.resize(static_cast<std::size_t>(M_));
        emitter_points_.resize(static_cast<std::size_t>(M_));
        receiver_angles_.resize(static_cast<std::size_t>(M_) * N_);
        receiver_points_.resize(receiver_angles_.size());
        receiver_site_.resize(receiver_angles_.size());

        // Receiver arcs of different emitters overlap; identical positions
        // share one site so per-point kernels evaluate each once.
        std::map<std::pair<long long, long long>, std::size_t> site_lookup;
        constexpr double kSiteQuantum = 1e-9;
        for (int m = 0; m < M_; ++m) {
            const double vt = 2.0 * m * std::numbers::pi / M_;
            emitter_angles_[m] = vt;
            emitter_points_[m] = polar(A_, vt);
            for (int n = 0; n < N_; ++n) {
                const double th = vt + std::numbers::pi / 3.0 + 4.0 * n * std::numbers::pi / (3.0 * (N_ - 1));
                const std::size_t idx = flat(m, n);
                receiver_angles_[idx] = th;
                receiver_points_[idx] = polar(B_, th);
                const auto key = std::make_pair(std::llround(receiver_points_[idx].x / kSiteQuantum),
                                                std::llround(receiver_points_[idx].y / kSiteQuantum));
                auto [it, inserted] = site_lookup.emplace(key, receiver_sites_.size());
                if (inserted) receiver_sites_.push_back(receiver_points_[idx]);
                receiver_site_[idx] = it->second;
            }
        }
    }

    int emitters() const noexcept { return M_; }
    int receivers() const noexcept { return N_; }
    double emitter_radius() const noexcept { return A_; }
    double receiver_radius() const noexcept { return B_; }

    // Indices are 0-based: m in [0, M), n in [0, N).
    double emitter_angle(int m) const { return emitter_angles_.at(static_cast<std::size_t>(m)); }
    Vec2 emitter_point(int m) const { return emitter_points_.at(static_cast<std::size_t>(m)); }
    double receiver_angle(int m, int n) const { return receiver_angles_.at(checked(m, n)); }
    Vec2 receiver_point(int m, int n) const { return receiver_points_.at(checked(m, n)); }

    const std::vector<Vec2>& emitter_points() const noexcept { return emitter_points_; }
    const std::vector<double>& emitter_angles() const noexcept { return emitter_angles_; }

    // Distinct receiver positions and the site index of each (m, n).
    const std::vector<Vec2>& receiver_sites() const noexcept { return receiver_sites_; }
    std::size_t receiver_site(int m, int n) const { return receiver_site_.at(checked(m, n)); }

    std::size_t flat(int m, int n) const noexcept {
        return static_cast<std::size_t>(m) * static_cast<std::size_t>(N_) + static_cast<std::size_t>(n);
    }

private:
    std::size_t checked(int m, int n) const {
        if (m < 0 || m >= M_ || n < 0 || n >= N_) throw ArgumentError("antenna index out of range");
        return flat(m, n);
    }

    int M_;
    int N_;
    double A_;
    double B_;
    std::vector<double> emitter_angles_;
    std::vector<Vec2> emitter_points_;
    std::vector<double> receiver_angles_;
    std::vector<Vec2> receiver_points_;
    std::vector<Vec2> receiver_sites_;
    std::vector<std::size_t> receiver_site_;
};

inline ArrayGeometry fresnel_geometry(int emitters, int receivers, double emitter_radius,
                                      double receiver_radius) {
    return ArrayGeometry(emitters, receivers, emitter_radius, receiver_radius);
}

// The configuration of the Institut Fresnel 2D database: 36 emitters every 10
// degrees, 49 receivers every 5 degrees from 60 to 300 degrees off the emitter.
inline ArrayGeometry default_fresnel_geometry() { return fresnel_geometry(36, 49, 0.72, 0.76); }

// Uniform row-major lattice; point (i, j) has x index i and y index j, stored
// at j * nx + i.
class ImagingGrid {
public:
    ImagingGrid(double x_min, double x_max, double y_min, double y_max, int nx, int ny)
        : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), nx_(nx), ny_(ny) {
        if (!(x_min < x_max) || !(y_min < y_max) || !std::isfinite(x_min) || !std::isfinite(x_max) ||
            !std::isfinite(y_min) || !std::isfinite(y_max))
            throw ArgumentError("make_grid: degenerate or unordered bounds");
        if (nx < 2 || ny < 2) throw ArgumentError("make_grid: need at least 2 points per axis");
        dx_ = (x_max - x_min) / (nx - 1);
        dy_ = (y_max - y_min) / (ny - 1);
    }

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    double y_min() const noexcept { return y_min_; }
    double y_max() const noexcept { return y_max_; }
    double dx() const noexcept { return dx_; }
    double dy() const noexcept { return dy_; }

    double x(int i) const noexcept { return i == nx_ - 1 ? x_max_ : x_min_ + i * dx_; }
    double y(int j) const noexcept { return j == ny_ - 1 ? y_max_ : y_min_ + j * dy_; }
    Vec2 point(int i, int j) const noexcept { return {x(i), y(j)}; }
    Vec2 point(std::size_t flat_index) const noexcept {
        return point(static_cast<int>(flat_index % static_cast<std::size_t>(nx_)),
                     static_cast<int>(flat_index / static_cast<std::size_t>(nx_)));
    }
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
    }

    // Largest |r| over the grid (attained at a corner).
    double max_radius() const noexcept {
        return std::hypot(std::max(std::abs(x_min_), std::abs(x_max_)),
                          std::max(std::abs(y_min_), std::abs(y_max_)));
    }

    // Nearest lattice point to p (clamped to the grid).
    std::pair<int, int> nearest(Vec2 p) const noexcept {
        auto clampi = [](long v, int hi) { return static_cast<int>(v < 0 ? 0 : (v > hi ? hi : v)); };
        return {clampi(std::lround((p.x - x_min_) / dx_), nx_ - 1),
                clampi(std::lround((p.y - y_min_) / dy_), ny_ - 1)};
    }

private:
    double x_min_, x_max_, y_min_, y_max_;
    int nx_, ny_;
    double dx_ = 0.0, dy_ = 0.0;
};

inline ImagingGrid make_grid(double x_min, double x_max, double y_min, double y_max, int nx, int ny) {
    return ImagingGrid(x_min, x_max, y_min, y_max, nx, ny);
}

// The grid must lie strictly inside both antenna circles.
inline void require_grid_inside(const ImagingGrid& grid, const ArrayGeometry& geom) {
    const double limit = std::min(geom.emitter_radius(), geom.receiver_radius());
    if (!(grid.max_radius() < limit))
        throw ArgumentError("imaging grid extends outside the antenna circles (max |r| = " +
                            std::to_string(grid.max_radius()) + " m)");
}

inline ImagingGrid make_grid(double x_min, double x_max, double y_min, double y_max, int nx, int ny,
                             const ArrayGeometry& geom) {
    ImagingGrid g(x_min, x_max, y_min, y_max, nx, ny);
    require_grid_inside(g, geom);
    return g;
}

// (-0.1 m, 0.1 m)^2 at 1 mm spacing.
inline ImagingGrid default_grid() { return ImagingGrid(-0.1, 0.1, -0.1, 0.1, 201, 201); }

}  // namespace osm
