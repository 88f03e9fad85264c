#pragma once

// Integer-order Bessel functions, Hankel functions of the first kind of
// orders 0 and 1, and the two-dimensional Helmholtz Green's function.
//
// J_n is computed by Miller's backward recurrence normalised with
// J_0 + 2 * sum_k J_2k = 1. Y_0 and Y_1 come from their Neumann series in the
// same J_n for x < kAsymptoticThreshold and from Hankel's asymptotic
// expansion above it. Forward recurrence is only used for Y_n, where it is
// the stable direction.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "osm/error.hpp"

namespace osm {

using Complex = std::complex<double>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) noexcept { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) noexcept { x -= o.x; y -= o.y; return *this; }
    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) noexcept = default;
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }
inline Vec2 polar(double radius, double angle) noexcept {
    return {radius * std::cos(angle), radius * std::sin(angle)};
}
inline Vec2 rotate(Vec2 a, double angle) noexcept {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

// Complex 2-vector (field gradients).
struct CVec2 {
    Complex x;
    Complex y;
};

// Bilinear (unconjugated) product.
inline Complex dot(const CVec2& a, const CVec2& b) noexcept { return a.x * b.x + a.y * b.y; }
inline Complex dot(Vec2 a, const CVec2& b) noexcept { return a.x * b.x + a.y * b.y; }

inline constexpr int kMaxBesselOrder = 200000;
inline constexpr double kAsymptoticThreshold = 25.0;
inline constexpr double kEulerGamma = 0.5772156649015329;

namespace detail {

inline void check_order(int order) {
    if (order < 0 || order > kMaxBesselOrder)
        throw ArgumentError("Bessel order " + std::to_string(order) + " outside [0, " +
                            std::to_string(kMaxBesselOrder) + "]");
}

// Start order for Miller's recurrence: far enough beyond both the largest
// requested order and the turning point q = x that the seed error is below
// double precision.
inline int miller_start(int max_order, double ax) {
    const double top = std::max(static_cast<double>(max_order), ax);
    int start = static_cast<int>(top + 30.0 + 2.0 * std::sqrt(40.0 * top));
    return start + (start & 1);
}

// Hankel's expansion H_nu(x) ~ sqrt(2/(pi x)) e^{i w} sum_k i^k a_k(nu) / x^k,
// truncated at the smallest term.
inline Complex hankel1_asymptotic(int order, double x) {
    const double mu = 4.0 * order * order;
    Complex sum{1.0, 0.0};
    Complex term{1.0, 0.0};
    double prev = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= Complex{0.0, (mu - odd * odd) / (8.0 * k * x)};
        const double mag = std::abs(term);
        if (mag > prev) break;
        sum += term;
        if (mag < 1e-17 * std::abs(sum)) break;
        prev = mag;
    }
    const double phase = x - (0.5 * order + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * Complex{std::cos(phase), std::sin(phase)} * sum;
}

}  // namespace detail

// J_0(x) .. J_max_order(x). Orders whose value underflows come back as 0.
inline std::vector<double> bessel_j_sequence(int max_order, double x) {
    detail::check_order(max_order);
    if (!std::isfinite(x)) throw DomainError("bessel_j: non-finite argument");
    std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double ax = std::abs(x);
    const int start = detail::miller_start(max_order, ax);
    constexpr double kBig = 1e250;
    constexpr double kShrink = 1e-250;

    // scale_tag[n] records how many rescalings had happened when out[n] was
    // stored; entries are brought to the final scale at the end.
    std::vector<int> scale_tag(out.size(), 0);
    int scales = 0;
    double next = 0.0;        // b_{n+1}
    double cur = 1e-300;      // b_n
    double norm_sum = 0.0;    // b_0 + 2 sum b_2k, in the current scale
    for (int n = start; n >= 1; --n) {
        if (n <= max_order) {
            out[n] = cur;
            scale_tag[n] = scales;
        }
        if ((n & 1) == 0) norm_sum += 2.0 * cur;
        const double prev = (2.0 * n / ax) * cur - next;
        next = cur;
        cur = prev;
        if (std::abs(cur) > kBig) {
            cur *= kShrink;
            next *= kShrink;
            norm_sum *= kShrink;
            ++scales;
        }
    }
    out[0] = cur;
    scale_tag[0] = scales;
    norm_sum += cur;

    for (std::size_t n = 0; n < out.size(); ++n) {
        const int lag = scales - scale_tag[n];
        double v = out[n] / norm_sum;
        for (int s = 0; s < lag && v != 0.0; ++s) v *= kShrink;
        out[n] = (x < 0.0 && (n & 1)) ? -v : v;
    }
    return out;
}

inline double bessel_j(int order, double x) {
    detail::check_order(order);
    if (!std::isfinite(x)) throw DomainError("bessel_j: non-finite argument");
    const double ax = std::abs(x);
    if (order <= 1 && ax >= kAsymptoticThreshold) {
        const double v = detail::hankel1_asymptotic(order, ax).real();
        return (x < 0.0 && order == 1) ? -v : v;
    }
    return bessel_j_sequence(order, x)[static_cast<std::size_t>(order)];
}

namespace detail {

// {J_0 + iY_0, J_1 + iY_1} for 0 < x < kAsymptoticThreshold via the Neumann
// series of Y_0 and Y_1 in terms of J_n.
inline std::pair<Complex, Complex> hankel01_series(double x) {
    const int top = static_cast<int>(x) + 40;
    const std::vector<double> j = bessel_j_sequence(top + (top & 1) + 1, x);
    const double log_term = std::log(0.5 * x) + kEulerGamma;
    double s0 = 0.0;
    double s1 = 0.0;
    for (int k = 1; 2 * k + 1 < static_cast<int>(j.size()); ++k) {
        const double sign = (k & 1) ? -1.0 : 1.0;
        s0 += sign * j[2 * k] / k;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k;
    }
    const double y0 = (2.0 / std::numbers::pi) * (log_term * j[0] - 2.0 * s0);
    const double y1 = (2.0 / std::numbers::pi) * (-j[0] / x + log_term * j[1] + s1);
    return {Complex{j[0], y0}, Complex{j[1], y1}};
}

}  // namespace detail

// H^(1)_order(x) for order 0 or 1 and x > 0.
inline Complex hankel1(int order, double x) {
    if (order != 0 && order != 1)
        throw ArgumentError("hankel1: only orders 0 and 1 are supported");
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("hankel1: argument must be positive and finite");
    if (x >= kAsymptoticThreshold) return detail::hankel1_asymptotic(order, x);
    const auto [h0, h1] = detail::hankel01_series(x);
    return order == 0 ? h0 : h1;
}

// Y_order(x), x > 0, by forward recurrence from Y_0 and Y_1.
inline double bessel_y(int order, double x) {
    detail::check_order(order);
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("bessel_y: argument must be positive and finite");
    double ym = hankel1(0, x).imag();
    if (order == 0) return ym;
    double y = hankel1(1, x).imag();
    for (int n = 1; n < order; ++n) {
        const double yp = (2.0 * n / x) * y - ym;
        ym = y;
        y = yp;
    }
    return y;
}

// G(x, y) = -(i/4) H0(k|x - y|).
inline Complex green(double k, Vec2 x, Vec2 y) {
    const double d = norm(x - y);
    if (d == 0.0) throw SingularityError("green: coincident points");
    return Complex{0.0, -0.25} * hankel1(0, k * d);
}

// Gradient of G(x, r) with respect to r: (ik/4) H1(k|x - r|) (r - x)/|r - x|.
inline CVec2 grad_green(double k, Vec2 x, Vec2 r) {
    const Vec2 diff = r - x;
    const double d = norm(diff);
    if (d == 0.0) throw SingularityError("grad_green: coincident points");
    const Complex s = Complex{0.0, 0.25 * k} * hankel1(1, k * d) / d;
    return {s * diff.x, s * diff.y};
}

// Dipole-to-field propagator: d/dx_i d/dy_j G(x, y), returned row-major
// [xx, xy, yx, yy]. Equals minus the Hessian of G in x - y.
inline std::array<Complex, 4> green_mixed_hessian(double k, Vec2 x, Vec2 y) {
    const Vec2 rho = x - y;
    const double d = norm(rho);
    if (d == 0.0) throw SingularityError("green_mixed_hessian: coincident points");
    const double z = k * d;
    Complex h0, h1;
    if (z >= kAsymptoticThreshold) {
        h0 = detail::hankel1_asymptotic(0, z);
        h1 = detail::hankel1_asymptotic(1, z);
    } else {
        std::tie(h0, h1) = detail::hankel01_series(z);
    }
    const Complex pref{0.0, 0.25 * k * k};
    const Complex radial = pref * (h0 - h1 / z);
    const Complex transverse = pref * (h1 / z);
    const double ux = rho.x / d, uy = rho.y / d;
    const Complex xx = radial * (ux * ux) + transverse * (1.0 - ux * ux);
    const Complex xy = (radial - transverse) * (ux * uy);
    const Complex yy = radial * (uy * uy) + transverse * (1.0 - uy * uy);
    return {-xx, -xy, -xy, -yy};
}

}  // namespace osm
