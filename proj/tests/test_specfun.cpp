#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <thread>
#include <vector>

#include "oracles/bessel_oracle.hpp"
#include "osm/specfun.hpp"

using namespace osm;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(BesselJ, ValuesAtZero) {
    EXPECT_EQ(bessel_j(0, 0.0), 1.0);
    EXPECT_EQ(bessel_j(2, 0.0), 0.0);
    EXPECT_EQ(bessel_j(17, 0.0), 0.0);
}

TEST(BesselJ, FirstZeroOfJ0) {
    EXPECT_LT(std::abs(bessel_j(0, 2.404825557695773)), 1e-12);
}

TEST(BesselJ, MatchesPowerSeriesForModerateArguments) {
    for (int n : {0, 1, 2, 3, 5, 10, 20}) {
        for (double x : {1e-6, 0.01, 0.3, 1.0, 2.5, 5.0, 9.7, 14.0}) {
            const double ref = static_cast<double>(oracle::bessel_j_series(n, x));
            const double got = bessel_j(n, x);
            EXPECT_LE(std::abs(got - ref), 1e-13 + 1e-11 * std::abs(ref)) << "n=" << n << " x=" << x;
        }
    }
}

TEST(BesselJ, MatchesBoostOverWideRange) {
    for (int n : {0, 1, 2, 7, 30, 100, 500}) {
        for (double x : {0.5, 3.0, 24.9, 25.0, 60.0, 95.0, 250.0, 700.0, 1000.0}) {
            const double ref = oracle::bessel_j(n, x);
            const double got = bessel_j(n, x);
            // ten significant digits, with an absolute floor near zeros
            EXPECT_LE(std::abs(got - ref), 1e-10 * std::max(std::abs(ref), 1.0 / std::sqrt(x)))
                << "n=" << n << " x=" << x;
        }
    }
}

TEST(BesselJ, LargeOrdersUnderflowGracefully) {
    const auto seq = bessel_j_sequence(100000, 10.0);
    EXPECT_EQ(seq.size(), 100001u);
    EXPECT_EQ(seq[100000], 0.0);
    EXPECT_NEAR(seq[0], oracle::bessel_j(0, 10.0), 1e-14);
    EXPECT_LE(rel_err(seq[40], oracle::bessel_j(40, 10.0)), 1e-10);
    for (double v : seq) EXPECT_TRUE(std::isfinite(v));
}

TEST(BesselJ, NegativeArgumentParity) {
    for (int n : {0, 1, 2, 3}) EXPECT_NEAR(bessel_j(n, -4.2), (n % 2 ? -1.0 : 1.0) * bessel_j(n, 4.2), 1e-15);
}

TEST(BesselJ, OrderBeyondLimitIsRejected) {
    EXPECT_THROW(bessel_j(kMaxBesselOrder + 1, 1.0), ArgumentError);
    EXPECT_THROW(bessel_j(-1, 1.0), ArgumentError);
    EXPECT_THROW(bessel_j(0, std::nan("")), DomainError);
}

TEST(BesselJ, JacobiAngerPartialSums) {
    for (double x : {0.5, 7.0, 33.0, 100.0}) {
        const int Q = static_cast<int>(x) + 40;
        const auto j = bessel_j_sequence(Q, x);
        for (double phi = -3.0; phi <= 3.0; phi += 0.37) {
            std::complex<double> s = j[0];
            std::complex<double> iq{1.0, 0.0};
            for (int q = 1; q <= Q; ++q) {
                iq *= std::complex<double>{0.0, 1.0};
                s += 2.0 * iq * j[q] * std::cos(q * phi);
            }
            const std::complex<double> exact{std::cos(x * std::cos(phi)), std::sin(x * std::cos(phi))};
            EXPECT_LT(std::abs(s - exact), 1e-10) << "x=" << x << " phi=" << phi;
        }
    }
}

TEST(Hankel, Y0Y1MatchAscendingSeries) {
    for (double x : {1e-6, 1e-3, 0.1, 1.0, 3.0, 7.5, 12.0}) {
        const double y0 = static_cast<double>(oracle::bessel_y0_series(x));
        const double y1 = static_cast<double>(oracle::bessel_y1_series(x));
        EXPECT_LE(rel_err(hankel1(0, x).imag(), y0), 1e-10) << x;
        EXPECT_LE(rel_err(hankel1(1, x).imag(), y1), 1e-10) << x;
    }
}

TEST(Hankel, MatchesBoostAcrossThreshold) {
    for (double x : {1e-6, 0.02, 1.0, 4.0, 8.0, 15.0, 24.0, 24.999, 25.0, 25.001, 40.0, 100.0, 333.0, 1000.0}) {
        for (int n : {0, 1}) {
            const auto ref = oracle::hankel1(n, x);
            const auto got = hankel1(n, x);
            EXPECT_LE(std::abs(got - ref), 1e-10 * std::abs(ref)) << "n=" << n << " x=" << x;
        }
    }
}

TEST(Hankel, RealPartIsBesselJ) {
    EXPECT_NEAR(hankel1(0, 1.0).real(), bessel_j(0, 1.0), 1e-15);
    EXPECT_NEAR(hankel1(1, 1.0).real(), bessel_j(1, 1.0), 1e-15);
}

TEST(Hankel, LargeArgumentLeadingTerm) {
    for (double x : {50.0, 200.0, 1000.0}) {
        const std::complex<double> lead =
            std::sqrt(2.0 / (std::numbers::pi * x)) * std::exp(std::complex<double>{0.0, x - std::numbers::pi / 4});
        EXPECT_LT(std::abs(hankel1(0, x) - lead) / std::abs(lead), 1.0 / x);
    }
}

TEST(Hankel, DomainAndOrderErrors) {
    EXPECT_THROW(hankel1(0, 0.0), DomainError);
    EXPECT_THROW(hankel1(1, -1.0), DomainError);
    EXPECT_THROW(hankel1(2, 1.0), ArgumentError);
}

TEST(BesselY, Wronskian) {
    for (int q : {0, 1, 5, 20, 50}) {
        for (double x : {0.1, 1.0, 10.0, 60.0, 200.0, 500.0}) {
            if (q > 5 && x < 1.0) continue;  // Y_q overflows the comparison scale
            const double w = bessel_j(q, x) * bessel_y(q + 1, x) - bessel_j(q + 1, x) * bessel_y(q, x);
            const double ref = -2.0 / (std::numbers::pi * x);
            EXPECT_LE(std::abs(w - ref), 1e-10 * std::max(1.0, std::abs(ref))) << "q=" << q << " x=" << x;
        }
    }
}

TEST(BesselY, MatchesBoost) {
    for (int n : {0, 1, 2, 10, 40}) {
        for (double x : {0.7, 5.0, 30.0, 120.0}) {
            const double ref = oracle::bessel_y(n, x);
            EXPECT_LE(rel_err(bessel_y(n, x), ref), 1e-10) << "n=" << n << " x=" << x;
        }
    }
}

TEST(Green, SymmetricAndSingular) {
    const Vec2 a{0.1, -0.2}, b{-0.3, 0.45};
    EXPECT_EQ(green(100.0, a, b), green(100.0, b, a));
    EXPECT_THROW(green(100.0, a, a), SingularityError);
    EXPECT_THROW(grad_green(100.0, a, a), SingularityError);
    EXPECT_THROW(green_mixed_hessian(100.0, a, a), SingularityError);
}

TEST(Green, UnitArgumentMatchesOracle) {
    const double k = 7.0;
    const Vec2 x{0.2, 0.1};
    const Vec2 y = x + polar(1.0 / k, 0.9);
    const auto ref = std::complex<double>{0.0, -0.25} * oracle::hankel1(0, 1.0);
    EXPECT_LT(std::abs(green(k, x, y) - ref), 1e-10 * std::abs(ref));
}

TEST(Green, FarFieldAt16GHz) {
    const double k = 2.0 * std::numbers::pi * 16e9 * std::sqrt(8.854e-12 * 4.0 * std::numbers::pi * 1e-7);
    const double d = 0.76;
    const std::complex<double> asym = std::complex<double>{0.0, -0.25} * std::sqrt(2.0 / (std::numbers::pi * k * d)) *
                                      std::exp(std::complex<double>{0.0, k * d - std::numbers::pi / 4});
    const auto g = green(k, {0.0, 0.0}, {d, 0.0});
    EXPECT_LT(std::abs(g - asym) / std::abs(asym), 5e-3);
}

TEST(GradGreen, MatchesCentralDifferences) {
    const double h = 1e-7;
    for (double k : {40.0, 167.0, 335.0}) {
        const Vec2 x{0.72, 0.0};
        for (Vec2 r : {Vec2{0.0, 0.0}, Vec2{0.05, -0.07}, Vec2{-0.09, 0.08}}) {
            const CVec2 g = grad_green(k, x, r);
            const auto dx = (green(k, x, r + Vec2{h, 0}) - green(k, x, r - Vec2{h, 0})) / (2 * h);
            const auto dy = (green(k, x, r + Vec2{0, h}) - green(k, x, r - Vec2{0, h})) / (2 * h);
            const double scale = std::abs(g.x) + std::abs(g.y);
            EXPECT_LT(std::abs(g.x - dx), 1e-5 * scale);
            EXPECT_LT(std::abs(g.y - dy), 1e-5 * scale);
        }
    }
}

TEST(GradGreen, FarFieldPlaneWave) {
    // grad_r G(x, r) ~ (ik/4) sqrt(2/(pi k d)) e^{i(kd - 3pi/4)} (r - x)/d
    const double k = 300.0;
    const Vec2 x = polar(0.76, 1.1);
    const Vec2 r{0.01, -0.02};
    const Vec2 diff = r - x;
    const double d = norm(diff);
    const std::complex<double> amp = std::complex<double>{0.0, k / 4} * std::sqrt(2.0 / (std::numbers::pi * k * d)) *
                                     std::exp(std::complex<double>{0.0, k * d - 3 * std::numbers::pi / 4});
    const CVec2 g = grad_green(k, x, r);
    EXPECT_LT(std::abs(g.x - amp * (diff.x / d)), 1e-2 * std::abs(amp));
    EXPECT_LT(std::abs(g.y - amp * (diff.y / d)), 1e-2 * std::abs(amp));
}

TEST(GradGreen, RotationEquivariance) {
    const double k = 120.0, beta = 0.7;
    const Vec2 x{0.6, 0.3}, r{-0.04, 0.02};
    const CVec2 g = grad_green(k, x, r);
    const CVec2 gr = grad_green(k, rotate(x, beta), rotate(r, beta));
    const double c = std::cos(beta), s = std::sin(beta);
    EXPECT_LT(std::abs(gr.x - (c * g.x - s * g.y)), 1e-12 * std::abs(g.x));
    EXPECT_LT(std::abs(gr.y - (s * g.x + c * g.y)), 1e-12 * std::abs(g.x));
}

TEST(MixedHessian, MatchesFiniteDifferenceOfGradient) {
    // d/dx_i d/dy_j G(x, y): differentiate grad_y G(x, y) with respect to x.
    const double k = 150.0, h = 1e-7;
    const Vec2 x{0.03, -0.01}, y{-0.02, 0.04};
    const auto P = green_mixed_hessian(k, x, y);
    const CVec2 gxp = grad_green(k, x + Vec2{h, 0}, y), gxm = grad_green(k, x - Vec2{h, 0}, y);
    const CVec2 gyp = grad_green(k, x + Vec2{0, h}, y), gym = grad_green(k, x - Vec2{0, h}, y);
    const std::complex<double> fd[4] = {(gxp.x - gxm.x) / (2 * h), (gxp.y - gxm.y) / (2 * h),
                                        (gyp.x - gym.x) / (2 * h), (gyp.y - gym.y) / (2 * h)};
    double scale = 0;
    for (const auto& v : P) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < 4; ++i) EXPECT_LT(std::abs(P[i] - fd[i]), 1e-5 * scale) << i;
}

TEST(Specfun, ConcurrentCallsAgree) {
    std::vector<double> serial(64), threaded(64);
    for (int i = 0; i < 64; ++i) serial[i] = bessel_j(i % 7, 0.3 * i);
    std::vector<std::thread> pool;
    for (int t = 0; t < 4; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < 64; i += 4) threaded[i] = bessel_j(i % 7, 0.3 * i);
        });
    for (auto& th : pool) th.join();
    EXPECT_EQ(serial, threaded);
}
