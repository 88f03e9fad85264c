#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "oracles/bessel_oracle.hpp"
#include "osm/forward.hpp"
#include "osm/indicators.hpp"
#include "osm/presets.hpp"
#include "osm/theory.hpp"

using namespace osm;

namespace {

constexpr double kPi = std::numbers::pi;

// Fresnel arc for emitter direction v.
double arc_lo(double v) { return v + kPi / 3; }
double arc_hi(double v) { return v + 5 * kPi / 3; }

// Second rule for the lemma integral: adaptive 61-point Gauss-Kronrod on
// panels half the width of the starting panels of lemma_integral_quadrature.
std::complex<double> kronrod_panels(double x, double t1, double tn, double v, double p) {
    using boost::math::quadrature::gauss_kronrod;
    const int panels = 2 * std::max(4, static_cast<int>(std::ceil((x + 2.0) * (tn - t1) / kPi)));
    const double h = (tn - t1) / panels;
    double re = 0, im = 0;
    for (int i = 0; i < panels; ++i) {
        const double a = t1 + i * h, b = a + h;
        re += gauss_kronrod<double, 61>::integrate([&](double t) { return std::pow(std::cos(t - v), 2) * std::cos(x * std::cos(t - p)); }, a, b, 5);
        im += gauss_kronrod<double, 61>::integrate([&](double t) { return std::pow(std::cos(t - v), 2) * std::sin(x * std::cos(t - p)); }, a, b, 5);
    }
    return {re, im};
}

std::complex<double> osm_bracket(double x, double psi) {
    return kPeakConstant * oracle::bessel_j(0, x) - 0.5 * std::cos(2 * psi) * oracle::bessel_j(2, x) + e_osm_series(x, psi);
}

}  // namespace

TEST(Series, Table2) {
    // Q = 10^1 .. 10^9.
    const double s1[] = {3.3211, 7.8744, 12.4709, 17.0752, 21.6803, 26.2855, 30.8906, 35.4958, 40.1010};
    const double s2[] = {5.8579, 10.3748, 14.9709, 19.5752, 24.1803, 28.7855, 33.3906, 37.9958, 42.6010};
    std::int64_t Q = 10;
    for (int i = 0; i < 9; ++i, Q *= 10) {
        const auto [a, b] = series_s1_s2(Q);
        EXPECT_NEAR(a, s1[i], 1e-4) << "Q=" << Q;
        EXPECT_NEAR(b, s2[i], 1e-4) << "Q=" << Q;
    }
}

TEST(Series, DirectSumsAgainstHarmonicNumbers) {
    for (std::int64_t Q : {3, 4, 10, 57, 1000}) {
        long double h = 0;
        std::vector<long double> H(static_cast<std::size_t>(Q + 3), 0.0L);
        for (std::int64_t n = 1; n <= Q + 2; ++n) H[static_cast<std::size_t>(n)] = h += 1.0L / n;
        const auto [a, b] = series_s1_s2(Q);
        EXPECT_NEAR(a, static_cast<double>(H[Q - 2] - 1 + H[Q + 2] - 1.5L), 1e-13);
        EXPECT_NEAR(b, static_cast<double>(2 * H[Q]), 1e-13);
    }
}

TEST(Series, GapPositiveAndTendsToFiveHalves) {
    for (std::int64_t Q = 3; Q <= 3000; Q += (Q < 50 ? 1 : 37)) {
        const auto [a, b] = series_s1_s2(Q);
        EXPECT_GT(b - a, 0.0) << Q;
    }
    const auto [a, b] = series_s1_s2(1000000000);
    EXPECT_NEAR(b - a, 2.5, 1e-8);
    EXPECT_THROW(series_s1_s2(2), ArgumentError);
}

TEST(Series, AsymptoticBranchContinuous) {
    const auto below = series_s1_s2(kSeriesDirectLimit);
    const auto above = series_s1_s2(kSeriesDirectLimit + 1);
    EXPECT_NEAR(above.second - below.second, 2.0 / (kSeriesDirectLimit + 1), 1e-12);
}

TEST(Lemma, ZeroArgument) {
    // 2pi/3 - sqrt(3)/4.
    const double expected = 2 * kPi / 3 - std::sqrt(3.0) / 4;
    EXPECT_NEAR(expected, 1.6613824, 1e-7);
    for (double v : {0.0, 1.1, -2.5}) {
        EXPECT_NEAR(lemma_integral_closed(0, arc_lo(v), arc_hi(v), v, 0.4).real(), expected, 1e-14);
        EXPECT_NEAR(lemma_integral_quadrature(0, arc_lo(v), arc_hi(v), v, 0.4).real(), expected, 1e-12);
    }
}

TEST(Lemma, ClosedFormMatchesQuadrature) {
    double worst = 0;
    for (double x : {1.0, 5.0, 10.0, 50.0, 95.0})
        for (double v : {0.0, 0.7, 1.9, 3.3, 5.5})
            for (double p : {-0.3, 0.0, 1.2, 2.8, 4.4}) {
                const auto c = lemma_integral_closed(x, arc_lo(v), arc_hi(v), v, p);
                const auto q = lemma_integral_quadrature(x, arc_lo(v), arc_hi(v), v, p);
                worst = std::max(worst, std::abs(c - q));
            }
    EXPECT_LT(worst, 1e-8);
}

TEST(Lemma, QuadratureAgreesWithSecondRule) {
    for (double x : {1.0, 5.0, 10.0, 50.0, 95.0}) {
        const auto a = lemma_integral_quadrature(x, arc_lo(0.7), arc_hi(0.7), 0.7, -0.3);
        const auto b = kronrod_panels(x, arc_lo(0.7), arc_hi(0.7), 0.7, -0.3);
        EXPECT_LT(std::abs(a - b), 1e-11) << x;
    }
}

TEST(Lemma, ShiftSymmetry) {
    const double d = 0.83;
    const auto a = lemma_integral_closed(10, arc_lo(0.7), arc_hi(0.7), 0.7, -0.3);
    const auto b = lemma_integral_closed(10, arc_lo(0.7) + d, arc_hi(0.7) + d, 0.7 + d, -0.3 + d);
    EXPECT_LT(std::abs(a - b), 1e-10);
}

TEST(Lemma, ApertureAdditivity) {
    const double a = 0.2, b = 1.4, c = 3.9;
    for (double x : {2.0, 30.0}) {
        const auto whole = lemma_integral_quadrature(x, a, c, 0.5, 1.0);
        const auto parts = lemma_integral_quadrature(x, a, b, 0.5, 1.0) + lemma_integral_quadrature(x, b, c, 0.5, 1.0);
        EXPECT_LT(std::abs(whole - parts), 1e-11);
        const auto cwhole = lemma_integral_closed(x, a, c, 0.5, 1.0);
        const auto cparts = lemma_integral_closed(x, a, b, 0.5, 1.0) + lemma_integral_closed(x, b, c, 0.5, 1.0);
        EXPECT_LT(std::abs(cwhole - cparts), 1e-10);
    }
}

TEST(Lemma, Errors) {
    EXPECT_THROW(lemma_integral_closed(-1, 0, 1, 0, 0), ArgumentError);
    EXPECT_THROW(lemma_integral_closed(1, 1, 0, 0, 0), ArgumentError);
    EXPECT_THROW(lemma_integral_quadrature(1, 1, 1, 0, 0), ArgumentError);
    // Far too few terms for x = 80.
    SeriesConfig tiny;
    tiny.Q = 10;
    try {
        lemma_integral_closed(80, 0, 4, 0, 0, tiny);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_TRUE(std::isfinite(e.partial_sum_abs()));
    }
}

TEST(Remainder, SingleBracketIsScaledArcIntegral) {
    // kPeakConstant J0 - cos(2 psi) J2 / 2 + E_osm = (3/4pi) * arc integral.
    for (double x : {0.5, 3.0, 10.0, 40.0, 90.0})
        for (double psi : {0.0, 0.7, 2.0, -1.3}) {
            const double v = 0.3;
            const auto q = lemma_integral_quadrature(x, arc_lo(v), arc_hi(v), v, v - psi);
            EXPECT_LT(std::abs(osm_bracket(x, psi) - 3 / (4 * kPi) * q), 1e-10) << x << " " << psi;
        }
}

TEST(Remainder, MultiBracketIsEmitterAverage) {
    // kPeakConstant J0^2 + J2^2 / 2 + E_msm = (1/2pi) int e^{i x cos psi} bracket_osm(psi) dpsi.
    using boost::math::quadrature::gauss_kronrod;
    for (double x : {0.5, 3.0, 10.0, 25.0}) {
        const auto f = [&](double p) { return (std::exp(std::complex<double>(0, x * std::cos(p))) * osm_bracket(x, p)); };
        const double re = gauss_kronrod<double, 61>::integrate([&](double p) { return f(p).real(); }, 0, 2 * kPi, 15, 1e-13);
        const double im = gauss_kronrod<double, 61>::integrate([&](double p) { return f(p).imag(); }, 0, 2 * kPi, 15, 1e-13);
        const double j0 = oracle::bessel_j(0, x), j2 = oracle::bessel_j(2, x);
        EXPECT_NEAR(kPeakConstant * j0 * j0 + 0.5 * j2 * j2 + e_msm_series(x), re / (2 * kPi), 1e-10) << x;
        EXPECT_NEAR(im, 0.0, 1e-10);
    }
}

TEST(Remainder, VanishesAtObject) {
    const double k = MediumParams::at_frequency(8e9).wavenumber();
    EXPECT_EQ(e_osm({0.01, 0.02}, {0.01, 0.02}, 0.4, k), std::complex<double>(0.0, 0.0));
    EXPECT_EQ(e_msm({0.01, 0.02}, {0.01, 0.02}, k), 0.0);
}

TEST(Remainder, FixedTruncationConverges) {
    SeriesConfig a{1000, 1e-12, true}, b{2000, 1e-12, true};
    for (double x : {1.0, 20.0, 60.0, 100.0}) {
        EXPECT_LT(std::abs(e_msm_series(x, a) - e_msm_series(x, b)), 1e-9) << x;
        EXPECT_LT(std::abs(e_osm_series(x, 0.4, a) - e_osm_series(x, 0.4, b)), 1e-9) << x;
    }
}

TEST(Remainder, PublishedConfigMatchesAdaptive) {
    for (double x : {0.1, 5.0, 40.0}) {
        EXPECT_LT(std::abs(e_osm_series(x, 0.0, SeriesConfig::published(), SeriesForm::printed) -
                           e_osm_series(x, 0.0, {}, SeriesForm::printed)),
                  1e-10);
        EXPECT_NEAR(e_msm_series(x, SeriesConfig::published(), SeriesForm::printed),
                    e_msm_series(x, {}, SeriesForm::printed), 1e-10);
    }
}

TEST(Remainder, ConfigValidation) {
    EXPECT_THROW((SeriesConfig{0, 1e-12, false}.validate()), ArgumentError);
    EXPECT_THROW((SeriesConfig{10, 0.0, false}.validate()), ArgumentError);
    EXPECT_NO_THROW(SeriesConfig{}.validate());
    EXPECT_THROW(e_msm_series(200, SeriesConfig{20, 1e-12, false}), ConvergenceError);
}

TEST(Profiles, PeakConstant) {
    EXPECT_NEAR(kPeakConstant, 0.5 - 3 * std::sqrt(3.0) / (16 * kPi), 1e-16);
    for (double f : {2e9, 6e9, 10e9}) EXPECT_NEAR(d_profile(ProfileKind::msm1, 0.0, f), kPeakConstant, 1e-15);
}

TEST(Profiles, Even) {
    for (auto kind : {ProfileKind::osm1, ProfileKind::osm2, ProfileKind::osm, ProfileKind::msm1, ProfileKind::msm2,
                      ProfileKind::msm})
        for (double x : {0.003, 0.041, 0.097})
            EXPECT_NEAR(d_profile(kind, x, 6e9), d_profile(kind, -x, 6e9), 1e-12) << to_string(kind);
}

TEST(Profiles, MsmPeaksAtCentreOsmDoesNot) {
    for (double f : {2e9, 6e9, 10e9}) {
        double best_msm = -1, best_osm = -1, arg_msm = 1, arg_osm = 0;
        for (int i = -200; i <= 200; ++i) {
            const double x = i * 0.0005;
            const double m = d_profile(ProfileKind::msm, x, f);
            const double o = d_profile(ProfileKind::osm, x, f);
            if (m > best_msm) best_msm = m, arg_msm = x;
            if (o > best_osm) best_osm = o, arg_osm = x;
        }
        EXPECT_EQ(arg_msm, 0.0) << f;
        EXPECT_NE(arg_osm, 0.0) << f;
    }
}

TEST(Profiles, MultiRemainderBelowSingleNearCentre) {
    const double f = 6e9;
    const double k = MediumParams::at_frequency(f).wavenumber();
    for (double kx : {0.01, 0.05, 0.1}) {
        const double x = kx / k;
        EXPECT_LT(d_profile(ProfileKind::msm2, x, f), d_profile(ProfileKind::osm2, x, f)) << kx;
    }
}

TEST(Profiles, KindNames) {
    for (auto kind : {ProfileKind::osm1, ProfileKind::osm2, ProfileKind::osm, ProfileKind::msm1, ProfileKind::msm2,
                      ProfileKind::msm})
        EXPECT_EQ(parse_profile_kind(to_string(kind)), kind);
    EXPECT_THROW(parse_profile_kind("msm3"), ArgumentError);
}

TEST(Structure, MultiPeaksAtLoneObject) {
    const auto geom = default_fresnel_geometry();
    const auto med = MediumParams::at_frequency(8e9);
    const std::vector obj{SmallObject{{0.02, -0.01}, 0.01, 5 * kVacuumPermeability}};
    const auto grid = make_grid(-0.1, 0.1, -0.1, 0.1, 101, 101);
    const auto map = structure_multi_map(grid, obj, med, geom, {}, SeriesForm::exact, 0);
    const auto it = std::max_element(map.begin(), map.end());
    EXPECT_LT(norm(grid.point(static_cast<std::size_t>(it - map.begin())) - obj[0].center), 1e-12);
}

TEST(Structure, SinglePeakMagnitude) {
    const auto geom = default_fresnel_geometry();
    const auto med = MediumParams::at_frequency(8e9);
    const SmallObject o{{-0.03, 0.04}, 0.01, 5 * kVacuumPermeability};
    const std::vector obj{o};
    for (int m : {0, 7, 20})
        EXPECT_NEAR(structure_single(o.center, m, obj, med, geom), single_peak_magnitude(o, med, geom),
                    1e-14 * single_peak_magnitude(o, med, geom));
}

TEST(Structure, SingleMatchesBornMap) {
    const auto geom = std::make_shared<const ArrayGeometry>(default_fresnel_geometry());
    const auto med = MediumParams::at_frequency(8e9);
    const std::vector obj{SmallObject{{0.0, 0.0}, 0.01, 5 * kVacuumPermeability}};
    const auto grid = make_grid(-0.1, 0.1, -0.1, 0.1, 81, 81);
    IndicatorOptions opts;
    opts.threads = 0;
    const auto map = osm_single(born_scattered(obj, med, geom), 3, grid, opts);
    const auto theory = structure_single_map(grid, 3, obj, med, *geom, {}, SeriesForm::exact, 0);
    EXPECT_LT(normalized_rms_gap(map.values, theory), 0.05);
}

TEST(Structure, FarFieldWarning) {
    const auto geom = default_fresnel_geometry();
    const auto med = MediumParams::at_frequency(2e9);
    const std::vector obj{SmallObject{{0.0, 0.0}, 0.01, 5 * kVacuumPermeability}};
    std::vector<std::string> warnings;
    structure_single({0.0, 0.0}, 0, obj, med, geom, {}, SeriesForm::exact, &warnings);
    EXPECT_TRUE(warnings.empty());
    structure_single({0.70, 0.0}, 0, obj, med, geom, {}, SeriesForm::exact, &warnings);
    EXPECT_FALSE(warnings.empty());
}
