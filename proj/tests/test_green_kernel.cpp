#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fspde/green_kernel.hpp"
#include "support.hpp"

using namespace fspde;

namespace {
const double pi = std::numbers::pi;
}

TEST(Kernel, GaussianOracle) {
    const GridSpec g{20.0, 1024, 1.0, 1};
    for (double t : {0.5, 1.0, 2.0}) {
        const auto G = kernel(t, 0, {2.0, 0.0, 0, {}}, g);
        for (std::size_t i = 0; i < g.N; ++i) {
            const double x = g.x(i);
            if (std::fabs(x) > 8.0 * std::sqrt(t)) continue;
            EXPECT_NEAR(G.values[i] / gaussian_kernel(t, x), 1.0, 1e-8) << t << " " << x;
        }
    }
}

TEST(Kernel, CauchyOracleOnTorus) {
    const GridSpec g{20.0, 1024, 1.0, 1};
    const auto G = kernel(1.0, 0, {1.0, 0.0, 0, {}}, g);
    for (std::size_t i = 0; i < g.N; ++i)
        EXPECT_NEAR(G.values[i] / periodic_cauchy_kernel(1.0, g.x(i), g.L), 1.0, 1e-10);
}

TEST(Kernel, CauchyOracleFreeSpaceOnLargeTorus) {
    // the periodic images add about t / (12 L^2) relative to the free-space kernel
    const GridSpec g{1000.0, 32768, 1.0, 1};
    const auto G = kernel(1.0, 0, {1.0, 0.0, 0, {}}, g);
    for (std::size_t i = 0; i < g.N; ++i) {
        const double x = g.x(i);
        if (std::fabs(x) <= 10.0) {
            EXPECT_NEAR(G.values[i] / cauchy_kernel(1.0, x), 1.0, 1e-3);
        }
    }
}

TEST(Kernel, UnitMass) {
    for (double alpha : {1.2, 1.5, 1.8, 2.0, 2.5, 3.4}) {
        const double d = 0.5 * delta_bound(alpha);
        for (double t : {0.1, 1.0, 4.0}) {
            const GridSpec g{std::max(10.0, 10.0 * std::pow(t, 1.0 / alpha)), 512, 1.0, 1};
            const auto G = kernel(t, 0, {alpha, d, 0, {}}, g);
            double mass = 0.0;
            for (double v : G.values) mass += v;
            EXPECT_NEAR(g.dx() * mass, 1.0, 1e-10) << alpha << " " << t;
        }
    }
}

TEST(Kernel, RealSynthesis) {
    const GridSpec g{10.0, 256, 1.0, 1};
    for (int k : {0, 1, 2}) {
        const auto z = inverse_complex(kernel_spectrum(0.7, k, {1.5, 0.4, 0, {}}, g), g);
        for (const auto& v : z) EXPECT_LT(std::fabs(v.imag()), 1e-12);
    }
}

TEST(Kernel, RejectsBadTimes) {
    const GridSpec g{10.0, 256, 1.0, 1};
    const FracParams p{1.5, 0.0, 0, {}};
    EXPECT_THROW(kernel(0.0, 0, p, g), DomainError);
    EXPECT_THROW(kernel(-1.0, 0, p, g), DomainError);
    EXPECT_THROW(kernel(0.5 * min_resolved_time(p, g), 0, p, g), DomainError);
    EXPECT_NO_THROW(kernel(min_resolved_time(p, g), 0, p, g));
    EXPECT_THROW(kernel(1.0, -1, p, g), DomainError);
}

TEST(Kernel, InterpolantAgreesAtNodes) {
    const GridSpec g{10.0, 128, 1.0, 1};
    const FracParams p{1.7, 0.2, 0, {}};
    const auto G = kernel(0.8, 1, p, g);
    for (std::size_t i = 0; i < g.N; i += 9) EXPECT_NEAR(kernel_at(0.8, 1, g.x(i), p, g), G.values[i], 1e-12);
}

TEST(TailSeries, VanishesForGaussian) {
    const FracParams p{2.0, 0.0, 0, {}};
    for (double x : {3.0, -5.0, 11.0}) EXPECT_NEAR(tail_series(x, 0, 3, p), 0.0, 1e-14);
}

TEST(TailSeries, LeadingTermFormula) {
    const FracParams p{1.5, 0.0, 0, {}};
    const double want = std::pow(20.0, -2.5) * std::tgamma(2.5) * std::sin(0.75 * pi) / pi;
    EXPECT_NEAR(tail_series(20.0, 0, 1, p) / want, 1.0, 1e-14);
}

TEST(TailSeries, MatchesKernelAtLargeX) {
    const GridSpec g{4096.0, 32768, 1.0, 1};
    const FracParams p{1.5, 0.0, 0, {}};
    const auto G = kernel(1.0, 0, p, g);
    auto at = [&](double x) { return G.values[static_cast<std::size_t>(std::llround((x + g.L) / g.dx()))]; };
    EXPECT_NEAR(tail_series(40.0, 0, 1, p) / at(40.0), 1.0, 0.02);
    EXPECT_NEAR(tail_series(-40.0, 0, 1, p) / at(-40.0), 1.0, 0.02);
    // at x = 20 one term is 3.5% short; three terms close the gap
    EXPECT_NEAR(tail_series(20.0, 0, 3, p) / at(20.0), 1.0, 1e-4);
}

TEST(TailSeries, SkewedBothSides) {
    const GridSpec g{4096.0, 32768, 1.0, 1};
    const FracParams p{1.5, 0.4, 0, {}};
    const auto G = kernel(1.0, 0, p, g);
    auto at = [&](double x) { return G.values[static_cast<std::size_t>(std::llround((x + g.L) / g.dx()))]; };
    for (double x : {-60.0, -30.0, 30.0, 60.0}) EXPECT_NEAR(tail_series(x, 0, 3, p) / at(x), 1.0, 2e-3) << x;
}

TEST(TailSeries, FirstDerivativeSignAndValue) {
    const GridSpec g{4096.0, 32768, 1.0, 1};
    const FracParams p{1.5, 0.3, 0, {}};
    const auto G = kernel(1.0, 0, p, g);
    const auto G1 = kernel(1.0, 1, p, g);
    for (double x : {-50.0, 50.0}) {
        const auto i = static_cast<std::size_t>(std::llround((x + g.L) / g.dx()));
        const double fd = (G.values[i + 1] - G.values[i - 1]) / (2.0 * g.dx());
        EXPECT_NEAR(tail_series(x, 1, 3, p) / fd, 1.0, 5e-3) << x;
        EXPECT_NEAR(tail_series(x, 1, 3, p) / G1.values[i], 1.0, 5e-3) << x;
    }
    // leading terms of l = 0 and l = 1 have opposite signs on the right
    EXPECT_LT(tail_series(50.0, 0, 1, p) * tail_series(50.0, 1, 1, p), 0.0);
}

TEST(TailSeries, RejectsBadArguments) {
    const FracParams p{1.5, 0.0, 0, {}};
    EXPECT_THROW(tail_series(0.0, 0, 1, p), DomainError);
    EXPECT_THROW(tail_series(1.0, 0, 0, p), DomainError);
    EXPECT_THROW(tail_series(1.0, -1, 1, p), DomainError);
}

TEST(Semigroup, SkewedKernel) {
    const GridSpec g{20.0, 512, 1.0, 1};
    EXPECT_LT(check_semigroup(0.5, 0.5, {1.5, 0.3, 0, {}}, g), 1e-8);
}

TEST(Semigroup, GaussianVarianceAdditivity) {
    const GridSpec g{20.0, 512, 1.0, 1};
    const FracParams p{2.0, 0.0, 0, {}};
    EXPECT_LT(check_semigroup(0.3, 0.9, p, g), 1e-8);
    const auto G = kernel(1.2, 0, p, g);
    for (std::size_t i = 0; i < g.N; ++i) EXPECT_NEAR(G.values[i], gaussian_kernel(1.2, g.x(i)), 1e-12);
}

TEST(Semigroup, ContinuousInTime) {
    const GridSpec g{20.0, 512, 1.0, 1};
    const FracParams p{1.5, 0.2, 0, {}};
    const auto base = kernel(1.0, 0, p, g).values;
    double prev = 1e300;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const double d = fspde::testing::max_abs_diff(kernel(1.0 + eps, 0, p, g).values, base);
        EXPECT_LT(d, prev);
        prev = d;
    }
    EXPECT_LT(prev, 1e-4);
}

TEST(Semigroup, RejectsNonpositiveTimes) {
    const GridSpec g{20.0, 64, 1.0, 1};
    EXPECT_THROW(check_semigroup(0.0, 1.0, {1.5, 0.0, 0, {}}, g), DomainError);
}

TEST(Scaling, Examples) {
    const GridSpec g{20.0, 512, 1.0, 1};
    EXPECT_LT(check_scaling(2.0, 0, {1.6, 0.0, 0, {}}, g), 1e-8);
    EXPECT_EQ(check_scaling(1.0, 0, {1.6, 0.3, 0, {}}, g), 0.0);
    EXPECT_LT(check_scaling(0.4, 2, {2.5, 0.2, 0, {}}, g), 1e-8);
}

TEST(Scaling, GaussianDerivative) {
    const GridSpec g{20.0, 1024, 1.0, 1};
    const FracParams p{2.0, 0.0, 0, {}};
    EXPECT_LT(check_scaling(2.0, 1, p, g), 1e-8);
    const auto G1 = kernel(2.0, 1, p, g);
    for (std::size_t i = 0; i < g.N; ++i) {
        const double x = g.x(i);
        EXPECT_NEAR(G1.values[i], -x / (2.0 * 2.0) * gaussian_kernel(2.0, x), 1e-12);
    }
}

TEST(Positivity, Verdicts) {
    const GridSpec g{20.0, 1024, 1.0, 1};
    const auto skew = check_positivity(1.0, {1.5, 0.4, 0, {}}, g);
    EXPECT_GE(skew.min_value, -1e-9);
    EXPECT_TRUE(skew.is_density);
    const auto high = check_positivity(1.0, {2.5, 0.0, 0, {}}, g);
    EXPECT_LT(high.min_value, -1e-6);
    EXPECT_FALSE(high.is_density);
    const auto gauss = check_positivity(1.0, {2.0, 0.0, 0, {}}, g);
    EXPECT_GT(gauss.min_value, -1e-15);
    EXPECT_TRUE(gauss.is_density);
}

TEST(NormExponent, Formula) {
    EXPECT_DOUBLE_EQ(norm_exponent(1.5, 1.0, 0), 0.0);
    EXPECT_NEAR(norm_exponent(1.5, 2.0, 0), -1.0 / 3.0, 1e-15);
    EXPECT_NEAR(norm_exponent(1.8, 1.0, 1), -1.0 / 1.8, 1e-15);
    EXPECT_THROW(norm_exponent(1.5, 0.3, 0), DomainError);
}

TEST(NormExponent, MeasuredSlopes) {
    const GridSpec g{64.0, 4096, 1.0, 1};
    const std::vector<double> ts{0.5, 1.0, 2.0};
    const double s1 = measure_norm_slope(2.0, 0, {1.5, 0.0, 0, {}}, g, ts);
    EXPECT_NEAR(s1 / (-1.0 / 3.0), 1.0, 0.01);
    const double s2 = measure_norm_slope(1.0, 1, {1.8, 0.1, 0, {}}, g, ts);
    EXPECT_NEAR(s2 / (-1.0 / 1.8), 1.0, 0.01);
    const double s3 = measure_norm_slope(1.0, 0, {1.8, 0.1, 0, {}}, g, ts);
    EXPECT_NEAR(s3, 0.0, 1e-9);
}

TEST(NormExponent, RejectsNarrowTimeRange) {
    const GridSpec g{64.0, 512, 1.0, 1};
    const std::vector<double> ts{1.0, 2.0};
    EXPECT_THROW(measure_norm_slope(2.0, 0, {1.5, 0.0, 0, {}}, g, ts), DomainError);
}

TEST(Decay, TailEnvelopeShrinksTowardBoundary) {
    const GridSpec g{256.0, 8192, 1.0, 1};
    const FracParams p{1.5, 0.2, 0, {}};
    for (int l : {0, 1, 2}) {
        const auto G = kernel(1.0, l, p, g).values;
        auto envelope = [&](double a, double b) {
            double m = 0.0;
            for (std::size_t i = 0; i < g.N; ++i)
                if (std::fabs(g.x(i)) >= a && std::fabs(g.x(i)) < b) m = std::max(m, std::fabs(G[i]));
            return m;
        };
        const double e1 = envelope(16, 32), e2 = envelope(32, 64), e3 = envelope(64, 128), e4 = envelope(128, 256);
        EXPECT_GT(e1, e2) << l;
        EXPECT_GT(e2, e3) << l;
        EXPECT_GT(e3, e4) << l;
        EXPECT_LT(e4, 1e-3 * envelope(0, 1)) << l;
    }
}
