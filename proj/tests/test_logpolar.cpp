#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fmreg/errors.hpp"
#include "fmreg/logpolar.hpp"
#include "oracles.hpp"

namespace fmreg::logpolar {
namespace {

using spectral::AmplitudeGrid;

// Lag of b relative to a (b[i] ~ a[i - lag]) along rows or (circularly)
// along columns, from normalized correlation plus a 3-point parabola.
double correlation_lag(const RealGrid& a, const RealGrid& b, bool along_rows, int max_lag) {
    auto score = [&](int d) {
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0, count = 0;
        for (long i = 0; i < static_cast<long>(a.rows()); ++i)
            for (long j = 0; j < static_cast<long>(a.cols()); ++j) {
                long bi = i, bj = j;
                if (along_rows) {
                    bi = i + d;
                    if (bi < 0 || bi >= static_cast<long>(a.rows())) continue;
                } else {
                    bj = ((j + d) % static_cast<long>(a.cols()) + static_cast<long>(a.cols())) % static_cast<long>(a.cols());
                }
                const double va = a(i, j), vb = b(bi, bj);
                sa += va; sb += vb; saa += va * va; sbb += vb * vb; sab += va * vb; ++count;
            }
        const double cov = sab - sa * sb / count;
        return cov / std::sqrt((saa - sa * sa / count) * (sbb - sb * sb / count));
    };
    int best = -max_lag;
    for (int d = -max_lag; d <= max_lag; ++d)
        if (score(d) > score(best)) best = d;
    const double l = score(best - 1), c = score(best), r = score(best + 1);
    return best + 0.5 * (l - r) / (l - 2.0 * c + r);
}

TEST(CubicKernel, Shape) {
    EXPECT_DOUBLE_EQ(cubic_kernel(0.0), 1.0);
    EXPECT_DOUBLE_EQ(cubic_kernel(1.0), 0.0);
    EXPECT_DOUBLE_EQ(cubic_kernel(-2.0), 0.0);
    EXPECT_DOUBLE_EQ(cubic_kernel(0.5), cubic_kernel(-0.5));
    // Partition of unity.
    for (double f : {0.0, 0.1, 0.37, 0.5, 0.9}) {
        EXPECT_NEAR(cubic_kernel(f + 1) + cubic_kernel(f) + cubic_kernel(f - 1) + cubic_kernel(f - 2), 1.0, 1e-15);
    }
}

TEST(BicubicSample, ReproducesNodes) {
    const auto g = oracle::random_grid(8, 8, 2);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) EXPECT_DOUBLE_EQ(bicubic_sample(g, r, c), g(r, c));
}

TEST(BicubicSample, ReproducesLinearRamp) {
    RealGrid g(8, 8);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) g(r, c) = static_cast<double>(r);
    EXPECT_NEAR(bicubic_sample(g, 2.5, 2.0), 2.5, 1e-14);
    EXPECT_NEAR(bicubic_sample(g, 3.25, 4.75), 3.25, 1e-14);
}

TEST(BicubicSample, MatchesDirectFormula) {
    const auto g = oracle::random_grid(16, 16, 5);
    std::mt19937_64 e(6);
    std::uniform_real_distribution<double> d(0.0, 15.0);
    for (int i = 0; i < 100; ++i) {
        const double u = d(e), v = d(e);
        EXPECT_NEAR(bicubic_sample(g, u, v), oracle::direct_bicubic(g, u, v), 1e-12);
    }
    // Border support taps are zero-filled in both.
    EXPECT_NEAR(bicubic_sample(g, 0.3, 15.6), oracle::direct_bicubic(g, 0.3, 15.6), 1e-12);
    EXPECT_NEAR(bicubic_sample(g, -1.5, 4.2), oracle::direct_bicubic(g, -1.5, 4.2), 1e-12);
}

TEST(BicubicSample, FarOutsideIsZero) {
    const RealGrid g(8, 8, 1.0);
    EXPECT_EQ(bicubic_sample(g, 100.0, 3.0), 0.0);
    EXPECT_EQ(bicubic_sample(g, 3.0, -50.0), 0.0);
}

TEST(BicubicSample, Errors) {
    const RealGrid g(8, 8, 1.0);
    EXPECT_THROW(bicubic_sample(g, std::nan(""), 1.0), InvalidArgument);
    EXPECT_THROW(bicubic_sample(g, 1.0, INFINITY), InvalidArgument);
    EXPECT_THROW(bicubic_sample(RealGrid(3, 8, 1.0), 1.0, 1.0), InvalidArgument);
}

TEST(LogPolarTransform, SampleSets) {
    const auto lp = log_polar_transform(AmplitudeGrid{RealGrid(64, 32, 1.0)});
    EXPECT_EQ(lp.values.rows(), 64u);
    EXPECT_EQ(lp.values.cols(), 32u);
    EXPECT_DOUBLE_EQ(lp.rho_step * 64, std::log(32.0));
    EXPECT_NEAR(lp.phi_step * 32, 2.0 * std::numbers::pi, 1e-15);
    EXPECT_DOUBLE_EQ(lp.rho(0), lp.rho_step);
    EXPECT_DOUBLE_EQ(lp.phi(0), 0.0);
}

TEST(LogPolarTransform, FollowsDefinition) {
    const auto amp = oracle::random_grid(16, 16, 12, 0.0, 1.0);
    const auto lp = log_polar_transform(AmplitudeGrid{amp});
    for (std::size_t i = 0; i < 16; i += 3)
        for (std::size_t j = 0; j < 16; j += 5) {
            const double radius = std::exp(std::log(16.0) / 16.0 * (i + 1));
            const double phi = 2.0 * std::numbers::pi / 16.0 * j;
            const double expected = oracle::direct_bicubic(amp, 8 + radius * std::cos(phi), 8 + radius * std::sin(phi));
            EXPECT_NEAR(lp.values(i, j), std::max(expected, 0.0), 1e-12);
        }
}

TEST(LogPolarTransform, BeyondGridIsZeroAndAllFinite) {
    const auto lp = log_polar_transform(AmplitudeGrid{oracle::random_grid(32, 32, 1, 0.0, 5.0)});
    for (double v : lp.values.values()) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_GE(v, 0.0);
    }
    // exp(rho) reaches 32, twice the half-width: the outer rows see no data.
    for (std::size_t j = 0; j < 32; ++j) EXPECT_EQ(lp.values(31, j), 0.0);
}

TEST(LogPolarTransform, IsotropicBumpGivesConstantRows) {
    // Cubic convolution error scales with 1/sigma^3; a wide bump keeps it
    // below 1e-6. Radii within the kernel support of the border see the
    // zero fill and are skipped.
    const auto lp = log_polar_transform(AmplitudeGrid{oracle::gaussian_bump(256, 256, 48.0, 48.0, 0.0)});
    double peak = 0.0;
    for (double v : lp.values.values()) peak = std::max(peak, v);
    for (std::size_t i = 0; i < 256 && std::exp(lp.rho(i)) <= 124.0; ++i) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t j = 0; j < 256; ++j) {
            lo = std::min(lo, lp.values(i, j));
            hi = std::max(hi, lp.values(i, j));
        }
        EXPECT_LT(hi - lo, 1e-6 * peak) << "row " << i;
    }
}

TEST(LogPolarTransform, ScalingBecomesRhoShift) {
    const double sigma = 3.0;
    for (double a : {0.8, 0.9, 1.1, 1.25}) {
        const auto x = log_polar_transform(AmplitudeGrid{oracle::gaussian_bump(64, 64, sigma, 2.0 * sigma, 0.4)});
        const auto y = log_polar_transform(AmplitudeGrid{oracle::gaussian_bump(64, 64, a * sigma, 2.0 * a * sigma, 0.4)});
        const double expected = std::log(a) / x.rho_step;
        EXPECT_NEAR(oracle::shift_fit(x.values, y.values, true), expected, 0.5) << "a = " << a;
    }
}

TEST(LogPolarTransform, OneColumnRotationIsOneColumnShift) {
    const double step = 2.0 * std::numbers::pi / 64.0;
    const auto x = log_polar_transform(AmplitudeGrid{oracle::gaussian_bump(64, 64, 3.0, 8.0, 0.3)});
    const auto y = log_polar_transform(AmplitudeGrid{oracle::gaussian_bump(64, 64, 3.0, 8.0, 0.3 + step)});
    EXPECT_NEAR(oracle::shift_fit(x.values, y.values, false), 1.0, 0.5);
    EXPECT_NEAR(correlation_lag(x.values, y.values, false, 8), 1.0, 0.5);
}

}  // namespace
}  // namespace fmreg::logpolar
