#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fmreg/errors.hpp"
#include "fmreg/registration.hpp"
#include "fmreg/simulation.hpp"
#include "oracles.hpp"

namespace fmreg::registration {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Image crop(const Image& img, std::size_t r0, std::size_t c0, std::size_t size) {
    Image out(size, size);
    for (std::size_t r = 0; r < size; ++r)
        for (std::size_t c = 0; c < size; ++c) out(r, c) = img(r0 + r, c0 + c);
    return out;
}

struct Pair {
    Image x, y;
};

// 64x64 crops of a smooth texture and of its similarity transform about the
// crop center.
Pair similar_pair(std::uint64_t seed, double scale, double theta, Vec2 shift = {}) {
    const Image source = simulation::synthetic_texture(192, 192, seed);
    const Image moved = apply_similarity_about(source, {scale, theta, shift}, {96.0, 96.0});
    return {crop(source, 64, 64, 64), crop(moved, 64, 64, 64)};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void expect_lag_consistency(const EstimateResult& r) {
    EXPECT_DOUBLE_EQ(r.scale, std::exp(r.rho_step * r.rho_hat));
    EXPECT_DOUBLE_EQ(r.theta, wrap_half_turn(r.phi_step * r.phi_hat));
    EXPECT_DOUBLE_EQ(r.rho_step, std::log(64.0) / 64.0);
    EXPECT_DOUBLE_EQ(r.phi_step, 2.0 * std::numbers::pi / 64.0);
}

TEST(WrapHalfTurn, Interval) {
    const double pi = std::numbers::pi;
    EXPECT_DOUBLE_EQ(wrap_half_turn(0.0), 0.0);
    EXPECT_DOUBLE_EQ(wrap_half_turn(pi / 2), pi / 2);
    EXPECT_DOUBLE_EQ(wrap_half_turn(-pi / 2), pi / 2);
    EXPECT_NEAR(wrap_half_turn(0.3 - pi), 0.3, 1e-15);
    EXPECT_NEAR(wrap_half_turn(-0.3 + 3 * pi), -0.3, 1e-14);
}

TEST(ApplySimilarity, IdentityIsExact) {
    const auto img = oracle::random_grid(16, 12, 1);
    EXPECT_EQ(apply_similarity(img, {}), img);
}

TEST(ApplySimilarity, IntegerShift) {
    const auto img = oracle::random_grid(16, 16, 2);
    const auto out = apply_similarity(img, {1.0, 0.0, {3.0, 5.0}});
    for (std::size_t r = 0; r + 3 < 16; ++r)
        for (std::size_t c = 0; c + 5 < 16; ++c) EXPECT_DOUBLE_EQ(out(r, c), img(r + 3, c + 5));
    EXPECT_EQ(out(15, 15), 0.0);
}

TEST(ApplySimilarity, RotationMatrixConvention) {
    // y[c + q] = x[c + R q] with R = [[cos, sin], [-sin, cos]]; at 90 deg R q = (q2, -q1).
    RealGrid probe(16, 16);
    probe(8 + 3, 8) = 1.0;
    const auto rot = apply_similarity_about(probe, {1.0, std::numbers::pi / 2, {}}, {8.0, 8.0});
    EXPECT_NEAR(rot(8, 8 + 3), 1.0, 1e-12);
    EXPECT_NEAR(rot(8, 8 - 3), 0.0, 1e-12);
}

TEST(ApplySimilarity, RoundTripRecoversInterior) {
    const Image x = simulation::synthetic_texture(64, 64, 4);
    const double s = 1.1, theta = 10.0 * kDeg;
    const Vec2 c{32.0, 32.0};
    // Centered similarity expressed with the origin at p = 0.
    const double co = std::cos(theta), si = std::sin(theta);
    const Vec2 b{c.x1 - s * (co * c.x1 + si * c.x2), c.x2 - s * (-si * c.x1 + co * c.x2)};
    const auto y = apply_similarity(x, {s, theta, b});
    // Inverse: x[q] = y[A^-1 (q - b)], A^-1 = R(-theta) / s.
    const Vec2 binv{-(co * b.x1 - si * b.x2) / s, -(si * b.x1 + co * b.x2) / s};
    const auto z = apply_similarity(y, {1.0 / s, -theta, binv});
    double lo = 1.0, hi = 0.0, err = 0.0;
    for (double v : x.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (std::size_t r = 16; r < 48; ++r)
        for (std::size_t col = 16; col < 48; ++col) err = std::max(err, std::abs(z(r, col) - x(r, col)));
    EXPECT_LT(err, 1e-2 * (hi - lo));
}

TEST(ApplySimilarity, RejectsBadScale) {
    const RealGrid img(8, 8, 1.0);
    EXPECT_THROW(apply_similarity(img, {0.0, 0.0, {}}), InvalidArgument);
    EXPECT_THROW(apply_similarity(img, {-1.0, 0.0, {}}), InvalidArgument);
    EXPECT_THROW(apply_similarity(img, {1.0, std::nan(""), {}}), InvalidArgument);
}

TEST(EstimateScaleRotation, IdentityPair) {
    const Image x = simulation::synthetic_texture(64, 64, 5);
    const auto r = estimate_scale_rotation(x, x);
    EXPECT_GE(r.scale, 0.99);
    EXPECT_LE(r.scale, 1.01);
    EXPECT_LE(std::abs(r.theta), 0.1 * kDeg);
    expect_lag_consistency(r);
}

TEST(EstimateScaleRotation, PureRotation) {
    const auto p = similar_pair(6, 1.0, 10.0 * kDeg);
    const auto r = estimate_scale_rotation(p.x, p.y);
    EXPECT_NEAR(r.theta / kDeg, 10.0, 0.5);
    EXPECT_NEAR(r.scale, 1.0, 0.02);
    EXPECT_NEAR(r.phi_hat, 10.0 * kDeg / r.phi_step, 0.5);
    expect_lag_consistency(r);
}

TEST(EstimateScaleRotation, PureScaleIsRhoShift) {
    for (double s : {0.9, 1.12}) {
        const auto p = similar_pair(7, s, 0.0);
        const auto r = estimate_scale_rotation(p.x, p.y);
        EXPECT_NEAR(r.rho_hat, std::log(s) / r.rho_step, 0.5) << "s = " << s;
        EXPECT_NEAR(r.scale, s, 0.03);
    }
}

TEST(EstimateScaleRotation, HalfTurnAmbiguity) {
    const auto p = similar_pair(8, 1.05, 12.0 * kDeg);
    // Circular point reflection leaves the windowed amplitude spectrum unchanged.
    Image flipped(64, 64);
    for (std::size_t r = 0; r < 64; ++r)
        for (std::size_t c = 0; c < 64; ++c) flipped(r, c) = p.y((64 - r) % 64, (64 - c) % 64);
    const auto a = estimate_scale_rotation(p.x, p.y);
    const auto b = estimate_scale_rotation(p.x, flipped);
    EXPECT_NEAR(a.theta, b.theta, 1e-9);
    EXPECT_NEAR(a.scale, b.scale, 1e-9);

    // Genuine rotation by theta - 180 deg reads back the same angle.
    const auto q = similar_pair(8, 1.05, 12.0 * kDeg - std::numbers::pi);
    const auto c = estimate_scale_rotation(q.x, q.y);
    EXPECT_NEAR(c.theta / kDeg, a.theta / kDeg, 0.1);
}

TEST(EstimateScaleRotation, DominatesBaselineObjective) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = similar_pair(seed, 0.95 + 0.01 * seed, (seed * 4.0 - 20.0) * kDeg);
        const auto prop = estimate_scale_rotation(p.x, p.y);
        const auto base = baseline_scale_rotation(p.x, p.y);
        EXPECT_GE(prop.objective_value, base.objective_value);
        EXPECT_EQ(base.iterations, 0);
        EXPECT_EQ(base.rho_hat, std::round(base.rho_hat));
        EXPECT_EQ(base.phi_hat, std::round(base.phi_hat));
        EXPECT_LE(std::abs(base.phi_hat), 16.0);
        expect_lag_consistency(base);
    }
}

TEST(EstimateScaleRotation, PhatContracts) {
    const EstimateConfig phat{spectral::WeightScheme::Phat, 1e-8, 100};
    const Image x = simulation::synthetic_texture(64, 64, 9);
    const auto same = estimate_scale_rotation(x, x, phat);
    EXPECT_NEAR(same.scale, 1.0, 0.01);
    EXPECT_LE(std::abs(same.theta), 0.1 * kDeg);

    const auto p = similar_pair(9, 1.0, -8.0 * kDeg);
    const auto prop = estimate_scale_rotation(p.x, p.y, phat);
    const auto base = baseline_scale_rotation(p.x, p.y, phat);
    EXPECT_GE(prop.objective_value, base.objective_value);
    expect_lag_consistency(prop);
}

TEST(EstimateScaleRotation, RoundTripStatistics) {
    std::vector<double> ds, dt;
    std::mt19937_64 e(2024);
    std::uniform_real_distribution<double> us(0.9, 1.1), ut(-20.0, 20.0);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const double s = us(e), t = ut(e) * kDeg;
        const auto p = similar_pair(100 + seed, s, t);
        const auto r = estimate_scale_rotation(p.x, p.y);
        ds.push_back(std::abs(r.scale - s));
        dt.push_back(std::abs(r.theta - t) / kDeg);
    }
    EXPECT_LE(median(ds), 0.02);
    EXPECT_LE(median(dt), 0.5);
}

TEST(EstimateScaleRotation, Errors) {
    const Image x = simulation::synthetic_texture(64, 64, 1);
    EXPECT_THROW(estimate_scale_rotation(x, RealGrid(64, 64, 0.5)), DegenerateInput);
    EXPECT_THROW(baseline_scale_rotation(RealGrid(64, 64, 0.5), x), DegenerateInput);
    EXPECT_THROW(estimate_scale_rotation(x, simulation::synthetic_texture(64, 32, 1)), InvalidArgument);
    EXPECT_THROW(estimate_scale_rotation(RealGrid(7, 7, 1.0), RealGrid(7, 7, 1.0)), InvalidArgument);
}

TEST(BaselineScaleRotation, IdentityIsExact) {
    const Image x = simulation::synthetic_texture(64, 64, 3);
    const auto r = baseline_scale_rotation(x, x);
    EXPECT_EQ(r.scale, 1.0);
    EXPECT_EQ(r.theta, 0.0);
    EXPECT_EQ(r.rho_hat, 0.0);
    EXPECT_EQ(r.phi_hat, 0.0);
}

TEST(EstimateTranslation, Identity) {
    const auto x = oracle::band_limited(64, 64, 3, 6);
    const auto t = estimate_translation(x, x);
    EXPECT_NEAR(t.shift.x1, 0.0, 1e-3);
    EXPECT_NEAR(t.shift.x2, 0.0, 1e-3);
}

TEST(EstimateTranslation, IntegerCircularShift) {
    const auto x = simulation::synthetic_texture(64, 64, 11);
    Image y(64, 64);
    for (std::size_t r = 0; r < 64; ++r)
        for (std::size_t c = 0; c < 64; ++c) y(r, c) = x((r + 3) % 64, (c + 5) % 64);
    const auto t = estimate_translation(x, y);
    EXPECT_NEAR(t.shift.x1, 3.0, 0.1);
    EXPECT_NEAR(t.shift.x2, 5.0, 0.1);
}

TEST(EstimateTranslation, SubPixelShift) {
    const auto x = oracle::band_limited(64, 64, 12, 6);
    const auto y = oracle::band_limited(64, 64, 12, 6, 2.5, -1.25);  // y[p] = x[p + (2.5, -1.25)]
    const auto t = estimate_translation(x, y);
    EXPECT_NEAR(t.shift.x1, 2.5, 0.05);
    EXPECT_NEAR(t.shift.x2, -1.25, 0.05);
    EXPECT_TRUE(t.converged);
}

TEST(UndoScaleRotation, ReducesResidual) {
    const auto p = similar_pair(13, 1.08, 15.0 * kDeg);
    const auto r = estimate_scale_rotation(p.x, p.y);
    const auto aligned = undo_scale_rotation(p.y, r.scale, r.theta);
    double before = 0.0, after = 0.0;
    for (std::size_t row = 16; row < 48; ++row)
        for (std::size_t c = 16; c < 48; ++c) {
            before += std::abs(p.y(row, c) - p.x(row, c));
            after += std::abs(aligned(row, c) - p.x(row, c));
        }
    EXPECT_LT(after, 0.5 * before);
}

}  // namespace
}  // namespace fmreg::registration
