#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fmreg/grid.hpp"
#include "fmreg/registration.hpp"

namespace fmreg::simulation {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Uniform sampling ranges; defaults reproduce the evaluation protocol.
struct ParamRanges {
    Range theta_deg{-30.0, 30.0};
    Range scale{0.8, 1.2};
    Range p1{-5.0, 5.0};
    Range p2{-5.0, 5.0};
};

struct TrialSpec {
    std::uint64_t seed = 0;
    std::size_t crop_size = 64;
    ParamRanges ranges;
};

/// Throws InvalidArgument for reversed ranges, non-positive scales, or a crop
/// size that is odd or below 16.
void validate(const TrialSpec& spec);

/// Independent engine for (seed, index, stream); the result does not depend
/// on which other indices were drawn or in which order.
std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t index, std::uint64_t stream);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(std::mt19937_64& engine);

registration::SimilarityParams random_params(const TrialSpec& spec, std::uint64_t index);

/// Smooth test texture: 20 seeded sinusoids, every frequency below a quarter
/// of Nyquist, values in [0, 1].
Image synthetic_texture(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Smallest square source side that make_pair accepts for `spec`.
std::size_t required_source_size(const TrialSpec& spec);

struct ImagePair {
    Image x;
    Image y;
    /// Parameters in the crop frame, origin at the crop center (crop_size/2):
    /// y[c + q] = x[c + scale * R(theta) * q + shift].
    registration::SimilarityParams truth;
    /// Center of the x crop in source coordinates.
    IntLag source_center;
};

/// Crops x from `source` at a seeded location and y from the similarity-
/// transformed source at the matching location.
ImagePair make_pair(const Image& source, const registration::SimilarityParams& params,
                    const TrialSpec& spec, std::uint64_t index);

struct TrialResult {
    std::uint64_t index = 0;
    registration::SimilarityParams truth;
    registration::EstimateResult proposed;
    registration::EstimateResult baseline;
    double err_scale_proposed = 0.0;
    double err_angle_deg_proposed = 0.0;
    double err_scale_baseline = 0.0;
    double err_angle_deg_baseline = 0.0;
    bool failed = false;
    std::string failure;
};

struct ErrorStats {
    double mean = 0.0;
    double variance = 0.0;  ///< population variance
};

struct TrialReport {
    std::vector<TrialResult> results;
    std::size_t failed = 0;
    ErrorStats scale_proposed;
    ErrorStats angle_proposed;
    ErrorStats scale_baseline;
    ErrorStats angle_baseline;
};

/// |wrap(estimate) - wrap(truth)| in degrees, both wrapped to (-90, 90].
double angle_error_deg(double estimate_rad, double truth_rad);

/// Mean and population variance over non-failed rows (NaN when none).
void aggregate(TrialReport& report);

/// Runs n trials; trial i uses random_params(spec, i) and make_pair(..., i).
/// `threads` only changes scheduling, never results.
TrialReport run_trials(const Image& source, std::size_t n, const TrialSpec& spec,
                       const registration::EstimateConfig& cfg, unsigned threads = 1);

}  // namespace fmreg::simulation
