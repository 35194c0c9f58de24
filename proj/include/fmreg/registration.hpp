#pragma once

#include "fmreg/grid.hpp"
#include "fmreg/spectral.hpp"

namespace fmreg::registration {

/// Forward model y[p] = x[scale * R(theta) * p + shift] with
/// R(theta) = [[cos, sin], [-sin, cos]] acting on (p1, p2) = (row, column).
struct SimilarityParams {
    double scale = 1.0;
    double theta = 0.0;  ///< radians
    Vec2 shift;          ///< pixels
};

/// Throws InvalidArgument for scale <= 0 or non-finite fields.
void validate(const SimilarityParams& params);

/// Wraps an angle into (-pi/2, pi/2].
double wrap_half_turn(double theta);

/// output[p] = bicubic(img, scale * R(theta) * p + shift); the output has the
/// input's shape and samples that fall off the source are 0.
Image apply_similarity(const Image& img, const SimilarityParams& params);

/// Same transform with the origin of p moved to `center` on both sides:
/// output[c + q] = img[c + scale * R(theta) * q + shift].
Image apply_similarity_about(const Image& img, const SimilarityParams& params, Vec2 center);

/// Resamples `target` so that a target produced from `reference` by
/// (scale, theta) about the image center lines up with the reference again.
Image undo_scale_rotation(const Image& target, double scale, double theta);

struct EstimateConfig {
    spectral::WeightScheme weights = spectral::WeightScheme::Standard;
    double tol = 1e-8;
    int max_iter = 100;
};

struct EstimateResult {
    double scale = 1.0;  ///< exp(rho_step * rho_hat)
    double theta = 0.0;  ///< phi_step * phi_hat wrapped to (-pi/2, pi/2]
    /// Displacement of y's log-polar amplitude relative to x's, in samples:
    /// Y[r] ~ X[r - (rho_hat, phi_hat)].
    double rho_hat = 0.0;
    double phi_hat = 0.0;
    double rho_step = 0.0;
    double phi_step = 0.0;
    double objective_value = 0.0;
    int iterations = 0;
    bool converged = true;
};

/// Sub-sample scale/rotation estimate: windowed amplitude spectra, log-polar
/// resampling, zero-mean windowed log-polar cross-spectrum, MM refinement of
/// the discrete peak. Returned (scale, theta) estimate the forward model of
/// SimilarityParams; theta is only defined modulo pi.
EstimateResult estimate_scale_rotation(const Image& x, const Image& y, const EstimateConfig& cfg = {});

/// Same pipeline, stopping at the integer peak of the correlation grid.
EstimateResult baseline_scale_rotation(const Image& x, const Image& y, const EstimateConfig& cfg = {});

struct TranslationEstimate {
    Vec2 shift;  ///< y[p] ~ x[p + shift]
    double value = 0.0;
    int iterations = 0;
    bool converged = true;
};

/// Sub-pixel translation from zero-mean, Gaussian-windowed spectra.
TranslationEstimate estimate_translation(const Image& x, const Image& y, const EstimateConfig& cfg = {});

}  // namespace fmreg::registration
