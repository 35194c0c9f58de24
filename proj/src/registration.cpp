#include "fmreg/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fmreg/errors.hpp"
#include "fmreg/logpolar.hpp"
#include "fmreg/optimizer.hpp"

namespace fmreg::registration {
namespace {

using spectral::Window;

void require_pair(const Image& x, const Image& y) {
    spectral::validate_image(x, "x");
    spectral::validate_image(y, "y");
    if (!x.same_shape(y)) throw InvalidArgument("x and y dimensions differ");
}

double mean_of(const RealGrid& g) {
    double sum = 0.0;
    for (double v : g.values()) sum += v;
    return sum / static_cast<double>(g.size());
}

void require_variance(const RealGrid& g, const char* what) {
    const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
    const double peak = std::max(std::abs(*lo), std::abs(*hi));
    // A spread at rounding level is what a constant image leaves behind.
    if (!(*hi - *lo > 64.0 * std::numeric_limits<double>::epsilon() * peak)) {
        throw DegenerateInput(std::string(what) + " has zero variance");
    }
}

/// Subtract the mean, then taper with the Gaussian window.
RealGrid centered_tapered(const RealGrid& g, const Window& win) {
    const double mu = mean_of(g);
    RealGrid out(g.rows(), g.cols());
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.values()[i] = (g.values()[i] - mu) * win.values.values()[i];
    }
    return out;
}

/// Removes the window-weighted mean so the windowed DC bin vanishes;
/// otherwise the DC lobe, identical in both spectra, dominates the small
/// radii and drags the log-polar peak toward zero displacement.
RealGrid without_windowed_mean(const RealGrid& g, const Window& win) {
    double weighted = 0.0, total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        weighted += g.values()[i] * win.values.values()[i];
        total += win.values.values()[i];
    }
    const double mu = weighted / total;
    RealGrid out = g;
    for (auto& v : out.values()) v -= mu;
    return out;
}

struct LogPolarCorrelation {
    optimizer::GccObjective objective;
    Vec2 init;
    double rho_step = 0.0;
    double phi_step = 0.0;
};

LogPolarCorrelation correlate_log_polar(const Image& x, const Image& y, const EstimateConfig& cfg) {
    require_pair(x, y);
    require_variance(x, "x");
    require_variance(y, "y");

    const Window win = spectral::gaussian_window(x.rows(), x.cols());
    const auto lp_x = logpolar::log_polar_transform(
        spectral::amplitude(spectral::windowed_dft(without_windowed_mean(x, win), win)));
    const auto lp_y = logpolar::log_polar_transform(
        spectral::amplitude(spectral::windowed_dft(without_windowed_mean(y, win), win)));
    require_variance(lp_x.values, "log-polar amplitude of x");
    require_variance(lp_y.values, "log-polar amplitude of y");

    const Window lp_win = spectral::gaussian_window(lp_x.values.rows(), lp_x.values.cols());
    const auto cs = spectral::cross_spectrum(spectral::dft(centered_tapered(lp_x.values, lp_win)),
                                             spectral::dft(centered_tapered(lp_y.values, lp_win)),
                                             cfg.weights);
    const auto surface = spectral::discrete_correlation(cs);

    // Amplitude spectra of real images repeat every pi in phi; keep the
    // initial phi lag within a quarter turn of the grid.
    const double cols = static_cast<double>(cs.cols());
    double phi0 = static_cast<double>(surface.peak.l);
    if (phi0 > cols / 4.0) phi0 -= cols / 2.0;
    if (phi0 <= -cols / 4.0) phi0 += cols / 2.0;

    return {optimizer::build_objective(cs), {static_cast<double>(surface.peak.k), phi0},
            lp_x.rho_step, lp_x.phi_step};
}

EstimateResult to_estimate(const LogPolarCorrelation& corr, Vec2 lag, double value, int iterations,
                           bool converged) {
    EstimateResult r;
    r.rho_hat = lag.x1;
    r.phi_hat = lag.x2;
    r.rho_step = corr.rho_step;
    r.phi_step = corr.phi_step;
    r.scale = std::exp(corr.rho_step * lag.x1);
    r.theta = wrap_half_turn(corr.phi_step * lag.x2);
    r.objective_value = value;
    r.iterations = iterations;
    r.converged = converged;
    return r;
}

}  // namespace

void validate(const SimilarityParams& params) {
    if (!std::isfinite(params.scale) || !(params.scale > 0.0)) {
        throw InvalidArgument("similarity: scale must be positive and finite");
    }
    if (!std::isfinite(params.theta) || !std::isfinite(params.shift.x1) ||
        !std::isfinite(params.shift.x2)) {
        throw InvalidArgument("similarity: non-finite parameter");
    }
}

double wrap_half_turn(double theta) {
    constexpr double pi = std::numbers::pi;
    double t = std::fmod(theta + pi / 2.0, pi);
    if (t <= 0.0) t += pi;
    return t - pi / 2.0;
}

Image apply_similarity(const Image& img, const SimilarityParams& params) {
    return apply_similarity_about(img, params, {0.0, 0.0});
}

Image apply_similarity_about(const Image& img, const SimilarityParams& params, Vec2 center) {
    validate(params);
    const double c = std::cos(params.theta), s = std::sin(params.theta);
    const double a11 = params.scale * c, a12 = params.scale * s;
    const double a21 = -params.scale * s, a22 = params.scale * c;
    Image out(img.rows(), img.cols());
    for (std::size_t r = 0; r < img.rows(); ++r) {
        const double q1 = static_cast<double>(r) - center.x1;
        for (std::size_t col = 0; col < img.cols(); ++col) {
            const double q2 = static_cast<double>(col) - center.x2;
            const double u = center.x1 + a11 * q1 + a12 * q2 + params.shift.x1;
            const double v = center.x2 + a21 * q1 + a22 * q2 + params.shift.x2;
            out(r, col) = logpolar::bicubic_sample(img, u, v);
        }
    }
    return out;
}

Image undo_scale_rotation(const Image& target, double scale, double theta) {
    const Vec2 center{static_cast<double>(target.rows() / 2), static_cast<double>(target.cols() / 2)};
    return apply_similarity_about(target, SimilarityParams{1.0 / scale, -theta, {}}, center);
}

EstimateResult estimate_scale_rotation(const Image& x, const Image& y, const EstimateConfig& cfg) {
    const auto corr = correlate_log_polar(x, y, cfg);
    const auto best = optimizer::maximize(corr.objective, corr.init, cfg.tol, cfg.max_iter);
    return to_estimate(corr, best.p, best.value, best.iterations, best.converged);
}

EstimateResult baseline_scale_rotation(const Image& x, const Image& y, const EstimateConfig& cfg) {
    const auto corr = correlate_log_polar(x, y, cfg);
    return to_estimate(corr, corr.init, optimizer::evaluate(corr.objective, corr.init), 0, true);
}

TranslationEstimate estimate_translation(const Image& x, const Image& y, const EstimateConfig& cfg) {
    require_pair(x, y);
    require_variance(x, "x");
    require_variance(y, "y");
    const auto x_spec = spectral::dft(centered_tapered(x, spectral::gaussian_window(x.rows(), x.cols())));

    // A window fixed in place biases the peak toward zero lag. Re-center the
    // window over y on the current estimate until the estimate settles.
    constexpr int kPasses = 6;
    TranslationEstimate est{};
    Vec2 shift{};
    for (int pass = 0; pass < kPasses; ++pass) {
        const Window win = spectral::gaussian_window(y.rows(), y.cols(), Vec2{-shift.x1, -shift.x2});
        const auto cs = spectral::cross_spectrum(x_spec, spectral::dft(centered_tapered(y, win)), cfg.weights);
        const auto obj = optimizer::build_objective(cs);
        Vec2 init{-shift.x1, -shift.x2};
        if (pass == 0) {
            const auto surface = spectral::discrete_correlation(cs);
            init = {static_cast<double>(surface.peak.k), static_cast<double>(surface.peak.l)};
        }
        const auto best = optimizer::maximize(obj, init, cfg.tol, cfg.max_iter);
        // The synthesis peaks at -shift.
        const Vec2 next{-best.p.x1, -best.p.x2};
        const double moved = norm(next - shift);
        est = {next, best.value, est.iterations + best.iterations, best.converged};
        shift = next;
        if (moved < 1e-6) break;
    }
    return est;
}

}  // namespace fmreg::registration
