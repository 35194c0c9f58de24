#include "fmreg/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "fft.hpp"
#include "fmreg/errors.hpp"

namespace fmreg {
namespace detail {

namespace {
// The FFTW planner is not reentrant; execution on distinct arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

void fft2(ComplexGrid& data, bool inverse) {
    if (data.empty()) return;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_2d(static_cast<int>(data.rows()), static_cast<int>(data.cols()), buf,
                                buf, inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

}  // namespace detail

namespace spectral {

void validate_image(const RealGrid& img, const char* what) {
    if (img.rows() < 8 || img.cols() < 8 || img.rows() % 2 != 0 || img.cols() % 2 != 0) {
        throw InvalidArgument(std::string(what) + ": dimensions must be even and >= 8, got " +
                              std::to_string(img.rows()) + "x" + std::to_string(img.cols()));
    }
    for (double v : img.values()) {
        if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + ": non-finite sample");
    }
}

long signed_index(std::size_t index, std::size_t n) {
    const long i = static_cast<long>(index);
    const long half = static_cast<long>(n / 2);
    return i > half ? i - static_cast<long>(n) : i;
}

std::size_t natural_index(long k, std::size_t n) {
    const long len = static_cast<long>(n);
    long r = k % len;
    if (r < 0) r += len;
    return static_cast<std::size_t>(r);
}

long wrap_centered(long value, std::size_t n) {
    return signed_index(natural_index(value, n), n);
}

Window gaussian_window(std::size_t rows, std::size_t cols) {
    return gaussian_window(rows, cols, Vec2{});
}

Window gaussian_window(std::size_t rows, std::size_t cols, Vec2 offset) {
    if (rows < 8 || cols < 8 || rows % 2 != 0 || cols % 2 != 0) {
        throw InvalidArgument("gaussian_window: dimensions must be even and >= 8");
    }
    if (!std::isfinite(offset.x1) || !std::isfinite(offset.x2)) {
        throw InvalidArgument("gaussian_window: non-finite offset");
    }
    Window w;
    w.sigma1 = static_cast<double>(rows) / 5.0;
    w.sigma2 = static_cast<double>(cols) / 5.0;
    w.values = RealGrid(rows, cols);
    const double n1 = static_cast<double>(rows), n2 = static_cast<double>(cols);
    const double c1 = static_cast<double>(rows / 2) + offset.x1;
    const double c2 = static_cast<double>(cols / 2) + offset.x2;
    const bool centered = offset.x1 == 0.0 && offset.x2 == 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        double d1 = static_cast<double>(r) - c1;
        if (!centered) d1 -= n1 * std::round(d1 / n1);
        for (std::size_t c = 0; c < cols; ++c) {
            double d2 = static_cast<double>(c) - c2;
            if (!centered) d2 -= n2 * std::round(d2 / n2);
            w.values(r, c) = std::exp(-(d1 * d1 / (2.0 * w.sigma1 * w.sigma1) +
                                        d2 * d2 / (2.0 * w.sigma2 * w.sigma2)));
        }
    }
    return w;
}

Window flat_window(std::size_t rows, std::size_t cols) {
    return Window{RealGrid(rows, cols, 1.0), std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
}

Spectrum windowed_dft(const RealGrid& img, const Window& win) {
    if (!img.same_shape(win.values)) {
        throw InvalidArgument("windowed_dft: image and window dimensions differ");
    }
    validate_image(img);
    ComplexGrid buf(img.rows(), img.cols());
    for (std::size_t i = 0; i < img.size(); ++i) {
        buf.values()[i] = Complex(win.values.values()[i] * img.values()[i], 0.0);
    }
    detail::fft2(buf, false);
    return Spectrum{std::move(buf)};
}

Spectrum dft(const RealGrid& img) {
    return windowed_dft(img, flat_window(img.rows(), img.cols()));
}

AmplitudeGrid amplitude(const Spectrum& spec) {
    const std::size_t n = spec.rows(), m = spec.cols();
    RealGrid out(n, m);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t rr = (r + n / 2) % n;
        for (std::size_t c = 0; c < m; ++c) {
            out(rr, (c + m / 2) % m) = std::abs(spec.coeffs(r, c));
        }
    }
    return AmplitudeGrid{std::move(out)};
}

CrossSpectrum cross_spectrum(const Spectrum& x, const Spectrum& y, WeightScheme scheme) {
    if (!x.coeffs.same_shape(y.coeffs)) {
        throw InvalidArgument("cross_spectrum: spectra dimensions differ");
    }
    CrossSpectrum cs{ComplexGrid(x.rows(), x.cols()), scheme};
    auto out = cs.coeffs.values();
    const auto xs = x.coeffs.values();
    const auto ys = y.coeffs.values();
    double largest = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::conj(xs[i]) * ys[i];
        largest = std::max(largest, std::abs(out[i]));
    }
    if (scheme == WeightScheme::Phat) {
        const double floor = largest * std::numeric_limits<double>::epsilon();
        for (auto& v : out) {
            const double mag = std::abs(v);
            v = (mag > floor && mag > 0.0) ? v / mag : Complex(0.0, 0.0);
        }
    }
    return cs;
}

CorrelationSurface discrete_correlation(const CrossSpectrum& cs) {
    const std::size_t n = cs.rows(), m = cs.cols();
    ComplexGrid buf = cs.coeffs;
    detail::fft2(buf, true);
    const double scale = 1.0 / static_cast<double>(n * m);

    CorrelationSurface out;
    out.grid = RealGrid(n, m);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_r = 0, best_c = 0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            const Complex v = buf(r, c) * scale;
            out.grid(r, c) = v.real();
            out.max_imag = std::max(out.max_imag, std::abs(v.imag()));
            if (v.real() > best) {
                best = v.real();
                best_r = r;
                best_c = c;
            }
        }
    }
    out.peak = {signed_index(best_r, n), signed_index(best_c, m)};
    out.shift = {wrap_centered(-out.peak.k, n), wrap_centered(-out.peak.l, m)};
    return out;
}

}  // namespace spectral
}  // namespace fmreg
