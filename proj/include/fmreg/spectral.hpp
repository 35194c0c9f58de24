#pragma once

#include <cstddef>

#include "fmreg/grid.hpp"

// Windowed 2D DFT, amplitude spectra, weighted cross-spectra and the
// integer-lag correlation surface.
//
// Frequency indices follow the signed sets K = {-N/2+1, ..., N/2} and
// L = {-M/2+1, ..., M/2}; bin (k, l) has angular frequency
// (2*pi*k/N, 2*pi*l/M). Spectra are stored in natural DFT order (bin k at
// row k mod N). Only amplitude() produces a DC-centered layout.

namespace fmreg::spectral {

/// Throws InvalidArgument unless rows, cols >= 8, both even, and every
/// sample finite. `what` names the argument in the message.
void validate_image(const RealGrid& img, const char* what = "image");

/// Maps a natural-order index in [0, n) to its signed frequency in
/// (-n/2, n/2].
long signed_index(std::size_t index, std::size_t n);

/// Inverse of signed_index.
std::size_t natural_index(long k, std::size_t n);

/// Wraps any integer into (-n/2, n/2].
long wrap_centered(long value, std::size_t n);

struct Window {
    RealGrid values;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
};

/// Separable Gaussian with sigma = (N/5, M/5), peak 1 at (N/2, M/2).
Window gaussian_window(std::size_t rows, std::size_t cols);

/// Same window with its peak moved by `offset`, distances taken circularly.
Window gaussian_window(std::size_t rows, std::size_t cols, Vec2 offset);

/// All-ones window.
Window flat_window(std::size_t rows, std::size_t cols);

struct Spectrum {
    ComplexGrid coeffs;

    std::size_t rows() const { return coeffs.rows(); }
    std::size_t cols() const { return coeffs.cols(); }

    /// Coefficient at signed frequency (k, l); indices are taken modulo N, M.
    Complex at(long k, long l) const {
        return coeffs(natural_index(k, rows()), natural_index(l, cols()));
    }
};

/// Sum over p of win[p] * img[p] * exp(-j <omega_kl, p>).
Spectrum windowed_dft(const RealGrid& img, const Window& win);

/// Plain forward DFT (flat window).
Spectrum dft(const RealGrid& img);

/// Magnitude spectrum with the (0, 0) bin moved to grid position (N/2, M/2).
struct AmplitudeGrid {
    RealGrid values;
};

AmplitudeGrid amplitude(const Spectrum& spec);

enum class WeightScheme {
    Standard,  ///< w = 1, plain cross-correlation
    Phat,      ///< w = 1 / |X* Y|, phase-only correlation
};

struct CrossSpectrum {
    ComplexGrid coeffs;  ///< natural DFT order
    WeightScheme scheme = WeightScheme::Standard;

    std::size_t rows() const { return coeffs.rows(); }
    std::size_t cols() const { return coeffs.cols(); }
};

/// w_kl * conj(X(k,l)) * Y(k,l). Under Phat, bins whose product magnitude is
/// zero (below double rounding of the largest bin) are set to exactly 0.
CrossSpectrum cross_spectrum(const Spectrum& x, const Spectrum& y, WeightScheme scheme);

struct CorrelationSurface {
    /// grid(p1, p2) = Re (1/NM) sum_kl cs(k,l) exp(j <omega_kl, p>), p in
    /// natural order.
    RealGrid grid;
    /// Location of the maximum, in centered coordinates (K x L).
    IntLag peak;
    /// Integer shift with y[p] ~ x[p + shift] (circularly), wrapped into K x L.
    /// Equal to -peak modulo the grid size.
    IntLag shift;
    /// Largest |imaginary part| of the synthesis before taking the real part.
    double max_imag = 0.0;
};

CorrelationSurface discrete_correlation(const CrossSpectrum& cs);

}  // namespace fmreg::spectral
