#pragma once

#include <cstddef>

#include "fmreg/grid.hpp"
#include "fmreg/spectral.hpp"

namespace fmreg::logpolar {

/// Cubic convolution kernel with a = -0.5.
double cubic_kernel(double t);

/// Separable cubic convolution at fractional position (u = row, v = column).
/// Support taps outside the grid contribute 0. Requires a grid of at least
/// 4x4 and finite (u, v).
double bicubic_sample(const RealGrid& grid, double u, double v);

/// Amplitude resampled on rows rho_i = rho_step * i (i = 1..N) and columns
/// phi_j = phi_step * j (j = 0..M-1). Rows grow with radius; phi runs
/// counter-clockwise from the +omega_1 (row) axis toward +omega_2.
struct LogPolarGrid {
    RealGrid values;
    double rho_step = 0.0;
    double phi_step = 0.0;

    double rho(std::size_t row) const { return rho_step * static_cast<double>(row + 1); }
    double phi(std::size_t col) const { return phi_step * static_cast<double>(col); }
};

double rho_step_for(std::size_t rows, std::size_t cols);
double phi_step_for(std::size_t cols);

/// Resamples a DC-centered amplitude grid. Radii beyond the grid give 0;
/// cubic overshoot below zero is clipped to 0.
LogPolarGrid log_polar_transform(const spectral::AmplitudeGrid& amp);

}  // namespace fmreg::logpolar
