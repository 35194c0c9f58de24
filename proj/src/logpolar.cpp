#include "fmreg/logpolar.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "fmreg/errors.hpp"

namespace fmreg::logpolar {

double cubic_kernel(double t) {
    constexpr double a = -0.5;
    const double x = std::abs(t);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

double bicubic_sample(const RealGrid& grid, double u, double v) {
    if (!std::isfinite(u) || !std::isfinite(v)) {
        throw InvalidArgument("bicubic_sample: non-finite coordinate");
    }
    if (grid.rows() < 4 || grid.cols() < 4) {
        throw InvalidArgument("bicubic_sample: grid must be at least 4x4");
    }
    const long rows = static_cast<long>(grid.rows());
    const long cols = static_cast<long>(grid.cols());
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    // Entire support outside the grid.
    if (fu < -3.0 || fu > static_cast<double>(rows + 1) || fv < -3.0 ||
        fv > static_cast<double>(cols + 1)) {
        return 0.0;
    }
    const long r0 = static_cast<long>(fu) - 1;
    const long c0 = static_cast<long>(fv) - 1;

    std::array<double, 4> wu{}, wv{};
    for (int i = 0; i < 4; ++i) {
        wu[i] = cubic_kernel(u - static_cast<double>(r0 + i));
        wv[i] = cubic_kernel(v - static_cast<double>(c0 + i));
    }

    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        const long r = r0 + i;
        if (r < 0 || r >= rows) continue;
        double row_acc = 0.0;
        for (int j = 0; j < 4; ++j) {
            const long c = c0 + j;
            if (c < 0 || c >= cols) continue;
            row_acc += wv[j] * grid(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
        acc += wu[i] * row_acc;
    }
    return acc;
}

double rho_step_for(std::size_t rows, std::size_t cols) {
    return std::log(static_cast<double>(std::min(rows, cols))) / static_cast<double>(rows);
}

double phi_step_for(std::size_t cols) {
    return 2.0 * std::numbers::pi / static_cast<double>(cols);
}

LogPolarGrid log_polar_transform(const spectral::AmplitudeGrid& amp) {
    const std::size_t n = amp.values.rows(), m = amp.values.cols();
    LogPolarGrid out;
    out.rho_step = rho_step_for(n, m);
    out.phi_step = phi_step_for(m);
    out.values = RealGrid(n, m);
    const double c1 = static_cast<double>(n / 2);
    const double c2 = static_cast<double>(m / 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double radius = std::exp(out.rho(i));
        for (std::size_t j = 0; j < m; ++j) {
            const double phi = out.phi(j);
            const double v = bicubic_sample(amp.values, c1 + radius * std::cos(phi),
                                            c2 + radius * std::sin(phi));
            out.values(i, j) = v > 0.0 ? v : 0.0;
        }
    }
    return out;
}

}  // namespace fmreg::logpolar
