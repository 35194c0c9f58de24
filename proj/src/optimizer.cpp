#include "fmreg/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fmreg/errors.hpp"

namespace fmreg::optimizer {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxCondition = 1e12;
constexpr double kSymmetryTolerance = 1e-6;

double sinc(double x) {
    return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

void require_finite(Vec2 p, const char* where) {
    if (!std::isfinite(p.x1) || !std::isfinite(p.x2)) {
        throw InvalidArgument(std::string(where) + ": non-finite lag");
    }
}

}  // namespace

double GccObjective::upper_bound() const {
    double sum = 0.0;
    for (const auto& t : terms) sum += t.amplitude;
    return sum * norm_factor();
}

GccObjective build_objective(const spectral::CrossSpectrum& cs) {
    using spectral::signed_index;
    const std::size_t n = cs.rows(), m = cs.cols();
    const long half_n = static_cast<long>(n / 2);
    const long half_m = static_cast<long>(m / 2);

    double largest = 0.0;
    for (const auto& v : cs.coeffs.values()) largest = std::max(largest, std::abs(v));
    double asym = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            const Complex partner = cs.coeffs((n - r) % n, (m - c) % m);
            asym = std::max(asym, std::abs(partner - std::conj(cs.coeffs(r, c))));
        }
    }
    if (asym > kSymmetryTolerance * largest) {
        std::ostringstream msg;
        msg << "build_objective: cross-spectrum is not conjugate-symmetric (deviation " << asym
            << " vs largest bin " << largest << ")";
        throw ContractViolation(msg.str());
    }

    GccObjective obj;
    obj.rows = n;
    obj.cols = m;
    auto push = [&](long k, long l, Complex c) {
        const double a = std::abs(c);
        if (a == 0.0) return;
        obj.terms.push_back(Term{{kTwoPi * static_cast<double>(k) / static_cast<double>(n),
                                  kTwoPi * static_cast<double>(l) / static_cast<double>(m)},
                                 a, std::arg(c)});
    };

    for (std::size_t r = 0; r < n; ++r) {
        const long k = signed_index(r, n);
        for (std::size_t c = 0; c < m; ++c) {
            const long l = signed_index(c, m);
            const Complex v = cs.coeffs(r, c);
            if (k == half_n || l == half_m) {
                // Partner (-k, -l) falls outside K x L.
                push(k, l, v);
            } else if (k > 0 || (k == 0 && l > 0)) {
                const Complex partner = cs.coeffs((n - r) % n, (m - c) % m);
                push(k, l, v + std::conj(partner));
            } else if (k == 0 && l == 0) {
                push(0, 0, v);
            }
        }
    }
    return obj;
}

double evaluate(const GccObjective& obj, Vec2 p) {
    require_finite(p, "evaluate");
    double sum = 0.0;
    for (const auto& t : obj.terms) sum += t.amplitude * std::cos(dot(t.omega, p) + t.phase);
    return sum * obj.norm_factor();
}

MmState initial_state(const GccObjective& obj, Vec2 p) {
    return MmState{p, evaluate(obj, p), 0, {}};
}

double surrogate(const GccObjective& obj, Vec2 expansion, Vec2 p) {
    require_finite(expansion, "surrogate");
    require_finite(p, "surrogate");
    double sum = 0.0;
    for (const auto& t : obj.terms) {
        const double arg0 = dot(t.omega, expansion) + t.phase;
        const double wrap = kTwoPi * std::round(arg0 / kTwoPi);
        const double x0 = arg0 - wrap;
        const double x = dot(t.omega, p) + t.phase - wrap;
        sum += t.amplitude * (std::cos(x0) - 0.5 * sinc(x0) * (x * x - x0 * x0));
    }
    return sum * obj.norm_factor();
}

MmState mm_step(const GccObjective& obj, const MmState& state) {
    require_finite(state.p, "mm_step");
    MmState next;
    next.aux_params.resize(obj.terms.size());

    // Normal equations of the weighted least-squares surrogate, solved for
    // the increment: H d = -sum A sinc(x0) omega x0, x0 the wrapped argument.
    double h11 = 0.0, h12 = 0.0, h22 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < obj.terms.size(); ++i) {
        const auto& t = obj.terms[i];
        const double arg0 = dot(t.omega, state.p) + t.phase;
        const long wraps = std::lround(arg0 / kTwoPi);
        next.aux_params[i] = wraps;
        const double x0 = arg0 - kTwoPi * static_cast<double>(wraps);
        const double weight = t.amplitude * sinc(x0);
        h11 += weight * t.omega.x1 * t.omega.x1;
        h12 += weight * t.omega.x1 * t.omega.x2;
        h22 += weight * t.omega.x2 * t.omega.x2;
        g1 += weight * t.omega.x1 * x0;
        g2 += weight * t.omega.x2 * x0;
    }

    // Symmetric 2x2 eigen-decomposition for the conditioning check.
    const double mean = 0.5 * (h11 + h22);
    const double radius = std::hypot(0.5 * (h11 - h22), h12);
    const double lmax = mean + radius;
    const double lmin = mean - radius;
    if (!(lmax > 0.0) || lmin * kMaxCondition <= lmax) {
        Vec2 dir;
        if (radius == 0.0) {
            dir = {1.0, 0.0};
        } else if (std::abs(h12) > 0.0) {
            dir = {h12, lmin - h11};
        } else {
            dir = h11 < h22 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
        }
        dir = (1.0 / norm(dir)) * dir;
        std::ostringstream msg;
        msg << "mm_step: degenerate objective, no curvature along direction (" << dir.x1 << ", "
            << dir.x2 << "); eigenvalues " << lmin << ", " << lmax;
        throw DegenerateObjective(msg.str(), dir.x1, dir.x2);
    }

    const double det = h11 * h22 - h12 * h12;
    next.p = state.p + Vec2{-(h22 * g1 - h12 * g2) / det, -(h11 * g2 - h12 * g1) / det};
    next.value = evaluate(obj, next.p);
    // Ascent is exact in real arithmetic; a lower value is rounding noise
    // at a fixed point, so stay put.
    if (!(next.value >= state.value)) {
        next.p = state.p;
        next.value = state.value;
    }
    next.iteration = state.iteration + 1;
    return next;
}

MaximizeResult maximize(const GccObjective& obj, Vec2 init, double tol, int max_iter) {
    require_finite(init, "maximize");
    MmState state = initial_state(obj, init);
    MaximizeResult out{state.p, state.value, 0, false};
    for (int i = 0; i < max_iter; ++i) {
        MmState next = mm_step(obj, state);
        const double step = norm(next.p - state.p);
        state = std::move(next);
        out = {state.p, state.value, state.iteration, false};
        if (step < tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace fmreg::optimizer
