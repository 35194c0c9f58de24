#pragma once

#include <cstddef>
#include <vector>

#include "fmreg/grid.hpp"
#include "fmreg/spectral.hpp"

// Continuous generalized cross-correlation and its maximization by an
// auxiliary-function (minorize-maximize) iteration.
//
// The objective is the real part of the cross-spectrum synthesis evaluated
// at a real-valued lag p:
//
//   Phi(p) = 1/(NM) * sum_t A_t cos(<omega_t, p> + psi_t)
//
// Each cosine is minorized around the current iterate p0 by the quadratic
//
//   cos x >= cos x0 - sinc(x0)/2 * (x^2 - x0^2),
//
// where x is the phase measured from its nearest multiple of 2*pi at p0
// (so |x0| <= pi) and sinc(x0) = sin(x0)/x0. The bound touches cos at
// x = x0, so each update is a weighted least-squares solve with guaranteed
// ascent.

namespace fmreg::optimizer {

struct Term {
    Vec2 omega;       ///< angular frequency (rad/sample)
    double amplitude;  ///< >= 0
    double phase;      ///< radians
};

struct GccObjective {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Term> terms;

    double norm_factor() const { return 1.0 / static_cast<double>(rows * cols); }

    /// (1/NM) sum A_t; no value of the objective exceeds it.
    double upper_bound() const;
};

/// Cosine-sum form of the cross-spectrum synthesis. Bins (k,l) and (-k,-l)
/// that both lie in K x L merge into one term; bins on the positive Nyquist
/// row or column keep their own term. Zero-amplitude terms are dropped.
/// Throws ContractViolation if the cross-spectrum departs from conjugate
/// symmetry by more than 1e-6 of its largest bin.
GccObjective build_objective(const spectral::CrossSpectrum& cs);

double evaluate(const GccObjective& obj, Vec2 p);

struct MmState {
    Vec2 p;
    double value = 0.0;
    int iteration = 0;
    /// Per-term 2*pi multiples chosen at the expansion point of the last step.
    std::vector<long> aux_params;
};

MmState initial_state(const GccObjective& obj, Vec2 p);

/// Value of the surrogate built around `expansion` at point p. Satisfies
/// surrogate <= evaluate everywhere, with equality at p = expansion.
double surrogate(const GccObjective& obj, Vec2 expansion, Vec2 p);

/// One auxiliary update followed by the closed-form surrogate maximizer.
/// Throws DegenerateObjective when the 2x2 normal matrix has condition
/// number above 1e12 (or is zero). A candidate whose computed value falls
/// below the current one (rounding at a fixed point) is not taken.
MmState mm_step(const GccObjective& obj, const MmState& state);

struct MaximizeResult {
    Vec2 p;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Iterates mm_step until the step norm drops below tol or max_iter steps
/// have been taken. Exhaustion is reported through `converged`.
MaximizeResult maximize(const GccObjective& obj, Vec2 init, double tol = 1e-8,
                        int max_iter = 100);

}  // namespace fmreg::optimizer
