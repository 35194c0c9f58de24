#pragma once

#include <ostream>
#include <string>

#include "fmreg/registration.hpp"
#include "fmreg/simulation.hpp"

namespace fmreg::report {

/// Reference averages of absolute errors reported for the original
/// five-pair natural-image protocol. Printed for comparison only.
struct ReferenceAverages {
    static constexpr double scale_proposed = 0.055;
    static constexpr double angle_deg_proposed = 1.195;
    static constexpr double scale_baseline = 0.076;
    static constexpr double angle_deg_baseline = 1.692;
};

/// Free-form description of the run, echoed in the report header.
struct RunInfo {
    std::string source;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string weights;
};

/// One JSON object: scale, angle_deg, rho_hat, phi_hat, objective_value,
/// iterations, converged, method. Baseline lags are written as integers.
std::string estimate_json(const registration::EstimateResult& r, const std::string& method);

/// Header row plus one data row with the same keys as estimate_json.
std::string estimate_csv(const registration::EstimateResult& r, const std::string& method);

/// Per-trial rows followed by "average" and "variance" rows. Lines starting
/// with '#' precede the header and describe the run.
void write_trials_csv(std::ostream& out, const simulation::TrialReport& report, const RunInfo& info);

void write_trials_json(std::ostream& out, const simulation::TrialReport& report, const RunInfo& info);

}  // namespace fmreg::report
