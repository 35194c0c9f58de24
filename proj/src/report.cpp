#include "fmreg/report.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace fmreg::report {
namespace {

using nlohmann::ordered_json;

double to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

ordered_json estimate_object(const registration::EstimateResult& r, const std::string& method) {
    ordered_json j;
    j["scale"] = r.scale;
    j["angle_deg"] = to_deg(r.theta);
    if (method == "baseline") {
        j["rho_hat"] = std::lround(r.rho_hat);
        j["phi_hat"] = std::lround(r.phi_hat);
    } else {
        j["rho_hat"] = r.rho_hat;
        j["phi_hat"] = r.phi_hat;
    }
    j["objective_value"] = r.objective_value;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["method"] = method;
    return j;
}

}  // namespace

std::string estimate_json(const registration::EstimateResult& r, const std::string& method) {
    return estimate_object(r, method).dump();
}

std::string estimate_csv(const registration::EstimateResult& r, const std::string& method) {
    std::ostringstream out;
    out << "scale,angle_deg,rho_hat,phi_hat,objective_value,iterations,converged,method\n";
    out << fmt(r.scale) << ',' << fmt(to_deg(r.theta)) << ',';
    if (method == "baseline") {
        out << std::lround(r.rho_hat) << ',' << std::lround(r.phi_hat) << ',';
    } else {
        out << fmt(r.rho_hat) << ',' << fmt(r.phi_hat) << ',';
    }
    out << fmt(r.objective_value) << ',' << r.iterations << ',' << (r.converged ? "true" : "false")
        << ',' << method << '\n';
    return out.str();
}

void write_trials_csv(std::ostream& out, const simulation::TrialReport& report, const RunInfo& info) {
    using R = ReferenceAverages;
    out << "# source=" << info.source << " n=" << info.n << " seed=" << info.seed
        << " weights=" << info.weights << '\n';
    out << "# variance rows use the population variance (divide by count)\n";
    out << "# failed trials (excluded from aggregates): " << report.failed << '\n';
    out << "# measured averages: proposed scale " << fmt(report.scale_proposed.mean) << " angle "
        << fmt(report.angle_proposed.mean) << " deg; baseline scale " << fmt(report.scale_baseline.mean)
        << " angle " << fmt(report.angle_baseline.mean) << " deg\n";
    out << "# reference averages (5 natural-image pairs, not reproducible here): proposed scale "
        << R::scale_proposed << " angle " << R::angle_deg_proposed << " deg; baseline scale "
        << R::scale_baseline << " angle " << R::angle_deg_baseline << " deg\n";
    out << "trial,truth_s,truth_theta_deg,est_s_prop,est_theta_prop,est_s_base,est_theta_base,"
           "err_s_prop,err_theta_prop,err_s_base,err_theta_base\n";
    for (const auto& r : report.results) {
        out << r.index << ',' << fmt(r.truth.scale) << ',' << fmt(to_deg(r.truth.theta)) << ',';
        if (r.failed) {
            out << "nan,nan,nan,nan,nan,nan,nan,nan\n";
            continue;
        }
        out << fmt(r.proposed.scale) << ',' << fmt(to_deg(r.proposed.theta)) << ','
            << fmt(r.baseline.scale) << ',' << fmt(to_deg(r.baseline.theta)) << ','
            << fmt(r.err_scale_proposed) << ',' << fmt(r.err_angle_deg_proposed) << ','
            << fmt(r.err_scale_baseline) << ',' << fmt(r.err_angle_deg_baseline) << '\n';
    }
    out << "average,,,,,,," << fmt(report.scale_proposed.mean) << ',' << fmt(report.angle_proposed.mean)
        << ',' << fmt(report.scale_baseline.mean) << ',' << fmt(report.angle_baseline.mean) << '\n';
    out << "variance,,,,,,," << fmt(report.scale_proposed.variance) << ','
        << fmt(report.angle_proposed.variance) << ',' << fmt(report.scale_baseline.variance) << ','
        << fmt(report.angle_baseline.variance) << '\n';
}

void write_trials_json(std::ostream& out, const simulation::TrialReport& report, const RunInfo& info) {
    using R = ReferenceAverages;
    auto num = [](double v) { return std::isnan(v) ? ordered_json(nullptr) : ordered_json(v); };
    auto stats = [&](const simulation::ErrorStats& s) {
        return ordered_json{{"mean", num(s.mean)}, {"variance", num(s.variance)}};
    };
    ordered_json j;
    j["source"] = info.source;
    j["n"] = info.n;
    j["seed"] = info.seed;
    j["weights"] = info.weights;
    j["variance_definition"] = "population";
    j["failed"] = report.failed;
    j["reference_averages"] = {{"scale_proposed", R::scale_proposed},
                               {"angle_deg_proposed", R::angle_deg_proposed},
                               {"scale_baseline", R::scale_baseline},
                               {"angle_deg_baseline", R::angle_deg_baseline}};
    ordered_json trials = ordered_json::array();
    for (const auto& r : report.results) {
        ordered_json t;
        t["trial"] = r.index;
        t["truth"] = {{"scale", r.truth.scale},
                      {"angle_deg", to_deg(r.truth.theta)},
                      {"shift", {r.truth.shift.x1, r.truth.shift.x2}}};
        t["failed"] = r.failed;
        if (r.failed) {
            t["failure"] = r.failure;
        } else {
            t["proposed"] = estimate_object(r.proposed, "proposed");
            t["baseline"] = estimate_object(r.baseline, "baseline");
            t["errors"] = {{"scale_proposed", r.err_scale_proposed},
                           {"angle_deg_proposed", r.err_angle_deg_proposed},
                           {"scale_baseline", r.err_scale_baseline},
                           {"angle_deg_baseline", r.err_angle_deg_baseline}};
        }
        trials.push_back(std::move(t));
    }
    j["trials"] = std::move(trials);
    j["aggregates"] = {{"scale_proposed", stats(report.scale_proposed)},
                       {"angle_deg_proposed", stats(report.angle_proposed)},
                       {"scale_baseline", stats(report.scale_baseline)},
                       {"angle_deg_baseline", stats(report.angle_baseline)}};
    out << j.dump(2) << '\n';
}

}  // namespace fmreg::report
