#include "fmreg/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "fmreg/errors.hpp"

namespace fmreg::simulation {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kParamStream = 1;
constexpr std::uint64_t kCropStream = 2;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double draw(std::mt19937_64& e, Range r) { return r.lo + (r.hi - r.lo) * uniform01(e); }

double max_abs(Range r) { return std::max(std::abs(r.lo), std::abs(r.hi)); }

void check_range(Range r, const char* name) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
        throw InvalidArgument(std::string("trial spec: invalid range for ") + name);
    }
}

std::size_t margin_for(const TrialSpec& spec) {
    const double half = static_cast<double>(spec.crop_size) / 2.0;
    const double reach = spec.ranges.scale.hi * half * std::numbers::sqrt2 +
                         std::hypot(max_abs(spec.ranges.p1), max_abs(spec.ranges.p2)) + 3.0;
    return static_cast<std::size_t>(std::ceil(std::max(half, reach)));
}

}  // namespace

void validate(const TrialSpec& spec) {
    check_range(spec.ranges.theta_deg, "theta_deg");
    check_range(spec.ranges.scale, "s");
    check_range(spec.ranges.p1, "p1");
    check_range(spec.ranges.p2, "p2");
    if (!(spec.ranges.scale.lo > 0.0)) throw InvalidArgument("trial spec: scale range must be positive");
    if (spec.crop_size < 16 || spec.crop_size % 2 != 0) {
        throw InvalidArgument("trial spec: crop size must be even and >= 16");
    }
}

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
    const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ index) ^ stream);
    return std::mt19937_64(key);
}

double uniform01(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

registration::SimilarityParams random_params(const TrialSpec& spec, std::uint64_t index) {
    validate(spec);
    auto e = trial_engine(spec.seed, index, kParamStream);
    registration::SimilarityParams p;
    p.theta = draw(e, spec.ranges.theta_deg) * kPi / 180.0;
    p.scale = draw(e, spec.ranges.scale);
    p.shift.x1 = draw(e, spec.ranges.p1);
    p.shift.x2 = draw(e, spec.ranges.p2);
    return p;
}

Image synthetic_texture(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    constexpr int kComponents = 20;
    constexpr double kMaxFreq = kPi / 4.0;  // a quarter of Nyquist
    constexpr double kMinFreq = kPi / 32.0;
    struct Wave {
        double w1, w2, phase, amp;
    };
    auto e = trial_engine(seed, 0, 0x7e47u);
    std::vector<Wave> waves;
    double total = 0.0;
    for (int i = 0; i < kComponents; ++i) {
        const double radius = kMinFreq + (kMaxFreq - kMinFreq) * uniform01(e);
        const double dir = kPi * uniform01(e);
        const double phase = 2.0 * kPi * uniform01(e);
        const double amp = 0.3 + 0.7 * uniform01(e);
        waves.push_back({radius * std::cos(dir), radius * std::sin(dir), phase, amp});
        total += amp;
    }
    Image img(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            double v = 0.0;
            for (const auto& w : waves) {
                v += w.amp * std::cos(w.w1 * static_cast<double>(r) + w.w2 * static_cast<double>(c) + w.phase);
            }
            img(r, c) = 0.5 + 0.5 * v / total;
        }
    }
    return img;
}

std::size_t required_source_size(const TrialSpec& spec) {
    validate(spec);
    return 2 * margin_for(spec) + 1;
}

ImagePair make_pair(const Image& source, const registration::SimilarityParams& params,
                    const TrialSpec& spec, std::uint64_t index) {
    registration::validate(params);
    const std::size_t need = required_source_size(spec);
    if (source.rows() < need || source.cols() < need) {
        throw InvalidArgument("make_pair: source is " + std::to_string(source.rows()) + "x" +
                              std::to_string(source.cols()) + ", need at least " +
                              std::to_string(need) + "x" + std::to_string(need));
    }
    // The ranges bound the transform reach; a caller-supplied params outside
    // them needs its own margin.
    const double half = static_cast<double>(spec.crop_size) / 2.0;
    const std::size_t margin = std::max(
        margin_for(spec),
        static_cast<std::size_t>(std::ceil(params.scale * half * std::numbers::sqrt2 + norm(params.shift) + 3.0)));
    if (source.rows() < 2 * margin + 1 || source.cols() < 2 * margin + 1) {
        throw InvalidArgument("make_pair: source too small for these parameters, need at least " +
                              std::to_string(2 * margin + 1) + " per side");
    }

    auto e = trial_engine(spec.seed, index, kCropStream);
    const auto pick = [&](std::size_t extent) {
        const std::size_t span = extent - 2 * margin;
        return margin + static_cast<std::size_t>(uniform01(e) * static_cast<double>(span));
    };
    const std::size_t q1 = pick(source.rows());
    const std::size_t q2 = pick(source.cols());

    // Transform a margin-sized neighbourhood about q, then crop both images
    // at the same place.
    const std::size_t region = 2 * margin;
    Image patch(region, region);
    for (std::size_t r = 0; r < region; ++r) {
        for (std::size_t c = 0; c < region; ++c) patch(r, c) = source(q1 - margin + r, q2 - margin + c);
    }
    const double m = static_cast<double>(margin);
    const Image moved = registration::apply_similarity_about(patch, params, {m, m});

    const std::size_t crop = spec.crop_size;
    const std::size_t off = margin - crop / 2;
    ImagePair out{Image(crop, crop), Image(crop, crop), params,
                  {static_cast<long>(q1), static_cast<long>(q2)}};
    for (std::size_t r = 0; r < crop; ++r) {
        for (std::size_t c = 0; c < crop; ++c) {
            out.x(r, c) = patch(off + r, off + c);
            out.y(r, c) = moved(off + r, off + c);
        }
    }
    return out;
}

double angle_error_deg(double estimate_rad, double truth_rad) {
    const double est = registration::wrap_half_turn(estimate_rad) * 180.0 / kPi;
    const double tru = registration::wrap_half_turn(truth_rad) * 180.0 / kPi;
    return std::abs(est - tru);
}

void aggregate(TrialReport& report) {
    auto stats = [&](double TrialResult::*field) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& r : report.results) {
            if (r.failed) continue;
            sum += r.*field;
            ++count;
        }
        if (count == 0) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            return ErrorStats{nan, nan};
        }
        const double mean = sum / static_cast<double>(count);
        double ss = 0.0;
        for (const auto& r : report.results) {
            if (!r.failed) ss += (r.*field - mean) * (r.*field - mean);
        }
        return ErrorStats{mean, ss / static_cast<double>(count)};
    };
    report.failed = static_cast<std::size_t>(
        std::count_if(report.results.begin(), report.results.end(), [](const auto& r) { return r.failed; }));
    report.scale_proposed = stats(&TrialResult::err_scale_proposed);
    report.angle_proposed = stats(&TrialResult::err_angle_deg_proposed);
    report.scale_baseline = stats(&TrialResult::err_scale_baseline);
    report.angle_baseline = stats(&TrialResult::err_angle_deg_baseline);
}

namespace {

TrialResult run_one(const Image& source, const TrialSpec& spec,
                    const registration::EstimateConfig& cfg, std::uint64_t index) {
    TrialResult row;
    row.index = index;
    row.truth = random_params(spec, index);
    try {
        const auto pair = make_pair(source, row.truth, spec, index);
        row.proposed = registration::estimate_scale_rotation(pair.x, pair.y, cfg);
        row.baseline = registration::baseline_scale_rotation(pair.x, pair.y, cfg);
    } catch (const DegenerateInput& e) {
        row.failed = true;
        row.failure = e.what();
        return row;
    } catch (const DegenerateObjective& e) {
        row.failed = true;
        row.failure = e.what();
        return row;
    }
    row.err_scale_proposed = std::abs(row.proposed.scale - row.truth.scale);
    row.err_scale_baseline = std::abs(row.baseline.scale - row.truth.scale);
    row.err_angle_deg_proposed = angle_error_deg(row.proposed.theta, row.truth.theta);
    row.err_angle_deg_baseline = angle_error_deg(row.baseline.theta, row.truth.theta);
    return row;
}

}  // namespace

TrialReport run_trials(const Image& source, std::size_t n, const TrialSpec& spec,
                       const registration::EstimateConfig& cfg, unsigned threads) {
    if (n == 0) throw InvalidArgument("run_trials: n must be at least 1");
    validate(spec);
    const std::size_t need = required_source_size(spec);
    if (source.rows() < need || source.cols() < need) {
        throw InvalidArgument("run_trials: source is " + std::to_string(source.rows()) + "x" +
                              std::to_string(source.cols()) + ", need at least " +
                              std::to_string(need) + "x" + std::to_string(need));
    }

    TrialReport report;
    report.results.resize(n);
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                report.results[i] = run_one(source, spec, cfg, i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    aggregate(report);
    return report;
}

}  // namespace fmreg::simulation
