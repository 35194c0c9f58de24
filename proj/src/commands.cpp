#include "fmreg/commands.hpp"

#include <filesystem>
#include <map>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "fmreg/errors.hpp"
#include "fmreg/image_io.hpp"
#include "fmreg/registration.hpp"
#include "fmreg/report.hpp"
#include "fmreg/simulation.hpp"
#include "json.hpp"

namespace fmreg::cli {
namespace {

namespace fs = std::filesystem;
using registration::EstimateConfig;
using registration::EstimateResult;

constexpr double kDeg = std::numbers::pi / 180.0;

struct Options {
    std::string method = "proposed";
    std::string weights = "standard";
    double tol = 1e-8;
    int max_iter = 100;
    std::string format;
    std::string out;
    std::string ref_path;
    std::string target_path;
    // eval
    std::string source_path;
    bool synthetic = false;
    std::size_t n = 5;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    // synth
    double scale = 1.0;
    double angle_deg = 0.0;
    std::vector<double> shift{0.0, 0.0};
    bool random = false;
    std::size_t size = 64;
};

void add_estimator_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--method", o.method, "proposed (MM refinement) or baseline (integer peak)")
        ->check(CLI::IsMember({"proposed", "baseline"}));
    cmd->add_option("--weights", o.weights, "cross-spectrum weights")
        ->check(CLI::IsMember({"standard", "phat"}));
    cmd->add_option("--tol", o.tol, "MM step-norm tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", o.max_iter, "MM iteration cap")->check(CLI::PositiveNumber);
}

EstimateConfig config_of(const Options& o) {
    EstimateConfig cfg;
    cfg.weights = o.weights == "phat" ? spectral::WeightScheme::Phat : spectral::WeightScheme::Standard;
    cfg.tol = o.tol;
    cfg.max_iter = o.max_iter;
    return cfg;
}

EstimateResult estimate_pair(const Options& o, const Image& ref, const Image& target) {
    if (!ref.same_shape(target)) {
        throw InvalidArgument("image dimensions differ: " + std::to_string(ref.rows()) + "x" +
                              std::to_string(ref.cols()) + " vs " + std::to_string(target.rows()) + "x" +
                              std::to_string(target.cols()));
    }
    const auto cfg = config_of(o);
    return o.method == "baseline" ? registration::baseline_scale_rotation(ref, target, cfg)
                                  : registration::estimate_scale_rotation(ref, target, cfg);
}

int cmd_estimate(const Options& o, std::ostream& out) {
    const Image ref = io::load_image(o.ref_path);
    const Image target = io::load_image(o.target_path);
    const auto result = estimate_pair(o, ref, target);
    if (o.format == "csv") {
        out << report::estimate_csv(result, o.method);
    } else {
        out << report::estimate_json(result, o.method) << '\n';
    }
    return kOk;
}

int cmd_align(const Options& o, std::ostream& out) {
    const Image ref = io::load_image(o.ref_path);
    const Image target = io::load_image(o.target_path);
    const auto result = estimate_pair(o, ref, target);
    io::save_image(o.out, registration::undo_scale_rotation(target, result.scale, result.theta));
    out << report::estimate_json(result, o.method) << '\n';
    return kOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
    simulation::TrialSpec spec;
    spec.seed = o.seed;
    Image source;
    std::string source_name;
    if (o.synthetic) {
        const std::size_t side = 4 * spec.crop_size;
        source = simulation::synthetic_texture(side, side, o.seed);
        source_name = "synthetic";
    } else {
        source = io::load_image(o.source_path);
        source_name = fs::path(o.source_path).filename().string();
    }
    const auto rep = simulation::run_trials(source, o.n, spec, config_of(o), o.threads);
    const report::RunInfo info{source_name, o.n, o.seed, o.weights};

    std::ostringstream buf;
    if (o.format == "json") {
        report::write_trials_json(buf, rep, info);
    } else {
        report::write_trials_csv(buf, rep, info);
    }
    if (o.out.empty()) {
        out << buf.str();
    } else {
        io::save_text(o.out, buf.str());
    }
    return kOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
    simulation::TrialSpec spec;
    spec.seed = o.seed;
    spec.crop_size = o.size;
    simulation::validate(spec);

    registration::SimilarityParams params;
    if (o.random) {
        params = simulation::random_params(spec, 0);
    } else {
        params = {o.scale, o.angle_deg * kDeg, {o.shift[0], o.shift[1]}};
    }
    registration::validate(params);

    const std::size_t side = 4 * spec.crop_size;
    const Image source = simulation::synthetic_texture(side, side, o.seed);
    const auto pair = simulation::make_pair(source, params, spec, 0);

    const fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError(o.out + ": cannot create output directory");
    io::save_pgm(dir / "x.pgm", pair.x, 16);
    io::save_pgm(dir / "y.pgm", pair.y, 16);

    nlohmann::ordered_json truth;
    truth["scale"] = params.scale;
    truth["angle_deg"] = params.theta / kDeg;
    truth["shift"] = {params.shift.x1, params.shift.x2};
    truth["frame"] = "crop center";
    truth["crop_size"] = spec.crop_size;
    truth["seed"] = o.seed;
    truth["source"] = "synthetic";
    io::save_text(dir / "truth.json", truth.dump(2) + "\n");
    out << "wrote " << (dir / "x.pgm").string() << ", " << (dir / "y.pgm").string() << ", "
        << (dir / "truth.json").string() << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Scale and rotation estimation between similarity-transformed images", "fmreg"};
    app.require_subcommand(1);

    auto* estimate = app.add_subcommand("estimate", "Estimate scale and rotation of TARGET relative to REF");
    estimate->add_option("ref", o.ref_path, "reference image (PGM/PNG)")->required();
    estimate->add_option("target", o.target_path, "target image (PGM/PNG)")->required();
    add_estimator_flags(estimate, o);
    estimate->add_option("--format", o.format)->check(CLI::IsMember({"json", "csv"}));

    auto* align = app.add_subcommand("align", "Undo the estimated scale and rotation of TARGET");
    align->add_option("ref", o.ref_path, "reference image")->required();
    align->add_option("target", o.target_path, "target image")->required();
    align->add_option("--out", o.out, "aligned image (.png or .pgm)")->required();
    add_estimator_flags(align, o);

    auto* eval = app.add_subcommand("eval", "Run the simulated evaluation protocol");
    eval->add_option("source", o.source_path, "high-resolution grayscale source image");
    eval->add_flag("--synthetic", o.synthetic, "use the built-in smooth texture as source");
    eval->add_option("--n", o.n, "number of trials")->check(CLI::PositiveNumber);
    eval->add_option("--seed", o.seed, "random seed");
    eval->add_option("--threads", o.threads, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    eval->add_option("--out", o.out, "write the report here instead of stdout");
    eval->add_option("--format", o.format)->check(CLI::IsMember({"json", "csv"}));
    add_estimator_flags(eval, o);

    auto* synth = app.add_subcommand("synth", "Write a synthetic image pair with known parameters");
    synth->add_option("--out", o.out, "output directory")->required();
    synth->add_option("--scale", o.scale, "scale factor")->check(CLI::PositiveNumber);
    synth->add_option("--angle", o.angle_deg, "rotation angle in degrees");
    synth->add_option("--shift", o.shift, "translation p1 p2 in pixels")->expected(2);
    synth->add_flag("--random", o.random, "draw parameters from the evaluation ranges");
    synth->add_option("--seed", o.seed, "random seed");
    synth->add_option("--size", o.size, "crop size (even, >= 16)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "fmreg: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (*estimate) return cmd_estimate(o, out);
        if (*align) return cmd_align(o, out);
        if (*eval) {
            if (o.synthetic == !o.source_path.empty()) {
                err << "fmreg eval: give exactly one of SOURCE or --synthetic\n";
                return kUsageError;
            }
            if (o.format.empty()) o.format = "csv";
            return cmd_eval(o, out);
        }
        if (*synth) return cmd_synth(o, out);
    } catch (const DegenerateInput& e) {
        err << "fmreg: degenerate input: " << e.what() << '\n';
        return kDegenerateError;
    } catch (const DegenerateObjective& e) {
        err << "fmreg: degenerate objective: " << e.what() << '\n';
        return kDegenerateError;
    } catch (const std::exception& e) {
        err << "fmreg: " << e.what() << '\n';
        return kUsageError;
    }
    return kUsageError;
}

}  // namespace fmreg::cli
