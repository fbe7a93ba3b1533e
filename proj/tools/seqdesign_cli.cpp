// Command-line front end: run, sweep, doptimal, verify, report.
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqdesign/config.hpp"
#include "seqdesign/error.hpp"
#include "seqdesign/experiment.hpp"
#include "seqdesign/trace_io.hpp"
#include "seqdesign/verify.hpp"

namespace {

using namespace seqdesign;

constexpr int exit_ok = 0;
constexpr int exit_invalid = 1;
constexpr int exit_verify_failed = 2;

constexpr const char* out_env = "SEQDESIGN_OUT";

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> replicates;
    std::optional<std::size_t> trials;
    std::optional<double> budget;
    bool quiet = false;
};

// Flags beat the environment, which beats the file.
ExperimentConfig load_with_overrides(const std::string& path, const Overrides& o) {
    ExperimentConfig c = load_config(path);
    if (const char* env = std::getenv(out_env); env != nullptr && *env != '\0') c.output_dir = env;
    if (o.out) c.output_dir = *o.out;
    if (o.seed) c.seed = *o.seed;
    if (o.replicates) c.replicates = *o.replicates;
    if (o.trials) {
        c.trials = *o.trials;
        c.budget = 0.0;
    }
    if (o.budget) {
        c.budget = *o.budget;
        c.trials = 0;
    }
    validate(c);
    return c;
}

void print_summary(const RunResult& r) {
    std::cout << std::setprecision(6);
    for (const auto& s : r.summaries) {
        std::cout << "replicate " << s.replicate << " seed " << s.seed << ": trials " << s.trials << ", cost "
                  << s.total_cost;
        if (s.aborted) {
            std::cout << ", ABORTED (" << s.message << ")\n";
            continue;
        }
        if (!std::isnan(s.final_det_B_unit)) {
            std::cout << ", det B_t " << s.final_det_B_unit << " (cost clock " << s.final_det_B_cost
                      << "), residual " << s.final_residual_unit;
        }
        std::cout << ", gain/cost " << s.final_ratio << "\n";
    }
    if (!std::isnan(r.median_det_B_unit)) {
        std::cout << "median det B_t " << r.median_det_B_unit << ", median residual " << r.median_residual_unit
                  << "\n";
    }
}

int cmd_run(const std::string& path, const Overrides& o) {
    const ExperimentConfig c = load_with_overrides(path, o);
    RunOptions opt;
    opt.write_files = true;
    opt.quiet = o.quiet;
    opt.keep_traces = false;
    const RunResult r = run_experiment(c, opt);
    if (!o.quiet) {
        print_summary(r);
        std::cout << "wrote " << c.output_dir << "/summary.json\n";
    }
    return exit_ok;
}

int cmd_sweep(const std::string& path, const Overrides& o) {
    const ExperimentConfig c = load_with_overrides(path, o);
    RunOptions opt;
    opt.write_files = true;
    opt.quiet = o.quiet;
    opt.keep_traces = false;
    const SweepResult s = run_sweep(c, opt);

    nlohmann::json j;
    j["format"] = "seqdesign-sweep/1";
    j["rng"] = rng_name;
    auto pts = nlohmann::json::array();
    for (std::size_t k = 0; k < s.points.size(); ++k) {
        const auto& p = s.points[k];
        auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
        pts.push_back({{"point", k},
                       {"dir", "point_" + std::to_string(k)},
                       {"theta0", p.theta0.empty() ? nlohmann::json("prior") : nlohmann::json(p.theta0)},
                       {"seed", p.seed},
                       {"median_det_B_unit", num(p.result.median_det_B_unit)},
                       {"median_det_B_cost", num(p.result.median_det_B_cost)},
                       {"median_residual_unit", num(p.result.median_residual_unit)},
                       {"median_residual_cost", num(p.result.median_residual_cost)}});
        if (!o.quiet) {
            std::cout << "point " << k << ": median det B_t " << p.result.median_det_B_unit << ", median residual "
                      << p.result.median_residual_unit << "\n";
        }
    }
    j["points"] = pts;
    j["flagged"] = s.flagged;
    write_json(std::filesystem::path(c.output_dir) / "sweep.json", j);
    for (const auto& f : s.flagged) std::cerr << "flagged: " << f << "\n";
    return exit_ok;
}

int cmd_doptimal(const std::string& path, const Overrides& o) {
    const ExperimentConfig c = load_with_overrides(path, o);
    if (!c.theta0) throw Error(ErrorKind::validation, "experiment.theta0: doptimal needs a fixed value");
    const auto model = make_model(c.model);
    if (!model->smooth()) throw Error(ErrorKind::validation, "model.kind: doptimal needs a smooth model");
    const CostModel cost = make_cost(c.cost, *model);
    const ReferenceDesign ref = reference_design(c, *model, cost, *c.theta0);
    const DesignWeights& chosen = c.normalization == CostNormalization::unit_cost ? ref.unit_cost : ref.per_cost;

    nlohmann::json j = design_json(chosen);
    j["theta0"] = *c.theta0;
    j["normalization"] = std::string(to_string(c.normalization));
    j["unit_cost"] = design_json(ref.unit_cost);
    j["per_cost"] = design_json(ref.per_cost);
    // Per-cost efficiency of the unit-cost design, for comparison with the cost-aware optimum.
    const auto set = information_set(*model, cost, *c.theta0, make_candidates(c.model, *model),
                                     CostNormalization::unit_cost);
    const Eigen::MatrixXd naive = information_per_cost(set, ref.unit_cost.weights);
    j["unit_cost_design_per_cost"] = {{"det", naive.determinant()}, {"log_det", log_det_spd(naive)}};
    j["cost_aware_det_gain"] = std::exp(ref.per_cost.log_det) / naive.determinant();
    std::cout << std::setprecision(17) << j.dump(2) << "\n";
    return exit_ok;
}

int cmd_verify(bool quiet) {
    const auto checks = run_verification();
    std::size_t failed = 0;
    for (const auto& c : checks) {
        if (!c.passed) ++failed;
        if (!quiet || !c.passed) {
            std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
        }
    }
    std::cout << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    return failed == 0 ? exit_ok : exit_verify_failed;
}

int cmd_report(const std::string& dir, const Overrides& o) {
    std::filesystem::path out = std::filesystem::path(dir) / "report.csv";
    if (o.out) out = std::filesystem::path(*o.out);
    const std::size_t n = write_report_csv(dir, out);
    if (!o.quiet) std::cout << "aggregated " << n << " traces into " << out.string() << "\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential Bayesian experimental design: simulate adaptive placement strategies and compare "
                 "them with D-optimal reference designs."};
    app.require_subcommand(1);

    Overrides o;
    std::uint64_t seed = 0;
    std::string out;
    std::size_t replicates = 0, trials = 0;
    double budget = 0.0;
    auto* f_seed = app.add_option("--seed", seed, "base RNG seed (replicate r uses seed + r)");
    auto* f_out = app.add_option("--out", out, "output directory (overrides $" + std::string(out_env) + ")");
    auto* f_rep = app.add_option("--replicates", replicates, "number of replicates")->check(CLI::PositiveNumber);
    auto* f_trials = app.add_option("--trials", trials, "trial budget T")->check(CLI::PositiveNumber);
    auto* f_budget = app.add_option("--budget", budget, "cost budget")->check(CLI::PositiveNumber);
    f_trials->excludes(f_budget);
    app.add_flag("--quiet,-q", o.quiet, "print only errors and failures");
    app.fallthrough();

    std::string config_path, report_dir;
    auto* run = app.add_subcommand("run", "run replicated experiments from a config file");
    run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    auto* sweep = app.add_subcommand("sweep", "run one experiment per sweep point");
    sweep->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    auto* dopt = app.add_subcommand("doptimal", "print the D-optimal reference design as JSON");
    dopt->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    auto* report = app.add_subcommand("report", "aggregate trace CSVs into quantile bands");
    report->add_option("dir", report_dir, "directory holding trace_*.csv files")->required();
    for (auto* sub : {run, sweep, dopt, verify, report}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_invalid;
    }
    if (*f_seed) o.seed = seed;
    if (*f_out) o.out = out;
    if (*f_rep) o.replicates = replicates;
    if (*f_trials) o.trials = trials;
    if (*f_budget) o.budget = budget;

    try {
        if (*run) return cmd_run(config_path, o);
        if (*sweep) return cmd_sweep(config_path, o);
        if (*dopt) return cmd_doptimal(config_path, o);
        if (*verify) return cmd_verify(o.quiet);
        if (*report) return cmd_report(report_dir, o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invalid;
    }
    return exit_invalid;
}
