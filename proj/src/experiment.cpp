#include "seqdesign/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "seqdesign/error.hpp"
#include "seqdesign/posterior.hpp"
#include "seqdesign/rng.hpp"
#include "seqdesign/strategies.hpp"
#include "seqdesign/trace_io.hpp"

namespace seqdesign {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::vector<double> draw_theta(const ObservationModel& model, Rng& rng) {
    if (const auto* tq = dynamic_cast<const TwentyQuestionsModel*>(&model)) {
        return {static_cast<double>(uniform_index(rng, tq->size()) + 1)};
    }
    const auto lo = model.lower_bounds();
    const auto hi = model.upper_bounds();
    std::vector<double> theta(lo.size());
    for (std::size_t a = 0; a < lo.size(); ++a) theta[a] = lo[a] + (hi[a] - lo[a]) * uniform01(rng);
    return theta;
}

struct ReplicateOutput {
    TrialTrace trace;
    ReferenceDesign reference;
    AsymptoticReport report;
    ReplicateSummary summary;
};

ReplicateOutput run_replicate(const ExperimentConfig& config, const ObservationModel& model, const CostModel& cost,
                              const std::shared_ptr<const ParameterGrid>& grid,
                              const std::vector<Placement>& candidates, std::size_t replicate) {
    ReplicateOutput out;
    auto& s = out.summary;
    s.replicate = replicate;
    s.seed = config.seed + replicate;
    Rng rng = replicate_stream(config.seed, replicate);

    std::vector<double> theta0 = config.theta0 ? *config.theta0 : draw_theta(model, rng);
    s.theta0 = theta0;
    const bool smooth = model.smooth();
    const std::size_t n = model.dimension();
    const bool cost_aware = cost.kind() != CostModel::Kind::constant;

    if (smooth) out.reference = reference_design(config, model, cost, theta0);

    GridPosterior post = GridPosterior::uniform(grid);
    double h_prev = differential_entropy(post);
    double cum = 0.0;
    bool renew_next = false;
    for (std::size_t t = 1;; ++t) {
        if (config.trials > 0 && t > config.trials) break;
        TrialRecord rec;
        rec.t = t;
        if (renew_next) {
            theta0 = draw_theta(model, rng);
            post = GridPosterior::uniform(grid);
            h_prev = differential_entropy(post);
            rec.renewed = true;
            renew_next = false;
        }

        PlacementDecision d;
        switch (config.strategy) {
            case StrategyKind::greedy_info:
                d = choose_greedy(post, model, candidates);
                break;
            case StrategyKind::myopic_gain_per_cost:
                d = choose_myopic_cost_aware(post, model, cost, candidates);
                break;
            default:
                d = choose_baseline(config.strategy, t, candidates, rng, config.fixed_x);
                annotate_decision(d, post, model, cost, candidates, cost_aware);
                break;
        }

        const Outcome y = model.sample(theta0, d.x, rng);
        const double c = cost.sample(y, d.x, rng);
        try {
            post = bayes_update(post, model, d.x, y);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::impossible_observation) throw;
            s.aborted = true;
            s.message = e.what();
            break;
        }
        const double h = differential_entropy(post);
        cum += c;

        rec.x = d.x;
        rec.y = y;
        rec.cost = c;
        rec.cum_cost = cum;
        rec.gain_nats = h_prev - h;
        rec.entropy_nats = h;
        rec.expected_gain_nats = d.expected_gain_nats;
        rec.efficiency_ratio = d.efficiency_ratio;
        rec.expected_cost_at_truth = expected_cost_at(cost, model, d.x, theta0);
        if (smooth) {
            rec.observed_info = model.neg_hessian(y, theta0, d.x);
            rec.fisher_at_truth = model.fisher(theta0, d.x);
        }
        h_prev = h;
        if (config.renew_on_identify && h <= 1e-12 + std::log(grid->cell_volume())) renew_next = true;

        const bool over = config.budget > 0.0 && cum > config.budget;
        rec.over_budget = over;
        out.trace.push_back(std::move(rec));
        if (over) {
            s.budget_overrun = true;
            break;
        }
    }

    const double hs_unit = out.reference.available ? out.reference.unit_cost.h_star_nats : nan;
    const double hs_cost = out.reference.available ? out.reference.per_cost.h_star_nats : nan;
    out.report = build_report(out.trace, n, smooth && !out.trace.empty(), hs_unit, hs_cost, config.diagnostics);

    s.trials = out.trace.size();
    s.total_cost = cum;
    const auto last = [](const std::vector<double>& v) { return v.empty() ? nan : v.back(); };
    s.final_residual_unit = last(out.report.residual_unit);
    s.final_residual_cost = last(out.report.residual_cost);
    s.final_det_B_unit = last(out.report.det_B_unit);
    s.final_det_B_cost = last(out.report.det_B_cost);
    s.final_ratio = last(out.report.ratio);
    s.most_trials_unit = out.report.most_trials_unit;
    s.most_trials_cost = out.report.most_trials_cost;
    s.info_budget = out.report.budget;
    try {
        const LocalSummary local = local_summary(post, theta0, config.local_radius);
        s.local_mass = local.mass;
        s.local_log_det = std::log(local.summary.covariance.determinant());
    } catch (const Error&) {
        s.local_mass = 0.0;
        s.local_log_det = nan;
    }
    return out;
}

}  // namespace

double median(std::vector<double> values) {
    values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }), values.end());
    if (values.empty()) return nan;
    std::sort(values.begin(), values.end());
    const std::size_t k = values.size() / 2;
    return values.size() % 2 == 1 ? values[k] : 0.5 * (values[k - 1] + values[k]);
}

ReferenceDesign reference_design(const ExperimentConfig& config, const ObservationModel& model,
                                 const CostModel& cost, std::span<const double> theta0) {
    ReferenceDesign ref;
    if (!model.smooth()) return ref;
    const auto candidates = make_candidates(config.model, model);
    CandidateInformationSet set =
        information_set(model, cost, theta0, candidates, CostNormalization::unit_cost);
    ref.unit_cost = solve_doptimal(set, config.design_tol, config.design_max_iter);
    set.normalization = CostNormalization::per_cost;
    ref.per_cost = solve_doptimal(set, config.design_tol, config.design_max_iter);
    ref.available = true;
    return ref;
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    validate(config);
    const auto model = make_model(config.model);
    const CostModel cost = make_cost(config.cost, *model);
    const auto grid = make_grid(config.model, *model);
    const auto candidates = make_candidates(config.model, *model);

    RunResult result;
    result.config = config;
    std::filesystem::path dir = config.output_dir;
    if (options.write_files) std::filesystem::create_directories(dir);

    for (std::size_t r = 0; r < config.replicates; ++r) {
        ReplicateOutput rep = run_replicate(config, *model, cost, grid, candidates, r);
        if (options.write_files) {
            const auto file = dir / ("trace_r" + std::to_string(r) + ".csv");
            write_trace_csv(file, rep.trace, rep.report);
            rep.summary.trace_file = file.filename().string();
        }
        if (!options.quiet) {
            std::cerr << "replicate " << r << ": " << rep.summary.trials << " trials, det B_t "
                      << rep.summary.final_det_B_unit << ", residual " << rep.summary.final_residual_unit
                      << (rep.summary.aborted ? " [aborted]" : "") << "\n";
        }
        result.summaries.push_back(std::move(rep.summary));
        result.references.push_back(std::move(rep.reference));
        result.reports.push_back(std::move(rep.report));
        if (options.keep_traces) result.traces.push_back(std::move(rep.trace));
    }

    std::vector<double> ru, rc, du, dc;
    for (const auto& s : result.summaries) {
        if (s.aborted) continue;
        ru.push_back(s.final_residual_unit);
        rc.push_back(s.final_residual_cost);
        du.push_back(s.final_det_B_unit);
        dc.push_back(s.final_det_B_cost);
    }
    result.median_residual_unit = median(ru);
    result.median_residual_cost = median(rc);
    result.median_det_B_unit = median(du);
    result.median_det_B_cost = median(dc);

    if (options.write_files) write_json(dir / "summary.json", summary_json(result));
    return result;
}

SweepResult run_sweep(const ExperimentConfig& config, const RunOptions& options) {
    validate(config);
    std::vector<ExperimentConfig> runs;
    std::vector<SweepPoint> points;
    const auto& sw = config.sweep;
    if (!sw.theta0.empty()) {
        for (const auto& th : sw.theta0) {
            ExperimentConfig c = config;
            c.theta0 = th;
            runs.push_back(c);
            points.push_back({th, c.seed, {}});
        }
    } else if (sw.prior_draws > 0) {
        for (std::size_t k = 0; k < sw.prior_draws; ++k) {
            ExperimentConfig c = config;
            c.theta0.reset();
            c.seed = config.seed + k * 1000003ULL;
            runs.push_back(c);
            points.push_back({{}, c.seed, {}});
        }
    } else if (!sw.seeds.empty()) {
        for (auto seed : sw.seeds) {
            ExperimentConfig c = config;
            c.seed = seed;
            runs.push_back(c);
            points.push_back({c.theta0.value_or(std::vector<double>{}), seed, {}});
        }
    } else {
        throw Error(ErrorKind::validation, "sweep: give sweep.theta0, sweep.prior_draws or sweep.seeds");
    }

    SweepResult out;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        runs[k].output_dir = (std::filesystem::path(config.output_dir) / ("point_" + std::to_string(k))).string();
        validate(runs[k]);
        points[k].result = run_experiment(runs[k], options);
        for (const auto& s : points[k].result.summaries) {
            if (s.aborted) {
                out.flagged.push_back(std::to_string(k) + "/" + std::to_string(s.replicate) + ": " + s.message);
            }
        }
    }
    out.points = std::move(points);
    return out;
}

}  // namespace seqdesign
