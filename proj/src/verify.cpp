#include "seqdesign/verify.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "seqdesign/config.hpp"
#include "seqdesign/diagnostics.hpp"
#include "seqdesign/doptimal.hpp"
#include "seqdesign/experiment.hpp"
#include "seqdesign/kernels.hpp"
#include "seqdesign/models.hpp"
#include "seqdesign/posterior.hpp"
#include "seqdesign/rng.hpp"
#include "seqdesign/strategies.hpp"

namespace seqdesign {

namespace {

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

// A random posterior: a few observations at random placements from a random theta.
GridPosterior random_posterior(const ObservationModel& model, std::shared_ptr<const ParameterGrid> grid,
                               const std::vector<Placement>& candidates, std::size_t steps, Rng& rng) {
    auto post = GridPosterior::uniform(grid);
    const auto theta = grid->point(uniform_index(rng, grid->size()));
    const std::vector<double> th(theta.begin(), theta.end());
    for (std::size_t k = 0; k < steps; ++k) {
        const Placement x = candidates[uniform_index(rng, candidates.size())];
        post = bayes_update(post, model, x, model.sample(th, x, rng));
    }
    return post;
}

CheckResult check_normalization() {
    Rng rng(11);
    PsychometricModel model;
    auto grid = std::make_shared<const ParameterGrid>(ParameterGrid::line(0, 100, 1024));
    const auto cand = model.placements().candidates(101);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto post = random_posterior(model, grid, cand, 50, rng);
        double s = 0.0;
        for (double w : post.weights()) s += w;
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return {"normalization", worst <= 1e-12, "max |sum w - 1| = " + sci(worst)};
}

CheckResult check_two_form_mi() {
    Rng rng(12);
    double worst = 0.0;
    PsychometricModel psy;
    auto grid = std::make_shared<const ParameterGrid>(ParameterGrid::line(0, 100, 512));
    const auto cand = psy.placements().candidates(101);
    for (int rep = 0; rep < 20; ++rep) {
        const auto post = random_posterior(psy, grid, cand, 1 + rep * 3, rng);
        for (int j = 0; j < 5; ++j) {
            const Placement x = cand[uniform_index(rng, cand.size())];
            worst = std::max(worst, std::abs(expected_information_gain(post, psy, x) -
                                             expected_information_gain_kl(post, psy, x)));
        }
    }
    TwentyQuestionsModel tq(6);
    auto tgrid = std::make_shared<const ParameterGrid>(ParameterGrid::line(0.5, 64.5, 64));
    const auto tcand = tq.placements().candidates(0);
    for (int rep = 0; rep < 10; ++rep) {
        const auto post = random_posterior(tq, tgrid, tcand, static_cast<std::size_t>(rep % 5), rng);
        for (Placement x : tcand) {
            worst = std::max(worst, std::abs(expected_information_gain(post, tq, x) -
                                             expected_information_gain_kl(post, tq, x)));
        }
    }
    return {"two_form_mutual_information", worst <= 1e-10, "max difference = " + sci(worst)};
}

CheckResult check_rho_additivity() {
    // Disjoint sets: multiples of 3, and integers = 1 mod 3 that are also even.
    auto a = [](std::int64_t k) { return k % 3 == 0; };
    auto b = [](std::int64_t k) { return ((k % 3) + 3) % 3 == 1 && k % 2 == 0; };
    auto u = [&](std::int64_t k) { return a(k) || b(k); };
    double worst = 0.0;
    for (std::int64_t lo : {-50, 0, 7}) {
        for (std::int64_t hi : {lo + 1, lo + 10, lo + 997}) {
            worst = std::max(worst, std::abs(rho(u, lo, hi) - rho(a, lo, hi) - rho(b, lo, hi)));
        }
    }
    return {"rho_additivity", worst <= 1e-15, "max defect = " + sci(worst)};
}

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.model.kind = "psychometric";
    c.model.grid = {512};
    c.model.candidates = 101;
    c.theta0 = std::vector<double>{50.0};
    c.trials = 200;
    c.replicates = 2;
    c.seed = 2024;
    return c;
}

CheckResult check_telescoping() {
    const RunResult r = run_experiment(small_config());
    double worst = 0.0;
    auto grid = ParameterGrid::line(0, 100, 512);
    const double h0 = std::log(grid.volume());
    for (const auto& trace : r.traces) {
        double sum = 0.0;
        for (const auto& rec : trace) sum += rec.gain_nats;
        worst = std::max(worst, std::abs(sum - (h0 - trace.back().entropy_nats)));
    }
    return {"telescoping_gains", worst <= 1e-9, "max |sum G - (H_0 - H_T)| = " + sci(worst)};
}

CheckResult check_determinism() {
    auto c = small_config();
    c.cost.kind = "outcome-linear";
    c.strategy = StrategyKind::myopic_gain_per_cost;
    c.trials = 100;
    const RunResult a = run_experiment(c);
    const RunResult b = run_experiment(c);
    bool same = a.traces.size() == b.traces.size();
    for (std::size_t r = 0; same && r < a.traces.size(); ++r) {
        same = a.traces[r].size() == b.traces[r].size();
        for (std::size_t i = 0; same && i < a.traces[r].size(); ++i) {
            const auto& p = a.traces[r][i];
            const auto& q = b.traces[r][i];
            same = p.x == q.x && p.y == q.y && p.cost == q.cost && p.entropy_nats == q.entropy_nats &&
                   p.gain_nats == q.gain_nats;
        }
    }
    return {"determinism", same, same ? "identical traces" : "traces differ"};
}

CheckResult check_cost_bounds() {
    auto c = small_config();
    c.cost.kind = "outcome-linear";
    c.strategy = StrategyKind::random_uniform;
    c.trials = 300;
    const RunResult r = run_experiment(c);
    const double gamma = 1.0, big_m = 1.0 + c.cost.surcharge;
    bool ok = true;
    for (const auto& trace : r.traces) {
        for (const auto& rec : trace) {
            const double t = static_cast<double>(rec.t);
            ok = ok && gamma * t <= rec.cum_cost && rec.cum_cost <= big_m * t;
        }
    }
    return {"cost_bounds", ok, ok ? "gamma t <= C_t <= M t on every trial" : "bound violated"};
}

CheckResult check_information_identity() {
    PsychometricModel psy;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            const std::vector<double> th{2.5 + 5.0 * i};
            const double x = 2.5 + 5.0 * j;
            Eigen::MatrixXd e = Eigen::MatrixXd::Zero(1, 1);
            for (const auto& o : psy.outcome_rule(th, x)) e += o.weight * psy.neg_hessian(o.y, th, x);
            worst = std::max(worst, (e - psy.fisher(th, x)).cwiseAbs().maxCoeff());
        }
    }
    return {"information_identity", worst <= 1e-6, "max |E[-H] - I| = " + sci(worst)};
}

CheckResult check_kw_certificate() {
    PsychometricModel psy;
    const auto cand = psy.placements().candidates(201);
    const std::vector<double> th{50.0};
    const auto set = information_set(psy, CostModel::constant(1.0), th, cand, CostNormalization::unit_cost);
    const DesignWeights d = solve_doptimal(set);
    const bool ok = d.converged && d.gap <= 1e-8 && std::abs(d.B_star(0, 0) - 0.25) <= 1e-6;
    return {"kiefer_wolfowitz_certificate", ok, "gap = " + sci(d.gap) + ", B* = " + std::to_string(d.B_star(0, 0))};
}

CheckResult check_entropy_bound() {
    Rng rng(13);
    PsychometricModel model;
    auto grid = std::make_shared<const ParameterGrid>(ParameterGrid::line(0, 100, 1024));
    const auto cand = model.placements().candidates(101);
    const double cap = std::log(grid->volume());
    bool ok = std::abs(differential_entropy(GridPosterior::uniform(grid)) - cap) <= 1e-12;
    for (int rep = 0; rep < 10; ++rep) {
        ok = ok && differential_entropy(random_posterior(model, grid, cand, 20, rng)) <= cap + 1e-12;
    }
    return {"entropy_bound", ok, "H_t <= log vol(Theta), equality at the uniform prior"};
}

CheckResult check_order_independence() {
    Rng rng(14);
    PsychometricModel model;
    auto grid = std::make_shared<const ParameterGrid>(ParameterGrid::line(0, 100, 1024));
    std::vector<std::pair<double, double>> obs;
    const std::vector<double> th{37.0};
    for (int k = 0; k < 30; ++k) {
        const double x = 100.0 * uniform01(rng);
        obs.emplace_back(x, model.sample(th, x, rng));
    }
    auto fwd = GridPosterior::uniform(grid);
    auto rev = fwd;
    for (std::size_t k = 0; k < obs.size(); ++k) {
        fwd = bayes_update(fwd, model, obs[k].first, obs[k].second);
        const auto& o = obs[obs.size() - 1 - k];
        rev = bayes_update(rev, model, o.first, o.second);
    }
    const auto a = fwd.weights();
    const auto b = rev.weights();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return {"order_independence", worst <= 1e-12, "max |w_fwd - w_rev| = " + sci(worst)};
}

CheckResult check_serial_parallel() {
    Rng rng(15);
    PsychometricModel model;
    auto grid = std::make_shared<const ParameterGrid>(ParameterGrid::line(0, 100, 4096));
    auto ps = GridPosterior::uniform(grid);
    auto pp = ps;
    const std::vector<double> th{61.0};
    for (int k = 0; k < 40; ++k) {
        const double x = 100.0 * uniform01(rng);
        const double y = model.sample(th, x, rng);
        ps = bayes_update(ps, model, x, y, kernels::Execution::serial);
        pp = bayes_update(pp, model, x, y, kernels::Execution::parallel);
    }
    const auto a = ps.log_weights();
    const auto b = pp.log_weights();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::isfinite(a[i]) || std::isfinite(b[i])) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    const double dh = std::abs(differential_entropy(ps, kernels::Execution::serial) -
                               differential_entropy(pp, kernels::Execution::parallel));
    return {"serial_parallel_agreement", worst <= 1e-9 && dh <= 1e-12,
            "max log-weight difference = " + sci(worst) + ", entropy difference = " + sci(dh)};
}

}  // namespace

std::vector<CheckResult> run_verification() {
    using Fn = CheckResult (*)();
    const Fn checks[] = {check_normalization,  check_two_form_mi,         check_rho_additivity,
                         check_telescoping,    check_determinism,         check_cost_bounds,
                         check_information_identity, check_kw_certificate, check_entropy_bound,
                         check_order_independence,   check_serial_parallel};
    std::vector<CheckResult> out;
    for (Fn f : checks) {
        try {
            out.push_back(f());
        } catch (const std::exception& e) {
            out.push_back({"?", false, std::string("exception: ") + e.what()});
        }
    }
    return out;
}

}  // namespace seqdesign
