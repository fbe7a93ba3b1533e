#include "seqdesign/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "seqdesign/error.hpp"

namespace seqdesign {

namespace {

struct CandidateValue {
    double gain = 0.0;
    double cost = 1.0;
};

// Mutual information for scalar continuous outcomes. The y-integrals use a
// shared trapezoid grid: its range covers every cell's quadrature nodes with a
// margin of half their spread, and its step is a quarter of the closest node
// pair. Both forms use the same grid, so they agree up to rounding.
double continuous_mutual_information(const WeightedSupport& s, const ObservationModel& model, Placement x,
                                     bool kl_form) {
    const std::size_t m = s.size();
    const std::size_t n = s.dimension;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    double spread = 0.0, gap = std::numeric_limits<double>::infinity();
    std::vector<double> ys;
    for (std::size_t i = 0; i < m; ++i) {
        const auto theta_i = std::span<const double>(s.points).subspan(i * n, n);
        ys.clear();
        for (const auto& node : model.outcome_rule(theta_i, x)) ys.push_back(node.y);
        std::sort(ys.begin(), ys.end());
        lo = std::min(lo, ys.front());
        hi = std::max(hi, ys.back());
        spread = std::max(spread, ys.back() - ys.front());
        for (std::size_t k = 1; k < ys.size(); ++k) {
            if (ys[k] > ys[k - 1]) gap = std::min(gap, ys[k] - ys[k - 1]);
        }
    }
    if (!std::isfinite(gap) || spread <= 0.0) return 0.0;
    lo -= 0.5 * spread;
    hi += 0.5 * spread;
    constexpr std::size_t max_points = 8192;
    const auto points = std::min(max_points, static_cast<std::size_t>(std::ceil((hi - lo) / (0.25 * gap))) + 1);
    const double h = (hi - lo) / static_cast<double>(points - 1);

    std::vector<double> log_w(m), col(m);
    for (std::size_t i = 0; i < m; ++i) log_w[i] = std::log(s.weight[i]);
    double marginal = 0.0, conditional = 0.0, kl = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
        const double y = lo + h * static_cast<double>(k);
        const double dy = (k == 0 || k + 1 == points) ? 0.5 * h : h;
        std::fill(col.begin(), col.end(), 0.0);
        model.add_loglik(y, x, s.points, col);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, log_w[i] + col[i]);
        if (!std::isfinite(mx)) continue;
        double pred = 0.0;
        for (std::size_t i = 0; i < m; ++i) pred += std::exp(log_w[i] + col[i] - mx);
        const double log_pred = mx + std::log(pred);
        for (std::size_t i = 0; i < m; ++i) {
            const double p = std::exp(col[i]);
            if (p <= 0.0) continue;
            const double wp = s.weight[i] * p * dy;
            if (kl_form) {
                kl += wp * (col[i] - log_pred);
            } else {
                marginal -= wp * log_pred;
                conditional -= wp * col[i];
            }
        }
    }
    return std::max(0.0, kl_form ? kl : marginal - conditional);
}

CandidateValue evaluate_candidate(const WeightedSupport& s, const ObservationModel& model,
                                  const CostModel* cost, Placement x) {
    CandidateValue v;
    const std::size_t K = model.outcome_count();
    if (K > 0) {
        thread_local std::vector<double> probs;
        thread_local std::vector<double> pred;
        probs.resize(K * s.size());
        pred.resize(K);
        model.outcome_probabilities(x, s.points, probs);
        v.gain = kernels::discrete_mutual_information(s.weight, probs, K, pred);
        if (cost != nullptr) {
            v.cost = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                if (pred[k] > 0.0) v.cost += pred[k] * cost->cost_given(model.outcome_value(k), x);
            }
        }
    } else {
        v.gain = continuous_mutual_information(s, model, x, false);
        if (cost != nullptr) {
            v.cost = 0.0;
            const std::size_t n = s.dimension;
            for (std::size_t i = 0; i < s.size(); ++i) {
                const auto theta_i = std::span<const double>(s.points).subspan(i * n, n);
                for (const auto& [y, omega] : model.outcome_rule(theta_i, x)) {
                    v.cost += s.weight[i] * omega * cost->cost_given(y, x);
                }
            }
        }
    }
    if (cost != nullptr && !(v.cost > 0.0)) {
        throw Error(ErrorKind::model_violation, "expected cost must be positive");
    }
    return v;
}

struct ScanResult {
    std::size_t best = 0;
    CandidateValue value;
    double objective = -std::numeric_limits<double>::infinity();
    std::size_t evaluated = 0;
};

// Exact argmax over candidates. Candidates are visited in order of decreasing
// upper bound and the scan stops once no remaining bound can reach the best
// objective found, so skipped candidates never change the answer.
ScanResult scan_candidates(const WeightedSupport& s, const ObservationModel& model, const CostModel* cost,
                           bool cost_aware, std::span<const Placement> candidates, kernels::Execution ex) {
    const std::size_t m = candidates.size();
    if (m == 0) throw Error(ErrorKind::parameter, "candidate set is empty");
    const std::size_t K = model.outcome_count();
    std::vector<double> bound(m);
    for (std::size_t j = 0; j < m; ++j) {
        // E(C_x) is at least the cheapest outcome's cost at x
        double cost_floor = 1.0;
        if (cost_aware) {
            cost_floor = cost->min_cost();
            if (K > 0) {
                double c = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < K; ++k) c = std::min(c, cost->cost_given(model.outcome_value(k), candidates[j]));
                cost_floor = std::max(cost_floor, c);
            }
        }
        bound[j] = model.gain_upper_bound(s.lo, s.hi, candidates[j]) / cost_floor;
    }
    // Max-heap on the bound; ties pop the lower index first.
    const auto lower_priority = [&](std::size_t a, std::size_t b) {
        return bound[a] < bound[b] || (bound[a] == bound[b] && a > b);
    };
    std::vector<std::size_t> heap(m);
    std::iota(heap.begin(), heap.end(), std::size_t{0});
    std::make_heap(heap.begin(), heap.end(), lower_priority);

    const std::size_t batch = ex == kernels::Execution::parallel
                                  ? std::max<std::size_t>(16, 4 * static_cast<std::size_t>(omp_get_max_threads()))
                                  : 16;
    std::vector<std::size_t> picked;
    std::vector<CandidateValue> values(batch);
    ScanResult r;
    bool have_best = false;
    while (!heap.empty()) {
        if (have_best && bound[heap.front()] < r.objective * (1.0 - 1e-9) - 1e-15) break;
        picked.clear();
        while (!heap.empty() && picked.size() < batch) {
            std::pop_heap(heap.begin(), heap.end(), lower_priority);
            picked.push_back(heap.back());
            heap.pop_back();
        }
        kernels::for_each_index(ex, picked.size(), [&](std::size_t k) {
            values[k] = evaluate_candidate(s, model, cost, candidates[picked[k]]);
        });
        for (std::size_t k = 0; k < picked.size(); ++k) {
            const std::size_t j = picked[k];
            const double obj = cost_aware ? values[k].gain / values[k].cost : values[k].gain;
            if (!have_best || obj > r.objective || (obj == r.objective && candidates[j] < candidates[r.best])) {
                r.best = j;
                r.objective = obj;
                r.value = values[k];
                have_best = true;
            }
        }
        r.evaluated += picked.size();
    }
    return r;
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::greedy_info: return "greedy-info";
        case StrategyKind::myopic_gain_per_cost: return "myopic-gain-per-cost";
        case StrategyKind::offline_uniform: return "offline-uniform";
        case StrategyKind::fixed_x: return "fixed-x";
        case StrategyKind::random_uniform: return "random-uniform";
    }
    return "unknown";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) {
    for (auto k : {StrategyKind::greedy_info, StrategyKind::myopic_gain_per_cost, StrategyKind::offline_uniform,
                   StrategyKind::fixed_x, StrategyKind::random_uniform}) {
        if (name == to_string(k)) return k;
    }
    if (name == "greedy") return StrategyKind::greedy_info;
    if (name == "myopic") return StrategyKind::myopic_gain_per_cost;
    return std::nullopt;
}

bool is_offline(StrategyKind kind) {
    return kind == StrategyKind::offline_uniform || kind == StrategyKind::fixed_x ||
           kind == StrategyKind::random_uniform;
}

double expected_information_gain(const GridPosterior& post, const ObservationModel& model, Placement x) {
    const WeightedSupport s = post.support();
    return evaluate_candidate(s, model, nullptr, x).gain;
}

double expected_information_gain_kl(const GridPosterior& post, const ObservationModel& model, Placement x) {
    const WeightedSupport s = post.support();
    const std::size_t K = model.outcome_count();
    if (K == 0) return continuous_mutual_information(s, model, x, true);
    std::vector<double> probs(K * s.size());
    model.outcome_probabilities(x, s.points, probs);
    return kernels::discrete_mutual_information_kl(s.weight, probs, K);
}

double quadratic_gain_approximation(const GridPosterior& post, const ObservationModel& model, Placement x) {
    const PosteriorSummary sum = summarize(post);
    const std::vector<double> mean(sum.mean.data(), sum.mean.data() + sum.mean.size());
    const Eigen::MatrixXd info = model.fisher(mean, x);
    return 0.5 * sum.covariance.cwiseProduct(info).sum();
}

double predictive_expected_cost(const GridPosterior& post, const ObservationModel& model,
                                const CostModel& cost, Placement x) {
    const WeightedSupport s = post.support();
    return evaluate_candidate(s, model, &cost, x).cost;
}

PlacementDecision choose_greedy(const GridPosterior& post, const ObservationModel& model,
                                std::span<const Placement> candidates, kernels::Execution ex) {
    const WeightedSupport s = post.support();
    const ScanResult r = scan_candidates(s, model, nullptr, false, candidates, ex);
    PlacementDecision d;
    d.x = candidates[r.best];
    d.expected_gain_nats = r.value.gain;
    d.expected_cost = 1.0;
    d.objective = r.objective;
    d.sup_objective = r.objective;
    d.efficiency_ratio = 1.0;
    d.evaluated = r.evaluated;
    return d;
}

PlacementDecision choose_myopic_cost_aware(const GridPosterior& post, const ObservationModel& model,
                                           const CostModel& cost, std::span<const Placement> candidates,
                                           kernels::Execution ex) {
    const WeightedSupport s = post.support();
    const ScanResult r = scan_candidates(s, model, &cost, true, candidates, ex);
    PlacementDecision d;
    d.x = candidates[r.best];
    d.expected_gain_nats = r.value.gain;
    d.expected_cost = r.value.cost;
    d.objective = r.objective;
    d.sup_objective = r.objective;
    d.efficiency_ratio = 1.0;
    d.evaluated = r.evaluated;
    return d;
}

std::vector<std::size_t> low_discrepancy_order(std::size_t n) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t j = 0; j < (std::size_t{1} << bits); ++j) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b) {
            if (j & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
        }
        if (r < n) order.push_back(r);
    }
    return order;
}

PlacementDecision choose_baseline(StrategyKind kind, std::size_t t, std::span<const Placement> candidates,
                                  Rng& rng, Placement fixed_x) {
    PlacementDecision d;
    switch (kind) {
        case StrategyKind::offline_uniform: {
            if (candidates.empty()) throw Error(ErrorKind::parameter, "candidate set is empty");
            const auto order = low_discrepancy_order(candidates.size());
            d.x = candidates[order[(t - 1) % candidates.size()]];
            break;
        }
        case StrategyKind::fixed_x:
            d.x = fixed_x;
            break;
        case StrategyKind::random_uniform:
            if (candidates.empty()) throw Error(ErrorKind::parameter, "candidate set is empty");
            d.x = candidates[uniform_index(rng, candidates.size())];
            break;
        default:
            throw Error(ErrorKind::parameter, "choose_baseline needs an offline strategy kind");
    }
    return d;
}

void annotate_decision(PlacementDecision& decision, const GridPosterior& post, const ObservationModel& model,
                       const CostModel& cost, std::span<const Placement> candidates, bool cost_aware,
                       kernels::Execution ex) {
    const WeightedSupport s = post.support();
    const CandidateValue v = evaluate_candidate(s, model, &cost, decision.x);
    decision.expected_gain_nats = v.gain;
    decision.expected_cost = v.cost;
    decision.objective = cost_aware ? v.gain / v.cost : v.gain;
    const ScanResult r = scan_candidates(s, model, cost_aware ? &cost : nullptr, cost_aware, candidates, ex);
    decision.sup_objective = std::max(r.objective, decision.objective);
    decision.efficiency_ratio = decision.sup_objective > 0.0 ? decision.objective / decision.sup_objective : 1.0;
    decision.evaluated = r.evaluated + 1;
}

}  // namespace seqdesign
