#include "seqdesign/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqdesign/error.hpp"

namespace seqdesign {

double rho(const std::function<bool(std::int64_t)>& in_set, std::int64_t a, std::int64_t b) {
    if (!(a < b)) throw Error(ErrorKind::parameter, "rho needs a < b");
    std::int64_t count = 0;
    for (std::int64_t k = a; k < b; ++k) {
        if (in_set(k)) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(b - a);
}

MostTrialsResult most_trials_converges(std::span<const double> series, double limit, double eps,
                                       double window_tail, double threshold) {
    if (series.empty()) throw Error(ErrorKind::parameter, "series is empty");
    if (!(eps > 0.0)) throw Error(ErrorKind::parameter, "eps must be positive");
    if (!(window_tail > 0.0 && window_tail <= 1.0)) {
        throw Error(ErrorKind::parameter, "window fraction must lie in (0, 1]");
    }
    const std::size_t T = series.size();
    const auto len = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(window_tail * static_cast<double>(T))));
    std::size_t hits = 0;
    for (std::size_t k = T - len; k < T; ++k) {
        if (std::abs(series[k] - limit) < eps) ++hits;
    }
    MostTrialsResult r;
    r.fraction = static_cast<double>(hits) / static_cast<double>(len);
    r.verdict = r.fraction >= threshold;
    return r;
}

std::vector<Eigen::MatrixXd> track_B(const TrialTrace& trace, Clock clock) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(trace.size());
    Eigen::MatrixXd sum;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const auto& r = trace[k];
        if (r.observed_info.size() == 0) throw Error(ErrorKind::parameter, "trace has no observed information");
        if (k == 0) {
            sum = r.observed_info;
        } else {
            sum += r.observed_info;
        }
        const double denom = clock == Clock::unit_time ? static_cast<double>(k + 1) : r.cum_cost;
        out.push_back(sum / denom);
    }
    return out;
}

std::vector<Eigen::MatrixXd> track_fisher_average(const TrialTrace& trace) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(trace.size());
    Eigen::MatrixXd sum;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        if (k == 0) {
            sum = trace[k].fisher_at_truth;
        } else {
            sum += trace[k].fisher_at_truth;
        }
        out.push_back(sum / static_cast<double>(k + 1));
    }
    return out;
}

std::vector<double> entropy_residual(std::span<const double> entropy, std::span<const double> clock,
                                     double h_star, std::size_t n) {
    std::vector<double> out(entropy.size());
    const double half_n = 0.5 * static_cast<double>(n);
    for (std::size_t k = 0; k < entropy.size(); ++k) {
        out[k] = entropy[k] + half_n * std::log(clock[k]) - h_star;
    }
    return out;
}

std::vector<double> entropy_residual(const TrialTrace& trace, double h_star, Clock clock, std::size_t n) {
    std::vector<double> h(trace.size());
    std::vector<double> c(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k) {
        h[k] = trace[k].entropy_nats;
        c[k] = clock == Clock::unit_time ? static_cast<double>(trace[k].t) : trace[k].cum_cost;
    }
    return entropy_residual(h, c, h_star, n);
}

std::vector<double> gain_cost_ratio(const TrialTrace& trace) {
    std::vector<double> out(trace.size());
    double g = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        g += trace[k].gain_nats;
        out[k] = g / trace[k].cum_cost;
    }
    return out;
}

InfoBudgetResult info_budget_check(std::span<const double> cumulative_gain, std::size_t n) {
    if (cumulative_gain.size() < 100) throw Error(ErrorKind::parameter, "info budget check needs >= 100 trials");
    const std::size_t T = cumulative_gain.size();
    const std::size_t q = T - T / 4;
    double running = -std::numeric_limits<double>::infinity();
    double at_q = running;
    for (std::size_t k = 0; k < T; ++k) {
        const double excess = cumulative_gain[k] - static_cast<double>(n) * std::log(static_cast<double>(k + 1));
        running = std::max(running, excess);
        if (k + 1 == q) at_q = running;
    }
    return {running, running - at_q < 0.1};
}

InfoBudgetResult info_budget_check(const TrialTrace& trace, std::size_t n) {
    std::vector<double> cum(trace.size());
    double g = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        g += trace[k].gain_nats;
        cum[k] = g;
    }
    return info_budget_check(cum, n);
}

AsymptoticReport build_report(const TrialTrace& trace, std::size_t n, bool smooth, double h_star_unit,
                              double h_star_cost, const DiagnosticOptions& options) {
    AsymptoticReport rep;
    rep.ratio = gain_cost_ratio(trace);
    double g = 0.0;
    rep.info_budget.resize(trace.size());
    std::vector<double> cum(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k) {
        g += trace[k].gain_nats;
        cum[k] = g;
        rep.info_budget[k] = g - static_cast<double>(n) * std::log(static_cast<double>(k + 1));
    }
    if (trace.size() >= 100) rep.budget = info_budget_check(cum, n);
    if (!smooth || trace.empty()) return rep;

    for (auto clock : {Clock::unit_time, Clock::cost}) {
        auto& det = clock == Clock::unit_time ? rep.det_B_unit : rep.det_B_cost;
        for (const auto& B : track_B(trace, clock)) det.push_back(B.determinant());
    }
    rep.residual_unit = entropy_residual(trace, h_star_unit, Clock::unit_time, n);
    rep.residual_cost = entropy_residual(trace, h_star_cost, Clock::cost, n);
    rep.most_trials_unit = most_trials_converges(rep.residual_unit, 0.0, options.epsilon, options.window_tail,
                                                 options.threshold);
    rep.most_trials_cost = most_trials_converges(rep.residual_cost, 0.0, options.epsilon, options.window_tail,
                                                 options.threshold);
    return rep;
}

}  // namespace seqdesign
