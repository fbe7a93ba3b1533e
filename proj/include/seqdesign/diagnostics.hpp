#pragma once
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace seqdesign {

// One row of a simulated run. Matrices are evaluated at the true parameter.
struct TrialRecord {
    std::size_t t = 0;  // 1-based
    double x = 0.0;
    double y = 0.0;
    double cost = 0.0;
    double cum_cost = 0.0;
    double gain_nats = 0.0;     // H_{t-1} - H_t
    double entropy_nats = 0.0;  // H_t after the update
    Eigen::MatrixXd observed_info;  // -Hessian of log p(y_t | theta0, x_t); empty if not smooth
    Eigen::MatrixXd fisher_at_truth;
    double expected_cost_at_truth = 0.0;
    double expected_gain_nats = 0.0;
    double efficiency_ratio = 1.0;
    bool renewed = false;      // a fresh parameter was drawn before this trial
    bool over_budget = false;  // this trial pushed cum_cost past the budget
};

using TrialTrace = std::vector<TrialRecord>;

enum class Clock { unit_time, cost };

// rho_{a,b}(K) = |K cap [a, b)| / (b - a).
double rho(const std::function<bool(std::int64_t)>& in_set, std::int64_t a, std::int64_t b);

struct MostTrialsResult {
    double fraction = 0.0;
    bool verdict = false;
};

// Fraction of the trailing window (last `window_tail` of the series) with
// |s_k - limit| < eps, and whether it reaches `threshold`.
MostTrialsResult most_trials_converges(std::span<const double> series, double limit, double eps,
                                       double window_tail = 0.5, double threshold = 0.95);

// B_t = -(1/clock_t) sum_k Hessian_k, clock t or C_t.
std::vector<Eigen::MatrixXd> track_B(const TrialTrace& trace, Clock clock);
// (1/t) sum_k I_{x_k}(theta0).
std::vector<Eigen::MatrixXd> track_fisher_average(const TrialTrace& trace);

// H_t + (n/2) log(clock_t) - H*.
std::vector<double> entropy_residual(const TrialTrace& trace, double h_star, Clock clock, std::size_t n);
std::vector<double> entropy_residual(std::span<const double> entropy, std::span<const double> clock,
                                     double h_star, std::size_t n);

// sum g / sum c.
std::vector<double> gain_cost_ratio(const TrialTrace& trace);

struct InfoBudgetResult {
    double c_fit = 0.0;  // running max of cumulative gain - n log t
    bool verdict = false;
};

// cumulative_gain[t-1] is the realised gain over the first t trials.
InfoBudgetResult info_budget_check(std::span<const double> cumulative_gain, std::size_t n);
InfoBudgetResult info_budget_check(const TrialTrace& trace, std::size_t n);

struct DiagnosticOptions {
    double epsilon = 0.15;
    double window_tail = 0.5;
    double threshold = 0.95;
};

struct AsymptoticReport {
    std::vector<double> det_B_unit;
    std::vector<double> det_B_cost;
    std::vector<double> residual_unit;
    std::vector<double> residual_cost;
    MostTrialsResult most_trials_unit;
    MostTrialsResult most_trials_cost;
    std::vector<double> ratio;
    std::vector<double> info_budget;  // cumulative gain - n log t
    InfoBudgetResult budget;
};

// Smooth models get the B_t and residual series; otherwise those stay empty.
AsymptoticReport build_report(const TrialTrace& trace, std::size_t n, bool smooth, double h_star_unit,
                              double h_star_cost, const DiagnosticOptions& options);

}  // namespace seqdesign
