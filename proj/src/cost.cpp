#include "seqdesign/cost.hpp"

#include <cmath>
#include <sstream>

#include "seqdesign/error.hpp"

namespace seqdesign {

CostModel::CostModel(Kind kind, CostFn fn, double min_cost, double max_cost, std::string label)
    : kind_(kind), fn_(std::move(fn)), min_cost_(min_cost), max_cost_(max_cost), label_(std::move(label)) {
    if (!(min_cost_ > 0.0) || !(max_cost_ >= min_cost_) || !std::isfinite(max_cost_)) {
        throw Error(ErrorKind::parameter, "cost bounds must satisfy 0 < min <= max < inf");
    }
}

CostModel CostModel::constant(double cost) {
    return CostModel(Kind::constant, [cost](Outcome, Placement) { return cost; }, cost, cost,
                     "constant");
}

CostModel CostModel::outcome_linear(double base, double surcharge) {
    if (surcharge < 0.0) throw Error(ErrorKind::parameter, "outcome-linear surcharge must be >= 0");
    return CostModel(
        Kind::outcome_linear,
        [base, surcharge](Outcome y, Placement) { return y > 0.5 ? base : base + surcharge; }, base,
        base + surcharge, "outcome-linear");
}

CostModel CostModel::custom(CostFn fn, double min_cost, double max_cost, std::string label) {
    return CostModel(Kind::custom, std::move(fn), min_cost, max_cost, std::move(label));
}

double CostModel::cost_given(Outcome y, Placement x) const {
    const double c = fn_(y, x);
    if (!(c > 0.0) || c > max_cost_ || c < min_cost_) {
        std::ostringstream msg;
        msg << "cost " << c << " at x=" << x << " outside [" << min_cost_ << ", " << max_cost_ << "]";
        throw Error(ErrorKind::model_violation, msg.str());
    }
    return c;
}

double CostModel::sample(Outcome y, Placement x, Rng&) const { return cost_given(y, x); }

double expected_cost_at(const CostModel& cost, const ObservationModel& model, Placement x,
                        std::span<const double> theta) {
    double total = 0.0;
    for (const auto& [y, p] : model.outcome_rule(theta, x)) {
        if (p > 0.0) total += p * cost.cost_given(y, x);
    }
    if (!(total > 0.0) || total > cost.max_cost() * (1.0 + 1e-12)) {
        throw Error(ErrorKind::model_violation, "expected cost outside (0, M]");
    }
    return total;
}

}  // namespace seqdesign
