#pragma once
#include <functional>
#include <span>
#include <string>

#include "seqdesign/models.hpp"
#include "seqdesign/rng.hpp"

namespace seqdesign {

// Cost of one observation. The cost depends on the parameter only through the
// outcome, so the sampling interface never sees theta.
class CostModel {
public:
    enum class Kind { constant, outcome_linear, custom };
    using CostFn = std::function<double(Outcome, Placement)>;

    static CostModel constant(double cost);
    // base + surcharge * [y = 0]
    static CostModel outcome_linear(double base, double surcharge);
    // fn must stay within [min_cost, max_cost]; violations raise model-violation.
    static CostModel custom(CostFn fn, double min_cost, double max_cost, std::string label);

    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    double min_cost() const { return min_cost_; }
    double max_cost() const { return max_cost_; }

    // E(C | y, x).
    double cost_given(Outcome y, Placement x) const;
    double sample(Outcome y, Placement x, Rng& rng) const;

private:
    CostModel(Kind kind, CostFn fn, double min_cost, double max_cost, std::string label);

    Kind kind_;
    CostFn fn_;
    double min_cost_;
    double max_cost_;
    std::string label_;
};

// E(C_x | theta) = sum_y p(y | theta, x) E(C | y, x).
double expected_cost_at(const CostModel& cost, const ObservationModel& model, Placement x,
                        std::span<const double> theta);

}  // namespace seqdesign
