#pragma once
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "seqdesign/cost.hpp"
#include "seqdesign/kernels.hpp"
#include "seqdesign/models.hpp"
#include "seqdesign/posterior.hpp"
#include "seqdesign/rng.hpp"

namespace seqdesign {

struct PlacementDecision {
    Placement x = 0.0;
    double expected_gain_nats = 0.0;
    double expected_cost = 1.0;
    double objective = 0.0;
    double sup_objective = 0.0;
    double efficiency_ratio = 1.0;
    std::size_t evaluated = 0;  // candidates scored exactly
};

enum class StrategyKind { greedy_info, myopic_gain_per_cost, offline_uniform, fixed_x, random_uniform };

std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> parse_strategy(std::string_view name);
bool is_offline(StrategyKind kind);

// I_t(Theta; Y_x) in nats, entropy-difference form.
double expected_information_gain(const GridPosterior& post, const ObservationModel& model, Placement x);
// sum_y p_t(y) KL(p_t(theta|y) || p_t(theta)); equal to the above up to rounding.
double expected_information_gain_kl(const GridPosterior& post, const ObservationModel& model, Placement x);

// Small-posterior approximation (1/2) Sigma_t : I_x(mean_t) of the gain.
double quadratic_gain_approximation(const GridPosterior& post, const ObservationModel& model, Placement x);

// E_t(C_x) = sum_y p_t(y) E(C | y, x).
double predictive_expected_cost(const GridPosterior& post, const ObservationModel& model,
                                const CostModel& cost, Placement x);

// Ties go to the smallest placement.
PlacementDecision choose_greedy(const GridPosterior& post, const ObservationModel& model,
                                std::span<const Placement> candidates,
                                kernels::Execution ex = kernels::Execution::parallel);

// Maximises I_t(Theta; Y_x) / E_t(C_x).
PlacementDecision choose_myopic_cost_aware(const GridPosterior& post, const ObservationModel& model,
                                           const CostModel& cost, std::span<const Placement> candidates,
                                           kernels::Execution ex = kernels::Execution::parallel);

// Placement rules that ignore the posterior. t is 1-based. Only x is filled in;
// see annotate_decision for the diagnostic fields.
PlacementDecision choose_baseline(StrategyKind kind, std::size_t t, std::span<const Placement> candidates,
                                  Rng& rng, Placement fixed_x = 0.0);

// Fills gain, cost, and the efficiency ratio against the best candidate under
// the matching objective (gain, or gain per cost when cost_aware).
void annotate_decision(PlacementDecision& decision, const GridPosterior& post,
                       const ObservationModel& model, const CostModel& cost,
                       std::span<const Placement> candidates, bool cost_aware,
                       kernels::Execution ex = kernels::Execution::parallel);

// Bit-reversal order of {0, ..., n-1}: every prefix is spread over the range.
std::vector<std::size_t> low_discrepancy_order(std::size_t n);

}  // namespace seqdesign
