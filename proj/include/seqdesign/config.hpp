#pragma once
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqdesign/cost.hpp"
#include "seqdesign/diagnostics.hpp"
#include "seqdesign/doptimal.hpp"
#include "seqdesign/grid.hpp"
#include "seqdesign/models.hpp"
#include "seqdesign/strategies.hpp"

namespace seqdesign {

struct ModelSpec {
    std::string kind = "psychometric";  // psychometric | linear-gaussian | twenty-questions
    std::vector<double> lower{0.0};
    std::vector<double> upper{100.0};
    std::vector<std::size_t> grid{1024};  // cells per axis; one value applies to all axes
    std::size_t candidates = 512;
    std::vector<double> candidate_list;    // replaces the uniform candidate grid
    std::vector<double> extra_candidates;  // appended to it
    double x_lower = -1.0;                 // linear-gaussian placement interval
    double x_upper = 1.0;
    double noise_sd = 1.0;
    std::size_t quadrature_nodes = 32;
    std::size_t bits = 16;
};

struct CostSpec {
    std::string kind = "constant";  // constant | outcome-linear | channel
    double value = 1.0;
    double base = 1.0;
    double surcharge = 3.0;
    double cheap = 1.0;
    double costly = 2.0;
};

struct SweepSpec {
    std::vector<std::vector<double>> theta0;
    std::size_t prior_draws = 0;
    std::vector<std::uint64_t> seeds;
};

struct ExperimentConfig {
    ModelSpec model;
    CostSpec cost;
    StrategyKind strategy = StrategyKind::greedy_info;
    double fixed_x = 0.0;
    std::optional<std::vector<double>> theta0;  // nullopt: draw from the prior
    std::size_t trials = 0;
    double budget = 0.0;
    std::size_t replicates = 1;
    std::uint64_t seed = 1;
    bool renew_on_identify = false;
    DiagnosticOptions diagnostics;
    double local_radius = 1.0;
    CostNormalization normalization = CostNormalization::unit_cost;
    double design_tol = 1e-8;
    std::size_t design_max_iter = 100000;
    SweepSpec sweep;
    std::string output_dir = "out";
};

// INI-style sections ([model], [cost], [strategy], [experiment],
// [diagnostics], [design], [sweep], [output]) of `key = value` lines.
// Unknown sections or keys are validation errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Throws a validation Error naming the offending field.
void validate(const ExperimentConfig& config);

std::unique_ptr<ObservationModel> make_model(const ModelSpec& spec);
CostModel make_cost(const CostSpec& spec, const ObservationModel& model);
std::vector<Placement> make_candidates(const ModelSpec& spec, const ObservationModel& model);
std::shared_ptr<const ParameterGrid> make_grid(const ModelSpec& spec, const ObservationModel& model);

std::string_view to_string(CostNormalization normalization);

}  // namespace seqdesign
