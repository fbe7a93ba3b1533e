#pragma once
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seqdesign/config.hpp"
#include "seqdesign/diagnostics.hpp"
#include "seqdesign/doptimal.hpp"

namespace seqdesign {

// Reference D-optimal designs at the replicate's true parameter.
struct ReferenceDesign {
    bool available = false;
    DesignWeights unit_cost;
    DesignWeights per_cost;
};

struct ReplicateSummary {
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    std::vector<double> theta0;
    std::size_t trials = 0;
    double total_cost = 0.0;
    bool aborted = false;
    std::string message;
    bool budget_overrun = false;
    double final_residual_unit = 0.0;
    double final_residual_cost = 0.0;
    double final_det_B_unit = 0.0;
    double final_det_B_cost = 0.0;
    double final_ratio = 0.0;
    MostTrialsResult most_trials_unit;
    MostTrialsResult most_trials_cost;
    InfoBudgetResult info_budget;
    double local_mass = 0.0;      // posterior mass within local_radius of theta0
    double local_log_det = 0.0;   // log det of the local posterior covariance
    std::string trace_file;
};

struct RunResult {
    ExperimentConfig config;
    std::vector<TrialTrace> traces;
    std::vector<AsymptoticReport> reports;
    std::vector<ReferenceDesign> references;
    std::vector<ReplicateSummary> summaries;
    // Medians over replicates that were not aborted.
    double median_residual_unit = 0.0;
    double median_residual_cost = 0.0;
    double median_det_B_unit = 0.0;
    double median_det_B_cost = 0.0;
};

struct RunOptions {
    bool write_files = false;
    bool quiet = true;
    bool keep_traces = true;
};

// Validates first; a config error aborts before any simulation.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

struct SweepPoint {
    std::vector<double> theta0;  // empty when drawn from the prior
    std::uint64_t seed = 0;
    RunResult result;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<std::string> flagged;  // aborted replicates, "point/replicate: message"
};

// One run per theta0 in config.sweep.theta0, per prior draw, or per seed in
// config.sweep.seeds. Output for point k goes to <output_dir>/point_k.
SweepResult run_sweep(const ExperimentConfig& config, const RunOptions& options = {});

// Reference designs for the config's candidate set at theta0.
ReferenceDesign reference_design(const ExperimentConfig& config, const ObservationModel& model,
                                 const CostModel& cost, std::span<const double> theta0);

double median(std::vector<double> values);

}  // namespace seqdesign
