#pragma once
#include <filesystem>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "seqdesign/diagnostics.hpp"
#include "seqdesign/doptimal.hpp"
#include "seqdesign/experiment.hpp"

namespace seqdesign {

inline constexpr std::string_view trace_format = "seqdesign-trace/1";
inline constexpr std::string_view summary_format = "seqdesign-summary/1";
inline constexpr std::string_view trace_header =
    "t,x,y,cost,cum_cost,gain_nats,entropy_nats,det_Bt_unit,det_Bt_cost,residual_unit,residual_cost,"
    "efficiency_ratio";

// Columns of a trace CSV; the diagnostics columns hold NaN for non-smooth models.
struct TraceTable {
    std::vector<double> t, x, y, cost, cum_cost, gain_nats, entropy_nats;
    std::vector<double> det_Bt_unit, det_Bt_cost, residual_unit, residual_cost, efficiency_ratio;

    std::size_t size() const { return t.size(); }
};

// Values are written with 17 significant digits so a re-read is exact.
void write_trace_csv(const std::filesystem::path& path, const TrialTrace& trace, const AsymptoticReport& report);
TraceTable read_trace_csv(const std::filesystem::path& path);

nlohmann::json design_json(const DesignWeights& design);
nlohmann::json config_json(const ExperimentConfig& config);
nlohmann::json summary_json(const RunResult& result);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Aggregates every trace_*.csv under dir (recursively) into per-t quantile
// bands; returns the number of traces read.
std::size_t write_report_csv(const std::filesystem::path& dir, const std::filesystem::path& out);

}  // namespace seqdesign
