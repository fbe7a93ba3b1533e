#include "seqdesign/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "seqdesign/error.hpp"
#include "seqdesign/rng.hpp"

namespace seqdesign {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double at(const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : nan; }

// JSON has no NaN; map it to null.
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

double quantile(std::vector<double> v, double q) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double a) { return std::isnan(a); }), v.end());
    if (v.empty()) return nan;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= v.size()) return v.back();
    return v[k] + (pos - static_cast<double>(k)) * (v[k + 1] - v[k]);
}

}  // namespace

void write_trace_csv(const std::filesystem::path& path, const TrialTrace& trace, const AsymptoticReport& report) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out << trace_header << '\n';
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& r = trace[i];
        out << r.t << ',' << fmt(r.x) << ',' << fmt(r.y) << ',' << fmt(r.cost) << ',' << fmt(r.cum_cost) << ','
            << fmt(r.gain_nats) << ',' << fmt(r.entropy_nats) << ',' << fmt(at(report.det_B_unit, i)) << ','
            << fmt(at(report.det_B_cost, i)) << ',' << fmt(at(report.residual_unit, i)) << ','
            << fmt(at(report.residual_cost, i)) << ',' << fmt(r.efficiency_ratio) << '\n';
    }
    if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

TraceTable read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != trace_header) {
        throw Error(ErrorKind::io, path.string() + ": unexpected trace header");
    }
    TraceTable tab;
    std::vector<double>* cols[] = {&tab.t, &tab.x, &tab.y, &tab.cost, &tab.cum_cost, &tab.gain_nats,
                                   &tab.entropy_nats, &tab.det_Bt_unit, &tab.det_Bt_cost, &tab.residual_unit,
                                   &tab.residual_cost, &tab.efficiency_ratio};
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::size_t c = 0;
        while (std::getline(ss, field, ',')) {
            if (c >= std::size(cols)) break;
            double v;
            if (field == "NaN" || field == "nan") {
                v = nan;
            } else {
                try {
                    v = std::stod(field);
                } catch (const std::exception&) {
                    throw Error(ErrorKind::io, path.string() + ":" + std::to_string(lineno) + ": bad number");
                }
            }
            cols[c++]->push_back(v);
        }
        if (c != std::size(cols)) {
            throw Error(ErrorKind::io, path.string() + ":" + std::to_string(lineno) + ": wrong field count");
        }
    }
    return tab;
}

nlohmann::json design_json(const DesignWeights& d) {
    nlohmann::json j;
    auto support = nlohmann::json::array();
    for (std::size_t i = 0; i < d.placements.size(); ++i) {
        if (d.weights[i] <= 1e-12) continue;
        support.push_back({{"x", d.placements[i]}, {"weight", d.weights[i]}});
    }
    j["support"] = support;
    j["B_star"] = matrix_json(d.B_star);
    j["log_det"] = num(d.log_det);
    j["h_star_nats"] = num(d.h_star_nats);
    j["gap"] = num(d.gap);
    j["iterations"] = d.iterations;
    j["converged"] = d.converged;
    return j;
}

nlohmann::json config_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["model"] = {{"kind", c.model.kind},
                  {"lower", c.model.lower},
                  {"upper", c.model.upper},
                  {"grid", c.model.grid},
                  {"candidates", c.model.candidates}};
    j["cost"] = {{"kind", c.cost.kind}};
    j["strategy"] = std::string(to_string(c.strategy));
    if (c.theta0) {
        j["theta0"] = *c.theta0;
    } else {
        j["theta0"] = "prior";
    }
    j["trials"] = c.trials;
    j["budget"] = c.budget;
    j["replicates"] = c.replicates;
    j["seed"] = c.seed;
    j["normalization"] = std::string(to_string(c.normalization));
    j["epsilon"] = c.diagnostics.epsilon;
    j["local_radius"] = c.local_radius;
    return j;
}

nlohmann::json summary_json(const RunResult& result) {
    nlohmann::json j;
    j["format"] = summary_format;
    j["trace_format"] = trace_format;
    j["rng"] = rng_name;
    j["config"] = config_json(result.config);
    auto reps = nlohmann::json::array();
    for (std::size_t r = 0; r < result.summaries.size(); ++r) {
        const auto& s = result.summaries[r];
        nlohmann::json e;
        e["replicate"] = s.replicate;
        e["seed"] = s.seed;
        e["theta0"] = s.theta0;
        e["trials"] = s.trials;
        e["total_cost"] = num(s.total_cost);
        e["aborted"] = s.aborted;
        if (s.aborted) e["message"] = s.message;
        e["budget_overrun"] = s.budget_overrun;
        e["final"] = {{"det_B_unit", num(s.final_det_B_unit)},
                      {"det_B_cost", num(s.final_det_B_cost)},
                      {"residual_unit", num(s.final_residual_unit)},
                      {"residual_cost", num(s.final_residual_cost)},
                      {"gain_cost_ratio", num(s.final_ratio)}};
        e["most_trials"] = {
            {"unit", {{"fraction", s.most_trials_unit.fraction}, {"verdict", s.most_trials_unit.verdict}}},
            {"cost", {{"fraction", s.most_trials_cost.fraction}, {"verdict", s.most_trials_cost.verdict}}}};
        e["info_budget"] = {{"c_fit", num(s.info_budget.c_fit)}, {"verdict", s.info_budget.verdict}};
        e["local"] = {{"mass", num(s.local_mass)}, {"log_det_cov", num(s.local_log_det)}};
        if (!s.trace_file.empty()) e["trace_file"] = s.trace_file;
        if (r < result.references.size() && result.references[r].available) {
            e["reference"] = {{"unit_cost", design_json(result.references[r].unit_cost)},
                              {"per_cost", design_json(result.references[r].per_cost)}};
        }
        reps.push_back(e);
    }
    j["replicates"] = reps;
    j["median"] = {{"residual_unit", num(result.median_residual_unit)},
                   {"residual_cost", num(result.median_residual_cost)},
                   {"det_B_unit", num(result.median_det_B_unit)},
                   {"det_B_cost", num(result.median_det_B_cost)}};
    return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::size_t write_report_csv(const std::filesystem::path& dir, const std::filesystem::path& out_path) {
    if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::io, "not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.rfind("trace_", 0) == 0 && e.path().extension() == ".csv") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error(ErrorKind::io, "no trace_*.csv under " + dir.string());

    struct Bucket {
        std::vector<double> x, entropy, det, residual;
    };
    std::map<long long, Bucket> by_t;
    for (const auto& f : files) {
        const TraceTable tab = read_trace_csv(f);
        for (std::size_t i = 0; i < tab.size(); ++i) {
            auto& b = by_t[static_cast<long long>(tab.t[i])];
            b.x.push_back(tab.x[i]);
            b.entropy.push_back(tab.entropy_nats[i]);
            b.det.push_back(tab.det_Bt_unit[i]);
            b.residual.push_back(tab.residual_unit[i]);
        }
    }

    std::ofstream out(out_path);
    if (!out) throw Error(ErrorKind::io, "cannot write " + out_path.string());
    out << "t,count";
    for (const char* col : {"x", "entropy_nats", "det_Bt_unit", "residual_unit"}) {
        for (const char* q : {"q10", "q50", "q90"}) out << ',' << col << '_' << q;
    }
    out << '\n';
    for (const auto& [t, b] : by_t) {
        out << t << ',' << b.x.size();
        for (const auto* v : {&b.x, &b.entropy, &b.det, &b.residual}) {
            for (double q : {0.1, 0.5, 0.9}) out << ',' << fmt(quantile(*v, q));
        }
        out << '\n';
    }
    return files.size();
}

}  // namespace seqdesign
