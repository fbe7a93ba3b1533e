#include "seqdesign/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "seqdesign/error.hpp"

namespace seqdesign {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
    throw Error(ErrorKind::validation, field + ": " + why);
}

double parse_double(const std::string& field, std::string s) {
    boost::algorithm::trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) invalid(field, "expected a number, got '" + s + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& field, std::string s) {
    boost::algorithm::trim(s);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        invalid(field, "expected a non-negative integer, got '" + s + "'");
    }
    return v;
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, s, [sep](char c) { return c == sep; });
    for (auto& p : parts) boost::algorithm::trim(p);
    parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
    return parts;
}

std::vector<double> parse_doubles(const std::string& field, const std::string& s) {
    std::vector<double> out;
    for (const auto& p : split_list(s)) out.push_back(parse_double(field, p));
    if (out.empty()) invalid(field, "expected at least one number");
    return out;
}

bool parse_bool(const std::string& field, std::string s) {
    boost::algorithm::trim(s);
    boost::algorithm::to_lower(s);
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    invalid(field, "expected true/false, got '" + s + "'");
}

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"model",
         {"kind", "lower", "upper", "grid", "candidates", "candidate_list", "extra_candidates", "x_lower",
          "x_upper", "noise_sd", "quadrature_nodes", "bits"}},
        {"cost", {"kind", "value", "base", "surcharge", "cheap", "costly"}},
        {"strategy", {"kind", "fixed_x"}},
        {"experiment", {"theta0", "trials", "budget", "replicates", "seed", "renew_on_identify"}},
        {"diagnostics", {"epsilon", "window", "threshold", "local_radius"}},
        {"design", {"normalization", "tol", "max_iter"}},
        {"sweep", {"theta0", "prior_draws", "seeds"}},
        {"output", {"dir"}},
    };
    return keys;
}

}  // namespace

std::string_view to_string(CostNormalization normalization) {
    return normalization == CostNormalization::per_cost ? "per-cost" : "unit-cost";
}

ExperimentConfig parse_config(std::string_view text) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorKind::validation, std::string("config syntax: ") + e.message() + " (line " +
                                               std::to_string(e.line()) + ")");
    }

    ExperimentConfig c;
    for (const auto& [section, body] : tree) {
        auto allowed = schema().find(section);
        if (allowed == schema().end()) {
            if (body.empty()) invalid(section, "keys must live inside a [section]");
            invalid("[" + section + "]", "unknown section");
        }
        for (const auto& [key, node] : body) {
            const std::string field = section + "." + key;
            if (!allowed->second.count(key)) invalid(field, "unknown key");
            const std::string v = node.get_value<std::string>();
            if (section == "model") {
                auto& m = c.model;
                if (key == "kind") m.kind = boost::algorithm::trim_copy(v);
                else if (key == "lower") m.lower = parse_doubles(field, v);
                else if (key == "upper") m.upper = parse_doubles(field, v);
                else if (key == "grid") {
                    m.grid.clear();
                    for (const auto& p : split_list(v)) m.grid.push_back(parse_uint(field, p));
                } else if (key == "candidates") m.candidates = parse_uint(field, v);
                else if (key == "candidate_list") m.candidate_list = parse_doubles(field, v);
                else if (key == "extra_candidates") m.extra_candidates = parse_doubles(field, v);
                else if (key == "x_lower") m.x_lower = parse_double(field, v);
                else if (key == "x_upper") m.x_upper = parse_double(field, v);
                else if (key == "noise_sd") m.noise_sd = parse_double(field, v);
                else if (key == "quadrature_nodes") m.quadrature_nodes = parse_uint(field, v);
                else if (key == "bits") m.bits = parse_uint(field, v);
            } else if (section == "cost") {
                auto& k = c.cost;
                if (key == "kind") k.kind = boost::algorithm::trim_copy(v);
                else if (key == "value") k.value = parse_double(field, v);
                else if (key == "base") k.base = parse_double(field, v);
                else if (key == "surcharge") k.surcharge = parse_double(field, v);
                else if (key == "cheap") k.cheap = parse_double(field, v);
                else if (key == "costly") k.costly = parse_double(field, v);
            } else if (section == "strategy") {
                if (key == "kind") {
                    auto kind = parse_strategy(boost::algorithm::trim_copy(v));
                    if (!kind) invalid(field, "unknown strategy '" + v + "'");
                    c.strategy = *kind;
                } else if (key == "fixed_x") {
                    c.fixed_x = parse_double(field, v);
                }
            } else if (section == "experiment") {
                if (key == "theta0") {
                    if (boost::algorithm::trim_copy(v) == "prior") {
                        c.theta0.reset();
                    } else {
                        c.theta0 = parse_doubles(field, v);
                    }
                } else if (key == "trials") c.trials = parse_uint(field, v);
                else if (key == "budget") c.budget = parse_double(field, v);
                else if (key == "replicates") c.replicates = parse_uint(field, v);
                else if (key == "seed") c.seed = parse_uint(field, v);
                else if (key == "renew_on_identify") c.renew_on_identify = parse_bool(field, v);
            } else if (section == "diagnostics") {
                if (key == "epsilon") c.diagnostics.epsilon = parse_double(field, v);
                else if (key == "window") c.diagnostics.window_tail = parse_double(field, v);
                else if (key == "threshold") c.diagnostics.threshold = parse_double(field, v);
                else if (key == "local_radius") c.local_radius = parse_double(field, v);
            } else if (section == "design") {
                if (key == "normalization") {
                    const auto s = boost::algorithm::trim_copy(v);
                    if (s == "unit-cost") c.normalization = CostNormalization::unit_cost;
                    else if (s == "per-cost") c.normalization = CostNormalization::per_cost;
                    else invalid(field, "expected unit-cost or per-cost");
                } else if (key == "tol") c.design_tol = parse_double(field, v);
                else if (key == "max_iter") c.design_max_iter = parse_uint(field, v);
            } else if (section == "sweep") {
                if (key == "theta0") {
                    // Points separated by ';', coordinates by ','.
                    for (const auto& p : split_list(v, ';')) c.sweep.theta0.push_back(parse_doubles(field, p));
                } else if (key == "prior_draws") c.sweep.prior_draws = parse_uint(field, v);
                else if (key == "seeds") {
                    for (const auto& p : split_list(v)) c.sweep.seeds.push_back(parse_uint(field, p));
                }
            } else if (section == "output") {
                c.output_dir = boost::algorithm::trim_copy(v);
            }
        }
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::validation, "cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
    const auto& m = c.model;
    if (m.kind != "psychometric" && m.kind != "linear-gaussian" && m.kind != "twenty-questions") {
        invalid("model.kind", "unknown model '" + m.kind + "'");
    }
    if (m.kind != "twenty-questions") {
        if (m.lower.size() != m.upper.size()) invalid("model.upper", "must match model.lower in length");
        for (std::size_t a = 0; a < m.lower.size(); ++a) {
            if (!(m.upper[a] > m.lower[a])) invalid("model.upper", "must exceed model.lower on every axis");
        }
        if (m.kind == "psychometric" && m.lower.size() != 1) invalid("model.lower", "psychometric model is 1-D");
        if (m.grid.empty() || (m.grid.size() != 1 && m.grid.size() != m.lower.size())) {
            invalid("model.grid", "give one cell count or one per axis");
        }
        for (auto g : m.grid) {
            if (g < 1) invalid("model.grid", "cell counts must be positive");
        }
    } else if (m.bits < 1 || m.bits > 24) {
        invalid("model.bits", "must lie in 1..24");
    }
    if (m.candidate_list.empty() && m.candidates < 1 && m.kind != "twenty-questions") {
        invalid("model.candidates", "must be positive");
    }
    if (m.kind == "linear-gaussian") {
        if (!(m.noise_sd > 0.0)) invalid("model.noise_sd", "must be positive");
        if (!(m.x_upper > m.x_lower)) invalid("model.x_upper", "must exceed model.x_lower");
        if (m.quadrature_nodes < 1) invalid("model.quadrature_nodes", "must be positive");
    }

    const auto& k = c.cost;
    if (k.kind == "constant") {
        if (!(k.value > 0.0)) invalid("cost.value", "must be positive");
    } else if (k.kind == "outcome-linear") {
        if (!(k.base > 0.0)) invalid("cost.base", "must be positive");
        if (k.surcharge < 0.0) invalid("cost.surcharge", "must be non-negative");
    } else if (k.kind == "channel") {
        if (m.kind != "twenty-questions") invalid("cost.kind", "channel costs need the twenty-questions model");
        if (!(k.cheap > 0.0) || !(k.costly > 0.0)) invalid("cost.cheap", "channel costs must be positive");
    } else {
        invalid("cost.kind", "unknown cost model '" + k.kind + "'");
    }

    const bool has_trials = c.trials >= 1;
    const bool has_budget = c.budget > 0.0;
    if (has_trials == has_budget) {
        invalid("experiment.trials", "set exactly one of experiment.trials >= 1 or experiment.budget > 0");
    }
    if (c.replicates < 1) invalid("experiment.replicates", "must be at least 1");

    if (c.theta0) {
        auto model = make_model(m);
        const auto lo = model->lower_bounds();
        const auto hi = model->upper_bounds();
        if (c.theta0->size() != lo.size()) invalid("experiment.theta0", "has the wrong dimension");
        for (std::size_t a = 0; a < lo.size(); ++a) {
            if (!((*c.theta0)[a] >= lo[a] && (*c.theta0)[a] <= hi[a])) {
                invalid("experiment.theta0", "lies outside the model bounds");
            }
        }
    }
    if (c.strategy == StrategyKind::fixed_x && !std::isfinite(c.fixed_x)) invalid("strategy.fixed_x", "must be finite");

    if (!(c.diagnostics.epsilon > 0.0)) invalid("diagnostics.epsilon", "must be positive");
    if (!(c.diagnostics.window_tail > 0.0 && c.diagnostics.window_tail <= 1.0)) {
        invalid("diagnostics.window", "must lie in (0, 1]");
    }
    if (!(c.diagnostics.threshold >= 0.0 && c.diagnostics.threshold <= 1.0)) {
        invalid("diagnostics.threshold", "must lie in [0, 1]");
    }
    if (!(c.local_radius > 0.0)) invalid("diagnostics.local_radius", "must be positive");
    if (!(c.design_tol > 0.0)) invalid("design.tol", "must be positive");
}

std::unique_ptr<ObservationModel> make_model(const ModelSpec& spec) {
    if (spec.kind == "psychometric") {
        return std::make_unique<PsychometricModel>(spec.lower.at(0), spec.upper.at(0));
    }
    if (spec.kind == "linear-gaussian") {
        PlacementSet placements{spec.x_lower, spec.x_upper, {}};
        return std::make_unique<LinearGaussianModel>(spec.lower, spec.upper,
                                                     LinearGaussianModel::polynomial_features(spec.lower.size()),
                                                     placements, spec.noise_sd, spec.quadrature_nodes);
    }
    if (spec.kind == "twenty-questions") return std::make_unique<TwentyQuestionsModel>(spec.bits);
    throw Error(ErrorKind::validation, "model.kind: unknown model '" + spec.kind + "'");
}

CostModel make_cost(const CostSpec& spec, const ObservationModel& model) {
    if (spec.kind == "constant") return CostModel::constant(spec.value);
    if (spec.kind == "outcome-linear") return CostModel::outcome_linear(spec.base, spec.surcharge);
    if (spec.kind == "channel") {
        const auto* tq = dynamic_cast<const TwentyQuestionsModel*>(&model);
        if (tq == nullptr) throw Error(ErrorKind::validation, "cost.kind: channel costs need twenty-questions");
        const std::size_t bits = tq->bits();
        const double cheap = spec.cheap;
        const double costly = spec.costly;
        return CostModel::custom(
            [bits, cheap, costly](Outcome, Placement x) {
                return static_cast<std::size_t>(x) >= bits ? costly : cheap;
            },
            std::min(cheap, costly), std::max(cheap, costly), "channel");
    }
    throw Error(ErrorKind::validation, "cost.kind: unknown cost model '" + spec.kind + "'");
}

std::vector<Placement> make_candidates(const ModelSpec& spec, const ObservationModel& model) {
    std::vector<Placement> out = spec.candidate_list.empty() ? model.placements().candidates(spec.candidates)
                                                             : spec.candidate_list;
    out.insert(out.end(), spec.extra_candidates.begin(), spec.extra_candidates.end());
    return out;
}

std::shared_ptr<const ParameterGrid> make_grid(const ModelSpec& spec, const ObservationModel& model) {
    const auto lo = model.lower_bounds();
    const auto hi = model.upper_bounds();
    if (const auto* tq = dynamic_cast<const TwentyQuestionsModel*>(&model)) {
        return std::make_shared<const ParameterGrid>(lo, hi, std::vector<std::size_t>{tq->size()});
    }
    std::vector<std::size_t> cells(lo.size(), spec.grid.at(0));
    if (spec.grid.size() == lo.size()) cells = spec.grid;
    return std::make_shared<const ParameterGrid>(lo, hi, cells);
}

}  // namespace seqdesign
