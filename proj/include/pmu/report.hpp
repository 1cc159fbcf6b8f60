#pragma once

// Run reports: JSON (round-trippable) and plain text. All bus numbers in a
// report are 1-based.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmu/hbmo.hpp"
#include "pmu/network.hpp"
#include "pmu/observability.hpp"

namespace pmu {

inline const char* to_string(Contingency c) {
  switch (c) {
    case Contingency::Base: return "base";
    case Contingency::LineOutage: return "line-outage";
    case Contingency::PmuLoss: return "pmu-loss";
  }
  return "?";
}

inline const char* to_string(PmuLossMode m) {
  return m == PmuLossMode::RemovalSim ? "removal-sim" : "count-threshold";
}

inline Contingency contingency_from_string(const std::string& s) {
  if (s == "base") return Contingency::Base;
  if (s == "line-outage") return Contingency::LineOutage;
  if (s == "pmu-loss") return Contingency::PmuLoss;
  throw std::invalid_argument("unknown regime '" + s + "'");
}

inline PmuLossMode loss_mode_from_string(const std::string& s) {
  if (s == "removal-sim") return PmuLossMode::RemovalSim;
  if (s == "count-threshold") return PmuLossMode::CountThreshold;
  throw std::invalid_argument("unknown pmu-loss mode '" + s + "'");
}

struct CheckVerdict {
  std::string name;  // "observability", "line-outage" or "pmu-loss"
  bool passed = false;
  std::vector<std::int64_t> failing;  // line ids or 1-based buses

  friend bool operator==(const CheckVerdict&, const CheckVerdict&) = default;
};

struct OracleSummary {
  std::size_t optimum_count = 0;
  std::uint64_t subsets_examined = 0;

  friend bool operator==(const OracleSummary&, const OracleSummary&) = default;
};

struct Report {
  std::string command;
  std::string case_path;
  std::string format;
  std::string algorithm;
  std::string regime;
  bool use_zib = false;
  std::string pmu_loss_mode;
  int mob = 2;

  std::size_t bus_count = 0;
  std::vector<std::int64_t> placement;
  std::size_t cardinality = 0;
  double total_cost = 0.0;
  bool feasible = false;
  std::vector<int> direct_counts;
  std::vector<std::int64_t> zib_derived;
  double redundancy_index = 0.0;
  std::vector<CheckVerdict> checks;

  std::optional<std::uint64_t> seed;
  std::optional<nlohmann::json> params;
  std::vector<double> history;
  std::optional<std::uint64_t> evaluations;
  std::optional<OracleSummary> oracle;
  double wall_time_ms = 0.0;

  bool all_checks_pass() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  friend bool operator==(const Report&, const Report&) = default;
};

inline void to_json(nlohmann::json& j, const CheckVerdict& c) {
  j = {{"name", c.name}, {"passed", c.passed}, {"failing", c.failing}};
}
inline void from_json(const nlohmann::json& j, CheckVerdict& c) {
  j.at("name").get_to(c.name);
  j.at("passed").get_to(c.passed);
  j.at("failing").get_to(c.failing);
}

inline nlohmann::json params_to_json(const HbmoParams& p, const Network& net) {
  return {{"n_drones", p.n_drones},
          {"spermatheca_capacity", p.spermatheca_capacity},
          {"n_broods", p.n_broods},
          {"speed_init", p.speed_init},
          {"speed_decay", p.speed_decay},
          {"speed_min", p.speed_min},
          {"max_iterations", p.max_iterations},
          {"mutation_rate", p.mutation_rate},
          {"penalty_weight", resolved_penalty(p, net)},
          {"seed", p.seed},
          {"stagnation_window", p.stagnation_window}};
}

/// Overlays keys present in `j` onto `p`. Unknown keys are an error.
inline void apply_params(const nlohmann::json& j, HbmoParams& p) {
  if (!j.is_object()) throw std::invalid_argument("params must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "n_drones") value.get_to(p.n_drones);
    else if (key == "spermatheca_capacity") value.get_to(p.spermatheca_capacity);
    else if (key == "n_broods") value.get_to(p.n_broods);
    else if (key == "speed_init") value.get_to(p.speed_init);
    else if (key == "speed_decay") value.get_to(p.speed_decay);
    else if (key == "speed_min") value.get_to(p.speed_min);
    else if (key == "max_iterations") value.get_to(p.max_iterations);
    else if (key == "mutation_rate") value.get_to(p.mutation_rate);
    else if (key == "penalty_weight") p.penalty_weight = value.get<double>();
    else if (key == "seed") value.get_to(p.seed);
    else if (key == "stagnation_window") value.get_to(p.stagnation_window);
    else throw std::invalid_argument("unknown parameter '" + key + "'");
  }
}

inline void to_json(nlohmann::json& j, const Report& r) {
  j = nlohmann::json::object();
  j["command"] = r.command;
  j["case"] = r.case_path;
  j["format"] = r.format;
  j["algorithm"] = r.algorithm;
  j["regime"] = {{"kind", r.regime}, {"zib", r.use_zib}, {"pmu_loss_mode", r.pmu_loss_mode},
                 {"mob", r.mob}};
  j["bus_count"] = r.bus_count;
  j["placement"] = r.placement;
  j["cardinality"] = r.cardinality;
  j["total_cost"] = r.total_cost;
  j["feasible"] = r.feasible;
  j["direct_counts"] = r.direct_counts;
  j["zib_derived"] = r.zib_derived;
  j["redundancy_index"] = r.redundancy_index;
  j["checks"] = r.checks;
  if (r.seed) j["seed"] = *r.seed;
  if (r.params) j["params"] = *r.params;
  if (!r.history.empty()) j["history"] = r.history;
  if (r.evaluations) j["evaluations"] = *r.evaluations;
  if (r.oracle)
    j["oracle"] = {{"optimum_count", r.oracle->optimum_count},
                   {"subsets_examined", r.oracle->subsets_examined}};
  j["wall_time_ms"] = r.wall_time_ms;
}

inline void from_json(const nlohmann::json& j, Report& r) {
  j.at("command").get_to(r.command);
  j.at("case").get_to(r.case_path);
  j.at("format").get_to(r.format);
  j.at("algorithm").get_to(r.algorithm);
  const auto& reg = j.at("regime");
  reg.at("kind").get_to(r.regime);
  reg.at("zib").get_to(r.use_zib);
  reg.at("pmu_loss_mode").get_to(r.pmu_loss_mode);
  reg.at("mob").get_to(r.mob);
  j.at("bus_count").get_to(r.bus_count);
  j.at("placement").get_to(r.placement);
  j.at("cardinality").get_to(r.cardinality);
  j.at("total_cost").get_to(r.total_cost);
  j.at("feasible").get_to(r.feasible);
  j.at("direct_counts").get_to(r.direct_counts);
  j.at("zib_derived").get_to(r.zib_derived);
  j.at("redundancy_index").get_to(r.redundancy_index);
  j.at("checks").get_to(r.checks);
  r.seed = j.contains("seed") ? std::optional(j["seed"].get<std::uint64_t>()) : std::nullopt;
  r.params = j.contains("params") ? std::optional(j["params"]) : std::nullopt;
  r.history = j.value("history", std::vector<double>{});
  r.evaluations = j.contains("evaluations") ? std::optional(j["evaluations"].get<std::uint64_t>())
                                            : std::nullopt;
  if (j.contains("oracle"))
    r.oracle = OracleSummary{j["oracle"].at("optimum_count").get<std::size_t>(),
                             j["oracle"].at("subsets_examined").get<std::uint64_t>()};
  else
    r.oracle.reset();
  j.at("wall_time_ms").get_to(r.wall_time_ms);
}

/// Fills the placement-derived fields and the per-check verdicts for
/// `regime`: intact observability always, plus the regime's robustness check.
inline void describe_placement(Report& r, const Network& net, const Regime& regime,
                               const Placement& p) {
  r.bus_count = net.bus_count();
  r.regime = to_string(regime.kind);
  r.use_zib = regime.use_zib;
  r.pmu_loss_mode = to_string(regime.loss_mode);
  r.mob = regime.mob;

  r.placement.clear();
  for (auto b : p.one_based()) r.placement.push_back(static_cast<std::int64_t>(b));
  r.cardinality = p.size();
  r.total_cost = p.cost(net);

  const auto intact = evaluate(net, p, regime.use_zib);
  r.direct_counts = intact.direct_counts;
  r.zib_derived.clear();
  for (auto b : intact.zib_derived) r.zib_derived.push_back(static_cast<std::int64_t>(b + 1));
  r.redundancy_index = redundancy_index(intact);

  r.checks.clear();
  CheckVerdict base{"observability", intact.fully_observable, {}};
  for (std::size_t i = 0; i < intact.observed.size(); ++i)
    if (!intact.observed[i]) base.failing.push_back(static_cast<std::int64_t>(i + 1));
  r.checks.push_back(base);

  if (regime.kind == Contingency::LineOutage) {
    auto lo = check_line_outage_robust(net, p, regime.use_zib);
    CheckVerdict v{"line-outage", lo.robust, {}};
    for (int l : lo.failing_lines) v.failing.push_back(l);
    r.checks.push_back(v);
  } else if (regime.kind == Contingency::PmuLoss) {
    auto pl = check_pmu_loss_robust(net, p, regime.use_zib, regime.loss_mode, regime.mob);
    CheckVerdict v{"pmu-loss", pl.robust, {}};
    for (auto b : pl.failing) v.failing.push_back(static_cast<std::int64_t>(b + 1));
    r.checks.push_back(v);
  }
  r.feasible = r.all_checks_pass();
}

namespace detail {
template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
  return out.str();
}
}  // namespace detail

inline std::string render_text(const Report& r) {
  std::ostringstream out;
  out << r.command << " (" << r.algorithm << ") on " << r.case_path << '\n';
  out << "  regime:      " << r.regime << (r.use_zib ? ", zero-injection buses on" : "");
  if (r.regime == "pmu-loss") out << ", " << r.pmu_loss_mode << ", mob " << r.mob;
  out << '\n';
  out << "  placement:   {" << detail::join(r.placement) << "}\n";
  out << "  PMUs:        " << r.cardinality << " (cost " << r.total_cost << ")\n";
  out << "  feasible:    " << (r.feasible ? "yes" : "no") << '\n';
  out << "  redundancy:  " << r.redundancy_index << '\n';
  if (!r.zib_derived.empty()) out << "  via ZIB:     {" << detail::join(r.zib_derived) << "}\n";
  for (const auto& c : r.checks) {
    out << "  check " << c.name << ": " << (c.passed ? "pass" : "FAIL");
    if (!c.failing.empty()) out << " (failing: " << detail::join(c.failing) << ')';
    out << '\n';
  }
  if (r.oracle)
    out << "  optima:      " << r.oracle->optimum_count << " (" << r.oracle->subsets_examined
        << " subsets examined)\n";
  if (r.seed) out << "  seed:        " << *r.seed << '\n';
  if (!r.history.empty())
    out << "  generations: " << r.history.size() << ", final fitness " << r.history.back() << '\n';
  if (r.evaluations) out << "  evaluations: " << *r.evaluations << '\n';
  return out.str();
}

}  // namespace pmu
