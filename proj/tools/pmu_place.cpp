// pmu-place: minimum PMU placement from the command line.
//
//   pmu-place solve   --case ieee14 --zib --algo hbmo --seed 7
//   pmu-place verify  --case ieee14 --regime pmu-loss --zib --placement 1,2,4,6,9,10,13
//   pmu-place certify --case ieee14 --regime line-outage --zib
//
// Exit status: 0 feasible / all checks pass, 2 infeasible / a check failed,
// 1 usage, parse or I/O error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pmu/pmu.hpp"

#ifndef PMU_DATA_DIR
#define PMU_DATA_DIR "data"
#endif

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string case_path;
  std::string format;  // empty: inferred from extension
  bool use_zib = false;
  std::string regime = "base";
  std::string loss_mode = "removal-sim";
  int mob = 2;
  std::string algorithm = "hbmo";
  std::optional<std::uint64_t> seed;
  std::string params_path;
  std::string placement;
  std::string out_path;
  std::string report_format = "json";
  std::size_t threads = 1;
  std::uint64_t budget = 10'000'000;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Built-in names resolve to the bundled IEEE cases.
std::string resolve_case(const std::string& name) {
  if (fs::exists(name)) return name;
  std::string data_dir = PMU_DATA_DIR;
  if (const char* env = std::getenv("PMU_DATA_DIR")) data_dir = env;
  for (const char* builtin : {"ieee14", "ieee57", "ieee118"}) {
    if (name == builtin) {
      auto path = fs::path(data_dir) / ("case" + name.substr(4) + ".m");
      if (fs::exists(path)) return path.string();
    }
  }
  throw UsageError("case file '" + name + "' not found");
}

pmu::Network load(const RunConfig& cfg, std::string& format) {
  const std::string path = resolve_case(cfg.case_path);
  format = cfg.format;
  if (format.empty()) format = fs::path(path).extension() == ".m" ? "matpower" : "native";
  pmu::ParseOptions opts;
  if (format == "matpower") {
    opts.format = pmu::CaseFormat::Matpower;
    opts.detect_zib = true;
  } else if (format != "native") {
    throw UsageError("unknown format '" + format + "'");
  }
  return pmu::load_case(path, opts);
}

pmu::Regime make_regime(const RunConfig& cfg) {
  pmu::Regime r;
  r.kind = pmu::contingency_from_string(cfg.regime);
  r.use_zib = cfg.use_zib;
  r.loss_mode = pmu::loss_mode_from_string(cfg.loss_mode);
  r.mob = cfg.mob;
  if (r.mob < 1) throw UsageError("--mob must be at least 1");
  return r;
}

pmu::HbmoParams make_params(const RunConfig& cfg) {
  pmu::HbmoParams p;
  if (!cfg.params_path.empty()) {
    std::ifstream in(cfg.params_path);
    if (!in) throw UsageError("cannot open params file '" + cfg.params_path + "'");
    pmu::apply_params(nlohmann::json::parse(in), p);
  }
  if (cfg.seed) p.seed = *cfg.seed;
  return p;
}

std::vector<long long> parse_bus_list(const std::string& text) {
  std::vector<long long> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    std::istringstream words(token);
    std::string w;
    while (words >> w) {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(w, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != w.size() || w.empty()) throw UsageError("bad bus number '" + w + "'");
      out.push_back(v);
    }
  }
  return out;
}

void emit(const RunConfig& cfg, const pmu::Report& report) {
  std::string body = cfg.report_format == "text" ? pmu::render_text(report)
                                                 : nlohmann::json(report).dump(2) + "\n";
  if (cfg.out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(cfg.out_path);
  if (!out) throw std::runtime_error("cannot write '" + cfg.out_path + "'");
  out << body;
}

pmu::Report base_report(const std::string& command, const RunConfig& cfg,
                        const std::string& format) {
  pmu::Report r;
  r.command = command;
  r.case_path = cfg.case_path;
  r.format = format;
  r.algorithm = cfg.algorithm;
  return r;
}

int run_solve(const RunConfig& cfg) {
  std::string format;
  const auto net = load(cfg, format);
  const auto regime = make_regime(cfg);
  auto report = base_report("solve", cfg, format);
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
        .count();
  };

  if (cfg.algorithm == "hbmo") {
    const auto params = make_params(cfg);
    pmu::validate(params, net);
    const auto result = pmu::solve(net, regime, params, {cfg.threads});
    pmu::describe_placement(report, net, regime, result.best);
    report.seed = params.seed;
    report.params = pmu::params_to_json(params, net);
    report.history = result.history;
    report.evaluations = result.evaluations;
    report.wall_time_ms = result.wall_time_ms;
  } else if (cfg.algorithm == "greedy") {
    pmu::describe_placement(report, net, regime, pmu::greedy_cover(net, regime));
    report.wall_time_ms = elapsed();
  } else if (cfg.algorithm == "exhaustive") {
    const auto res = pmu::exhaustive_min(net, regime, {.budget = cfg.budget});
    pmu::describe_placement(report, net, regime,
                            res.found ? res.witness : pmu::Placement::all(net.bus_count()));
    report.oracle = pmu::OracleSummary{res.optimum_count, res.subsets_examined};
    if (!res.found) report.feasible = false;
    report.wall_time_ms = elapsed();
  } else {
    throw UsageError("unknown algorithm '" + cfg.algorithm + "'");
  }
  emit(cfg, report);
  return report.feasible ? 0 : 2;
}

int run_verify(const RunConfig& cfg) {
  std::string format;
  const auto net = load(cfg, format);
  const auto regime = make_regime(cfg);
  pmu::Placement p;
  try {
    p = pmu::Placement::from_one_based(net.bus_count(), parse_bus_list(cfg.placement));
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }
  auto report = base_report("verify", cfg, format);
  report.algorithm = "none";
  const auto started = std::chrono::steady_clock::now();
  pmu::describe_placement(report, net, regime, p);
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  emit(cfg, report);
  return report.all_checks_pass() ? 0 : 2;
}

int run_certify(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.algorithm = "exhaustive";
  std::string format;
  const auto net = load(c, format);
  const auto regime = make_regime(c);
  auto report = base_report("certify", c, format);
  const auto started = std::chrono::steady_clock::now();
  const auto res = pmu::exhaustive_min(net, regime, {.budget = c.budget});
  pmu::describe_placement(report, net, regime,
                          res.found ? res.witness : pmu::Placement(net.bus_count()));
  if (!res.found) report.feasible = false;
  report.oracle = pmu::OracleSummary{res.optimum_count, res.subsets_examined};
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  emit(c, report);
  return report.feasible ? 0 : 2;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--case", cfg.case_path, "case file path, or ieee14/ieee57/ieee118")->required();
  sub->add_option("--format", cfg.format, "native|matpower (default: by extension)")
      ->check(CLI::IsMember({"native", "matpower"}));
  sub->add_flag("--zib", cfg.use_zib, "model zero-injection buses");
  sub->add_option("--regime", cfg.regime, "base|line-outage|pmu-loss")
      ->check(CLI::IsMember({"base", "line-outage", "pmu-loss"}));
  sub->add_option("--pmu-loss-mode", cfg.loss_mode, "removal-sim|count-threshold")
      ->check(CLI::IsMember({"removal-sim", "count-threshold"}));
  sub->add_option("--mob", cfg.mob, "minimum observations per bus (count-threshold)");
  sub->add_option("--out", cfg.out_path, "write the report here instead of stdout");
  sub->add_option("--report", cfg.report_format, "json|text")
      ->check(CLI::IsMember({"json", "text"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum PMU placement for topological observability"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* solve = app.add_subcommand("solve", "find a placement");
  add_common(solve, cfg);
  solve->add_option("--algo", cfg.algorithm, "hbmo|greedy|exhaustive")
      ->check(CLI::IsMember({"hbmo", "greedy", "exhaustive"}));
  solve->add_option("--seed", cfg.seed, "random seed (overrides --params)");
  solve->add_option("--params", cfg.params_path, "JSON file of solver parameters");
  solve->add_option("--threads", cfg.threads, "brood evaluation threads")
      ->check(CLI::PositiveNumber);
  solve->add_option("--budget", cfg.budget, "subset budget for --algo exhaustive");

  auto* verify = app.add_subcommand("verify", "check a given placement");
  add_common(verify, cfg);
  verify->add_option("--placement", cfg.placement, "comma-separated 1-based buses")->required();

  auto* certify = app.add_subcommand("certify", "exact minimum by exhaustive enumeration");
  add_common(certify, cfg);
  certify->add_option("--budget", cfg.budget, "maximum subsets to examine");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (solve->parsed()) return run_solve(cfg);
    if (verify->parsed()) return run_verify(cfg);
    return run_certify(cfg);
  } catch (const std::exception& e) {
    std::cerr << "pmu-place: " << e.what() << '\n';
    return 1;
  }
}
