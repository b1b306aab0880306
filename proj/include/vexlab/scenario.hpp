#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vexlab/conditions.hpp"
#include "vexlab/generators.hpp"
#include "vexlab/io.hpp"
#include "vexlab/report.hpp"
#include "vexlab/verify.hpp"

namespace vexlab {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

// A scenario fully determines a run: grid ladder, exponent generator,
// condition selections, budgets, and the seed. Identical config + seed gives
// a byte-identical report payload (timing excluded).
struct ScenarioConfig {
  std::string name = "scenario";
  int dim = 1;
  double h = 1.0;
  std::vector<int> box_sizes;
  std::string exponent_kind;
  Json exponent_params = Json::object();
  std::vector<Json> conditions;
  std::string verify_level = "none";  // none | quick | full
  std::uint64_t seed = 0;
  Json echo = Json::object();  // the config document as parsed
};

inline ScenarioConfig scenario_from_json(const Json& j) {
  ScenarioConfig cfg;
  cfg.echo = j;
  cfg.name = j.value("name", std::string("scenario"));
  const Json& grid = j.at("grid");
  cfg.dim = grid.value("dim", 1);
  if (cfg.dim != 1 && cfg.dim != 2)
    throw std::invalid_argument("config: grid.dim must be 1 or 2");
  cfg.h = grid.value("h", 1.0);
  cfg.box_sizes = grid.at("box_sizes").get<std::vector<int>>();
  if (cfg.box_sizes.empty()) throw std::invalid_argument("config: grid.box_sizes is empty");
  for (int b : cfg.box_sizes)
    if (b < 1) throw std::invalid_argument("config: box sizes must be positive");
  const Json& exponent = j.at("exponent");
  cfg.exponent_kind = exponent.at("kind").get<std::string>();
  cfg.exponent_params = exponent;
  cfg.exponent_params.erase("kind");
  if (j.contains("conditions"))
    for (const auto& c : j.at("conditions")) cfg.conditions.push_back(c);
  cfg.verify_level = j.value("verify", std::string("none"));
  if (cfg.verify_level != "none" && cfg.verify_level != "quick" && cfg.verify_level != "full")
    throw std::invalid_argument("config: verify must be none, quick or full");
  cfg.seed = j.value("seed", std::uint64_t{0});
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return scenario_from_json(Json::parse(in));
}

struct ExperimentEntry {
  int box_cells = 0;
  std::optional<double> lambda;  // trend column; absent for lambda-free conditions
  ConditionReport report;
};

struct ExperimentReport {
  Json config_echo;
  std::vector<ExperimentEntry> entries;
  std::optional<VerifySummary> verify;
  double total_ms = 0.0;
};

inline ConditionReport run_condition(const Json& cond, const ExponentField& p,
                                     std::uint64_t seed) {
  const std::string type = cond.at("type").get<std::string>();
  const auto budget = cond.value("budget", std::uint64_t{1000});
  if (type == "ainfty") {
    return ainfty_search(p, cond.at("lambda").get<double>(), budget, seed);
  }
  if (type == "apvar") {
    return apvar_search(p, budget, seed);
  }
  if (type == "rh") {
    return rh_search(p, cond.at("r").get<double>(), budget, seed);
  }
  if (type == "opnorm") {
    const std::string op = cond.at("operator").get<std::string>();
    OperatorParams prm;
    prm.lambda = cond.value("lambda", 0.5);
    prm.tau = cond.value("tau", 0.5);
    prm.r = cond.value("r", 0.5);
    MaximalOp tag;
    if (op == "M")
      tag = MaximalOp::HardyLittlewood;
    else if (op == "median")
      tag = MaximalOp::Median;
    else if (op == "shifted-median")
      tag = MaximalOp::ShiftedMedian;
    else if (op == "averaging")
      tag = MaximalOp::AveragingUniform;
    else
      throw std::invalid_argument("config: unknown operator '" + op + "'");
    return operator_norm_estimate(tag, p, prm, budget, seed);
  }
  throw std::invalid_argument("config: unknown condition type '" + type + "'");
}

/// Executes the selected condition estimators across the ladder of box sizes.
/// Condition violations and ratios are data; only malformed configs throw.
inline ExperimentReport run_scenario(const ScenarioConfig& cfg) {
  detail::Stopwatch clock;
  ExperimentReport out;
  out.config_echo = cfg.echo.is_null() || cfg.echo.empty() ? Json::object() : cfg.echo;
  if (cfg.verify_level != "none") {
    out.verify = verify_suite(
        cfg.verify_level == "full" ? VerifyLevel::Full : VerifyLevel::Quick,
        {0.25, 0.5, 0.75}, derive_seed(cfg.seed, 0xE0), nullptr);
  }
  int witness_counter = 0;
  for (std::size_t ib = 0; ib < cfg.box_sizes.size(); ++ib) {
    const int b = cfg.box_sizes[ib];
    const Grid g = cfg.dim == 1 ? Grid::line(b, cfg.h) : Grid::plane(b, b, cfg.h);
    const ExponentField p = generate_exponent(cfg.exponent_kind, cfg.exponent_params, g);
    for (std::size_t ic = 0; ic < cfg.conditions.size(); ++ic) {
      const std::uint64_t child_seed =
          derive_seed(cfg.seed, ib * 1024 + ic);
      ExperimentEntry entry;
      entry.box_cells = g.cell_count();
      entry.report = run_condition(cfg.conditions[ic], p, child_seed);
      if (cfg.conditions[ic].contains("lambda"))
        entry.lambda = cfg.conditions[ic].at("lambda").get<double>();
      char id[16];
      std::snprintf(id, sizeof(id), "w%04d", witness_counter++);
      entry.report.witness_id = id;
      out.entries.push_back(std::move(entry));
    }
  }
  out.total_ms = clock.ms();
  return out;
}

/// Full report document. The "timing" subtree is the only nondeterministic
/// part; strip_timing removes it for byte-comparisons.
inline Json experiment_to_json(const ExperimentReport& rep) {
  Json results = Json::array();
  Json trends = Json::array();
  Json per_ms = Json::array();
  for (const auto& e : rep.entries) {
    Json r = report_payload(e.report);
    r["box_cells"] = e.box_cells;
    results.push_back(std::move(r));
    trends.push_back(Json{{"box_cells", e.box_cells},
                          {"condition", e.report.condition},
                          {"lambda", e.lambda ? Json(*e.lambda) : Json(nullptr)},
                          {"best_ratio", e.report.best_ratio},
                          {"witness_id", e.report.witness_id}});
    per_ms.push_back(e.report.wall_ms);
  }
  Json doc{{"schema_version", kReportSchemaVersion},
           {"tool", Json{{"name", "vexlab"}, {"version", kToolVersion}}},
           {"config", rep.config_echo},
           {"results", results},
           {"trends", trends},
           {"timing", Json{{"total_ms", rep.total_ms}, {"per_result_ms", per_ms}}}};
  if (rep.verify) {
    Json suites = Json::array();
    for (const auto& s : rep.verify->suites)
      suites.push_back(Json{{"name", s.name}, {"checked", s.checked}, {"failed", s.failed}});
    doc["verify"] = Json{{"all_pass", rep.verify->all_pass()}, {"suites", suites}};
  }
  return doc;
}

inline Json strip_timing(Json report) {
  report.erase("timing");
  return report;
}

inline std::string trends_csv(const ExperimentReport& rep) {
  std::ostringstream out;
  out << "box_cells,condition,lambda,best_ratio,witness_id\n";
  for (const auto& e : rep.entries) {
    out << e.box_cells << ',' << e.report.condition << ','
        << (e.lambda ? format_double(*e.lambda) : std::string()) << ','
        << format_double(e.report.best_ratio) << ',' << e.report.witness_id << '\n';
  }
  return out.str();
}

/// Writes report.json and trends.csv into the output directory.
inline void write_report_files(const ExperimentReport& rep, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto j = experiment_to_json(rep);
  write_text_file((std::filesystem::path(out_dir) / "report.json").string(),
                  j.dump(2) + "\n");
  write_text_file((std::filesystem::path(out_dir) / "trends.csv").string(), trends_csv(rep));
}

}  // namespace vexlab
