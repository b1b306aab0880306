// vexlab command-line tool: single-shot operator evaluations, condition
// searches, constant chains, the invariant verifier, and the batch scenario
// runner. Array inputs are CSV (row-major, "dim,nx,ny,h" header) or JSON;
// reports are schema-versioned JSON plus CSV trend tables.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vexlab/vexlab.hpp"

namespace {

using vexlab::Json;

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    vexlab::write_text_file(out_path, j.dump(2) + "\n");
  }
}

vexlab::Cube parse_cube(const std::vector<int>& anchor, int side) {
  vexlab::Cube q;
  q.anchor = {anchor.empty() ? 0 : anchor[0], anchor.size() > 1 ? anchor[1] : 0};
  q.side = side;
  return q;
}

Json rh_chain_json(const vexlab::RhConstantChain& c) {
  return Json{{"inputs",
               Json{{"r", c.r}, {"C", c.C}, {"p_minus", c.p_minus}, {"p_plus", c.p_plus},
                    {"gamma", c.gamma}}},
              {"k", c.k},
              {"eps", c.eps},
              {"A", c.A},
              {"gamma_prime", c.gamma_prime},
              {"eta", c.eta},
              {"delta", c.delta},
              {"feasible", c.feasible}};
}

Json median_chain_json(const vexlab::MedianConstantChain& c) {
  return Json{{"inputs", Json{{"lambda", c.lambda},
                              {"eta", c.eta},
                              {"n", c.n},
                              {"N", c.N},
                              {"C", c.C},
                              {"p_minus", c.p_minus},
                              {"p_plus", c.p_plus}}},
              {"nu", c.nu},
              {"t", c.t},
              {"r", c.r},
              {"r_pow_n", c.r_pow_n},
              {"gamma", c.gamma},
              {"feasible", c.feasible}};
}

Json function_csvable(const vexlab::GridFunction& f, const std::string& out_csv) {
  if (!out_csv.empty()) {
    vexlab::write_function_csv(out_csv, f);
    return Json{{"written", out_csv}};
  }
  return vexlab::function_to_json(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vexlab: numerical laboratory for variable-exponent Lebesgue spaces"};
  app.require_subcommand(1);

  std::string input_path, exponent_path, out_path, config_path, level = "quick";
  std::string which_op;
  std::vector<int> anchor;
  std::vector<double> lambda_list;
  int side = 1, levels = 3, n_dim = 1, n_fam = 1;
  double lambda = 0.5, tau = -1.0, core_r = -1.0, r_exp = 2.0, big_c = 1.0;
  double p_minus = 2.0, p_plus = 2.0, gamma = -1.0, eta = 0.5, threshold = -1.0;
  double tol = 1e-12;
  std::uint64_t seed = 0, budget = 1000;
  std::string which_chain = "rh";

  // norm
  auto* norm = app.add_subcommand("norm", "Luxemburg norm, modular and sandwich bounds");
  norm->add_option("--input", input_path, "grid function (csv/json)")->required();
  norm->add_option("--exponent", exponent_path, "exponent field (csv/json)")->required();
  norm->add_option("--tol", tol, "relative tolerance");
  norm->add_option("--out", out_path, "output json path (default stdout)");

  // maximal
  auto* maximal = app.add_subcommand("maximal", "Hardy-Littlewood maximal function");
  maximal->add_option("--input", input_path)->required();
  maximal->add_option("--out", out_path, "output csv path (default: json to stdout)");

  // median
  auto* median = app.add_subcommand("median", "median maximal operator (optionally shifted)");
  median->add_option("--input", input_path)->required();
  median->add_option("--lambda", lambda, "rearrangement fraction")->required();
  median->add_option("--r", core_r, "core factor: evaluate the shifted variant");
  median->add_option("--tau", tau, "shifted fraction (default: --lambda)");
  median->add_option("--out", out_path);

  // cz
  auto* cz = app.add_subcommand("cz", "Calderon-Zygmund decomposition / level sets");
  cz->add_option("--input", input_path)->required();
  cz->add_option("--anchor", anchor, "cube anchor cell (one value per axis)")->required();
  cz->add_option("--side", side, "cube side in cells (power of two)")->required();
  cz->add_option("--threshold", threshold, "single decomposition at this threshold");
  cz->add_option("--lambda", lambda, "level ladder density parameter");
  cz->add_option("--levels", levels, "number of ladder levels");
  cz->add_option("--out", out_path);

  // cover
  auto* cover = app.add_subcommand("cover", "covering extraction from marked cubes");
  cover->add_option("--points", input_path, "json: {grid, points:[{cell, cube}]}")->required();
  cover->add_option("--r", core_r, "core factor")->required();
  cover->add_option("--out", out_path);

  // ainfty-search
  auto* ainfty = app.add_subcommand("ainfty-search", "adversarial family-condition search");
  ainfty->add_option("--exponent", exponent_path)->required();
  ainfty->add_option("--lambda", lambda)->required();
  ainfty->add_option("--budget", budget);
  ainfty->add_option("--seed", seed);
  ainfty->add_option("--out", out_path);

  // apvar-search
  auto* apvar = app.add_subcommand("apvar-search", "single-cube condition search");
  apvar->add_option("--exponent", exponent_path)->required();
  apvar->add_option("--budget", budget);
  apvar->add_option("--seed", seed);
  apvar->add_option("--out", out_path);

  // rh
  auto* rh = app.add_subcommand("rh", "reverse-Holder search; optional b(Q) on a cube");
  rh->add_option("--exponent", exponent_path)->required();
  rh->add_option("--r", r_exp, "reverse-Holder exponent (> 1)")->required();
  rh->add_option("--budget", budget);
  rh->add_option("--seed", seed);
  rh->add_option("--C", big_c, "constant for the b(Q) evaluation");
  rh->add_option("--anchor", anchor, "cube anchor for b(Q)");
  auto* rh_side = rh->add_option("--side", side, "cube side for b(Q)");
  rh->add_option("--out", out_path);

  // chains
  auto* chains = app.add_subcommand("chains", "explicit constant chains");
  chains->add_option("--which", which_chain, "rh or median")
      ->check(CLI::IsMember({"rh", "median"}))
      ->required();
  chains->add_option("--r", r_exp);
  chains->add_option("--C", big_c);
  chains->add_option("--pminus", p_minus);
  chains->add_option("--pplus", p_plus);
  chains->add_option("--gamma", gamma, "default: midpoint of (1, r)");
  chains->add_option("--lambda", lambda);
  chains->add_option("--eta", eta);
  chains->add_option("--n", n_dim);
  chains->add_option("--N", n_fam);
  chains->add_option("--out", out_path);

  // opnorm (operator norm estimation; companion to the searches)
  auto* opnorm = app.add_subcommand("opnorm", "operator norm lower bound");
  opnorm->add_option("--exponent", exponent_path)->required();
  opnorm->add_option("--operator", which_op, "M | median | shifted-median | averaging")
      ->required();
  opnorm->add_option("--lambda", lambda);
  opnorm->add_option("--tau", tau);
  opnorm->add_option("--r", core_r);
  opnorm->add_option("--budget", budget);
  opnorm->add_option("--seed", seed);
  opnorm->add_option("--out", out_path);

  // verify
  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  verify->add_option("--level", level, "quick|full")
      ->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--lambda", lambda_list, "lambda values (repeatable)");
  verify->add_option("--seed", seed);

  // run
  auto* run = app.add_subcommand("run", "batch scenario: searches across box sizes");
  run->add_option("--config", config_path)->required();
  run->add_option("--out", out_path, "output directory")->required();
  auto* run_seed = run->add_option("--seed", seed, "override the config seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (norm->parsed()) {
      const auto f = vexlab::read_function(input_path);
      const auto p = vexlab::read_exponent(exponent_path);
      const auto region = vexlab::CellMask::full(f.grid());
      const auto sandwich = vexlab::check_modular_norm_sandwich(f, p, region, tol);
      emit(Json{{"norm", sandwich.norm},
                {"modular", sandwich.modular_value},
                {"sandwich_lower", sandwich.lower},
                {"sandwich_upper", sandwich.upper},
                {"sandwich_holds", sandwich.lower_holds && sandwich.upper_holds}},
           out_path);
    } else if (maximal->parsed()) {
      const auto f = vexlab::read_function(input_path);
      emit(function_csvable(vexlab::hl_maximal(f), out_path), "");
    } else if (median->parsed()) {
      const auto f = vexlab::read_function(input_path);
      vexlab::GridFunction out_f =
          core_r > 0.0
              ? vexlab::shifted_median_maximal(f, tau > 0.0 ? tau : lambda, core_r)
              : vexlab::median_maximal(f, lambda);
      emit(function_csvable(out_f, out_path), "");
    } else if (cz->parsed()) {
      const auto v = vexlab::read_function(input_path);
      const auto q = parse_cube(anchor, side);
      if (threshold >= 0.0) {
        const auto cubes = vexlab::cz_decompose(v, q, threshold);
        Json arr = Json::array();
        for (const auto& c : cubes) arr.push_back(vexlab::cube_to_json(v.grid(), c));
        emit(Json{{"threshold", threshold}, {"cubes", arr}}, out_path);
      } else {
        const auto lv = vexlab::build_cz_levels(v, q, lambda, levels);
        Json jlevels = Json::array();
        for (const auto& l : lv.levels) {
          Json cubes = Json::array();
          for (std::size_t i = 0; i < l.cubes.size(); ++i) {
            cubes.push_back(Json{{"cube", vexlab::cube_to_json(v.grid(), l.cubes[i])},
                                 {"retained_cells", l.retained[i].cells()},
                                 {"density_ok", static_cast<bool>(l.density_ok[i])}});
          }
          jlevels.push_back(
              Json{{"k", l.k}, {"threshold", l.threshold}, {"cubes", cubes}});
        }
        emit(Json{{"alpha", lv.alpha},
                  {"beta", lv.beta},
                  {"lambda", lv.lambda},
                  {"all_density_ok", lv.all_density_ok},
                  {"levels", jlevels}},
             out_path);
      }
    } else if (cover->parsed()) {
      std::ifstream in(input_path);
      if (!in) throw std::runtime_error("cannot open '" + input_path + "'");
      const Json doc = Json::parse(in);
      const auto g = vexlab::grid_from_json(doc.at("grid"));
      std::vector<std::pair<int, vexlab::Cube>> points;
      for (const auto& jp : doc.at("points"))
        points.emplace_back(jp.at("cell").get<int>(), vexlab::cube_from_json(jp.at("cube")));
      const auto ex = vexlab::besicovitch_extract(g, points, core_r);
      Json arr = Json::array();
      for (std::size_t i = 0; i < ex.subcover.size(); ++i)
        arr.push_back(Json{{"cube", vexlab::cube_to_json(g, ex.subcover[i])},
                           {"subfamily", ex.subfamily[i]}});
      emit(Json{{"subcover", arr}, {"subfamily_count", ex.subfamily_count}}, out_path);
    } else if (ainfty->parsed()) {
      const auto p = vexlab::read_exponent(exponent_path);
      const auto rep = vexlab::ainfty_search(p, lambda, budget, seed);
      emit(vexlab::report_payload(rep), out_path);
    } else if (apvar->parsed()) {
      const auto p = vexlab::read_exponent(exponent_path);
      const auto rep = vexlab::apvar_search(p, budget, seed);
      emit(vexlab::report_payload(rep), out_path);
    } else if (rh->parsed()) {
      const auto p = vexlab::read_exponent(exponent_path);
      Json out = vexlab::report_payload(vexlab::rh_search(p, r_exp, budget, seed));
      if (rh_side->count() > 0) {
        const auto q = parse_cube(anchor, side);
        const auto bf = vexlab::b_function(p, q, r_exp, big_c);
        out["b_function"] = Json{{"defined", bf.defined}, {"t_q", bf.t_q},   {"b", bf.b},
                                 {"residual", bf.residual}, {"t_max", bf.t_max}, {"k", bf.k}};
      }
      emit(out, out_path);
    } else if (chains->parsed()) {
      if (which_chain == "rh") {
        const double gm = gamma > 0.0 ? gamma : vexlab::rh_chain_default_gamma(r_exp);
        emit(rh_chain_json(vexlab::rh_constant_chain(r_exp, big_c, p_minus, p_plus, gm)), out_path);
      } else if (which_chain == "median") {
        emit(median_chain_json(vexlab::median_constant_chain(lambda, eta, n_dim, n_fam, big_c, p_minus, p_plus)),
             out_path);
      } else {
        throw std::invalid_argument("chains: --which must be rh or median");
      }
    } else if (opnorm->parsed()) {
      const auto p = vexlab::read_exponent(exponent_path);
      vexlab::MaximalOp tag;
      if (which_op == "M")
        tag = vexlab::MaximalOp::HardyLittlewood;
      else if (which_op == "median")
        tag = vexlab::MaximalOp::Median;
      else if (which_op == "shifted-median")
        tag = vexlab::MaximalOp::ShiftedMedian;
      else if (which_op == "averaging")
        tag = vexlab::MaximalOp::AveragingUniform;
      else
        throw std::invalid_argument("opnorm: unknown operator '" + which_op + "'");
      vexlab::OperatorParams prm;
      prm.lambda = lambda;
      prm.tau = tau > 0.0 ? tau : 0.5;
      prm.r = core_r > 0.0 ? core_r : 0.5;
      emit(vexlab::report_payload(vexlab::operator_norm_estimate(tag, p, prm, budget, seed)),
           out_path);
    } else if (verify->parsed()) {
      const auto lv = level == "full" ? vexlab::VerifyLevel::Full : vexlab::VerifyLevel::Quick;
      const std::vector<double> ls =
          lambda_list.empty() ? std::vector<double>{0.25, 0.5, 0.75} : lambda_list;
      const auto summary = vexlab::verify_suite(lv, ls, seed == 0 ? 2024 : seed, &std::cout);
      int checked = 0, failed = 0;
      for (const auto& s : summary.suites) {
        checked += s.checked;
        failed += s.failed;
      }
      std::cout << (summary.all_pass() ? "PASS" : "FAIL") << ": " << checked << " checks, "
                << failed << " failures (" << summary.total_ms / 1000.0 << " s)\n";
      return summary.all_pass() ? 0 : 1;
    } else if (run->parsed()) {
      auto cfg = vexlab::load_scenario(config_path);
      if (run_seed->count() > 0) {
        cfg.seed = seed;
        cfg.echo["seed"] = seed;
      }
      const auto rep = vexlab::run_scenario(cfg);
      vexlab::write_report_files(rep, out_path);
      std::cout << "wrote " << out_path << "/report.json and trends.csv ("
                << rep.entries.size() << " condition runs)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
