#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pinn/cli/commands.hpp"
#include "pinn/errors.hpp"

using namespace pinn::cli;

namespace {

std::vector<std::uint64_t> to_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t s : parse_size_list(text)) seeds.push_back(s);
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least-squares PINN solver for linear PDEs with manufactured solutions"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "train one problem and write report.json, loss.csv, params.json");
  std::string config_file, pde, widths, out;
  std::size_t iters = 0, interior = 0, boundary = 0, stride = 0, eval_points = 0;
  std::uint64_t seed = 0;
  double eta_reg = 0.0, noise = 0.0;
  bool hard = false, average = false;
  run->add_option("--config", config_file, "JSON config file (flags take precedence)");
  auto* o_pde = run->add_option("--pde", pde, "poisson | darcy | elasticity | stokes | "
                                              "transient-stokes | parabolic | hyperbolic | inverse");
  auto* o_width = run->add_option("--width", widths, "hidden width per field, comma separated");
  auto* o_iters = run->add_option("--iters", iters, "optimizer iterations");
  auto* o_int = run->add_option("--interior", interior, "interior collocation points");
  auto* o_bnd = run->add_option("--boundary", boundary, "boundary collocation points");
  auto* o_seed = run->add_option("--seed", seed, "base seed (params, interior, boundary, eval = s..s+3)");
  auto* o_eta = run->add_option("--eta-reg", eta_reg, "regularization of the inverse problem");
  auto* o_noise = run->add_option("--noise", noise, "observation noise amplitude (inverse)");
  auto* o_hard = run->add_flag("--hard-boundary,!--no-hard-boundary", hard,
                               "impose homogeneous Dirichlet data exactly");
  auto* o_avg = run->add_flag("--average-penalty,!--no-average-penalty", average,
                              "penalize the pressure mean (stokes)");
  auto* o_stride = run->add_option("--checkpoint-stride", stride, "iterations between error evaluations");
  auto* o_eval = run->add_option("--eval-points", eval_points, "Monte Carlo error points");
  auto* o_out = run->add_option("--out", out, "output directory");

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "rerun a table of the paper and compare");
  ReproduceOptions ro;
  std::string rep_seeds = "0,1,2";
  std::size_t rep_iters = 0;
  rep->add_option("--table", ro.table, "1, 2, 6 or 7")->required();
  rep->add_option("--seeds", rep_seeds, "comma separated base seeds")->capture_default_str();
  auto* o_rep_iters = rep->add_option("--iters", rep_iters, "override the table's iteration budget");
  rep->add_option("--out", ro.out, "directory for reproduce.json");

  // check
  auto* chk = app.add_subcommand("check", "finite-difference and manufactured-solution oracles");
  CheckOptions co;
  chk->add_option("--scope", co.scope, "gradients | manufactured | all")->capture_default_str();
  chk->add_option("--configs", co.configs, "random configurations per problem")->capture_default_str();
  chk->add_option("--seed", co.seed, "seed of the random configurations")->capture_default_str();
  chk->add_flag("--corrupt-activation", co.corrupt_activation)->group("");

  // export
  auto* exp = app.add_subcommand("export", "recompute the error report of a finished run");
  std::string exp_dir, exp_out;
  exp->add_option("--dir", exp_dir, "run directory with report.json and params.json")->required();
  exp->add_option("--out", exp_out, "write the recomputed ErrorReport JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      RunConfig cfg;
      if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw pinn::ConfigError("cannot open " + config_file);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
          throw pinn::ConfigError(config_file + ": " + e.what());
        }
        cfg = merge_config(cfg, j);
      }
      if (o_pde->count()) cfg.pde = pde;
      if (o_width->count()) cfg.widths = parse_size_list(widths);
      if (o_iters->count()) cfg.iterations = iters;
      if (o_int->count()) cfg.interior = interior;
      if (o_bnd->count()) cfg.boundary = boundary;
      if (o_seed->count()) cfg.seeds = pinn::Seeds::from_base(seed);
      if (o_eta->count()) cfg.eta_reg = eta_reg;
      if (o_noise->count()) cfg.noise = noise;
      if (o_hard->count()) cfg.hard_boundary = hard;
      if (o_avg->count()) cfg.average_penalty = average;
      if (o_stride->count()) cfg.checkpoint_stride = stride;
      if (o_eval->count()) cfg.eval_points = eval_points;
      if (o_out->count()) cfg.out = out;
      return cmd_run(cfg, std::cout, std::cerr);
    }
    if (*rep) {
      ro.seeds = to_seeds(rep_seeds);
      if (o_rep_iters->count()) ro.iterations = rep_iters;
      return cmd_reproduce(ro, std::cout, std::cerr);
    }
    if (*chk) return cmd_check(co, std::cout, std::cerr);
    if (*exp) return cmd_export(exp_dir, exp_out, std::cout, std::cerr);
  } catch (const pinn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
