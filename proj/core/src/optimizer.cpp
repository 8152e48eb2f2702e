#include "pinn/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pinn/errors.hpp"

namespace pinn {

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::IterationLimit: return "iteration_limit";
    case StopReason::LossFloor: return "loss_floor";
    case StopReason::Stalled: return "stalled";
    case StopReason::ExactSolution: return "exact_solution";
    case StopReason::NotPositiveDefinite: return "not_positive_definite";
    case StopReason::NonFinite: return "non_finite";
  }
  return "unknown";
}

Vector lm_direction(const ResidualSystem& sys, double mu) {
  return solve_spd(gram_matrix(sys, mu), loss_gradient(sys));
}

LineSearchResult line_search(const std::function<double(double)>& loss_at, double loss_at_zero,
                             int depth) {
  LineSearchResult best{0.0, std::numeric_limits<double>::infinity()};
  double alpha = 1.0;
  for (int j = 0; j <= depth; ++j, alpha *= 0.5) {
    const double l = loss_at(alpha);
    if (std::isfinite(l) && l < best.loss) best = {alpha, l};
  }
  if (std::isfinite(loss_at_zero) && !(best.loss <= loss_at_zero)) best = {0.0, loss_at_zero};
  return best;
}

LineSearchResult line_search(const std::function<double(double)>& loss_at, int depth) {
  return line_search(loss_at, loss_at(0.0), depth);
}

std::vector<NetworkParams> initial_params(const PdeProblem& problem, const TrainConfig& config) {
  if (!config.widths.empty() && config.widths.size() != problem.fields.size()) {
    throw ConfigError("problem " + problem.name + " needs " +
                      std::to_string(problem.fields.size()) + " widths, got " +
                      std::to_string(config.widths.size()));
  }
  std::vector<NetworkParams> params;
  for (std::size_t f = 0; f < problem.fields.size(); ++f) {
    const std::size_t w = config.widths.empty() ? problem.fields[f].default_width : config.widths[f];
    if (w == 0) throw ConfigError("network width must be positive");
    Rng rng(config.seeds.params, 100 + f);
    params.push_back(
        init_params({problem.domain.coord_dim(), problem.fields[f].d_out, w}, rng));
  }
  return params;
}

namespace {

std::vector<Eigen::Index> output_layer_columns(std::span<const NetworkParams> params) {
  std::vector<Eigen::Index> cols;
  std::size_t off = 0;
  for (const auto& p : params) {
    for (std::size_t j = p.shape.output_weight_offset(); j < p.shape.param_count(); ++j) {
      cols.push_back(static_cast<Eigen::Index>(off + j));
    }
    off += p.shape.param_count();
  }
  return cols;
}

Vector restricted_direction(const ResidualSystem& sys, double mu,
                            const std::vector<Eigen::Index>& cols) {
  ResidualSystem sub;
  sub.r = sys.r;
  sub.has_jacobian = true;
  sub.J = sys.J(Eigen::all, cols);
  const Vector d_sub = lm_direction(sub, mu);
  Vector d = Vector::Zero(sys.J.cols());
  for (std::size_t i = 0; i < cols.size(); ++i) d[cols[i]] = d_sub[static_cast<Eigen::Index>(i)];
  return d;
}

}  // namespace

TrainReport train(const PdeProblem& problem, const TrainConfig& config) {
  if (config.iterations < 1) throw ConfigError("iterations must be at least 1");
  if (config.counts.interior < 1 || config.counts.boundary < 1) {
    throw ConfigError("point counts must be at least 1");
  }
  if (config.seeds.eval == config.seeds.interior || config.seeds.eval == config.seeds.boundary) {
    throw ConfigError("evaluation seed must differ from the training seeds");
  }
  const auto start = std::chrono::steady_clock::now();

  TrainReport report;
  report.problem = problem.name;
  std::vector<NetworkParams> params =
      config.initial.empty() ? initial_params(problem, config) : config.initial;

  const Collocation collocation =
      draw_collocation(problem, config.counts, config.seeds.interior, config.seeds.boundary);
  std::optional<Collocation> fine;
  if (config.gap_factor > 0) {
    fine = draw_collocation(problem, config.counts.scaled(config.gap_factor),
                            splitmix64(config.seeds.interior ^ 0x5eedULL),
                            splitmix64(config.seeds.boundary ^ 0x5eedULL));
  }
  ErrorOptions error_options;
  error_options.n_points = config.eval_points;
  error_options.seed = config.seeds.eval;

  const auto& opts = config.assembly;
  auto record_checkpoint = [&](std::size_t iteration, double loss) {
    Checkpoint c;
    c.iteration = iteration;
    c.loss = loss;
    c.eta_hat = fine ? estimate_quadrature_gap(problem, *fine, params, loss, opts) : 0.0;
    c.certificate = a_posteriori_certificate(loss, c.eta_hat);
    c.errors = evaluate_errors(problem, params, error_options, opts);
    report.checkpoints.push_back(std::move(c));
  };

  const std::vector<Eigen::Index> active =
      config.freeze_hidden ? output_layer_columns(params) : std::vector<Eigen::Index>{};

  ResidualSystem sys;
  try {
    sys = assemble(problem, collocation, params, true, opts);
  } catch (const NonFiniteResidual& e) {
    report.stop = StopReason::NonFinite;
    report.message = e.what();
    report.params = params;
    return report;
  }
  double loss = sys.loss();
  report.loss.push_back(loss);
  record_checkpoint(0, loss);

  std::size_t stalled = 0;
  std::size_t k = 0;
  std::vector<NetworkParams> trial = params;
  for (; k < config.iterations; ++k) {
    if (loss < config.loss_floor) {
      report.stop = loss == 0.0 ? StopReason::ExactSolution : StopReason::LossFloor;
      break;
    }
    const double mu = config.fixed_mu.value_or(std::min(loss, config.mu_cap));
    Vector d;
    try {
      d = active.empty() ? lm_direction(sys, mu) : restricted_direction(sys, mu, active);
    } catch (const NotPositiveDefinite& e) {
      report.stop = StopReason::NotPositiveDefinite;
      report.message = e.what();
      break;
    }

    const Vector theta = flatten_params(params);
    auto loss_at = [&](double alpha) {
      unflatten_params(theta - alpha * d, trial);
      try {
        return assemble_loss(problem, collocation, trial, opts);
      } catch (const NonFiniteResidual&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    const LineSearchResult step = line_search(loss_at, loss, config.line_search_depth);
    report.alpha.push_back(step.alpha);
    report.mu.push_back(mu);

    if (step.alpha > 0.0) {
      unflatten_params(theta - step.alpha * d, params);
      stalled = 0;
      sys = assemble(problem, collocation, params, true, opts);
      loss = sys.loss();
    } else {
      ++stalled;
    }
    report.loss.push_back(loss);

    const std::size_t done = k + 1;
    if (done % config.checkpoint_stride == 0 || done == config.iterations) {
      record_checkpoint(done, loss);
    }
    if (stalled >= config.stall_limit) {
      report.stop = StopReason::Stalled;
      ++k;
      break;
    }
  }
  report.iterations_run = report.alpha.size();
  if (report.checkpoints.back().iteration != report.iterations_run) {
    record_checkpoint(report.iterations_run, loss);
  }
  report.params = params;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_loss_csv(const TrainReport& report, std::ostream& os) {
  os << "iteration,loss,alpha,mu\n";
  char line[128];
  for (std::size_t k = 0; k < report.loss.size(); ++k) {
    if (k < report.alpha.size()) {
      std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", k, report.loss[k],
                    report.alpha[k], report.mu[k]);
    } else {
      std::snprintf(line, sizeof line, "%zu,%.17g,,\n", k, report.loss[k]);
    }
    os << line;
  }
}

nlohmann::json to_json(const TrainReport& report) {
  nlohmann::json checkpoints = nlohmann::json::array();
  for (const auto& c : report.checkpoints) {
    checkpoints.push_back({{"iteration", c.iteration},
                           {"loss", c.loss},
                           {"eta_hat", c.eta_hat},
                           {"certificate", c.certificate},
                           {"errors", to_json(c.errors)}});
  }
  return {{"problem", report.problem},
          {"stop_reason", to_string(report.stop)},
          {"message", report.message},
          {"iterations_run", report.iterations_run},
          {"final_loss", report.loss.empty() ? 0.0 : report.loss.back()},
          {"loss", report.loss},
          {"alpha", report.alpha},
          {"mu", report.mu},
          {"checkpoints", checkpoints},
          {"wall_seconds", report.wall_seconds}};
}

}  // namespace pinn
