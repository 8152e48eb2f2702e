#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pinn/assembly.hpp"
#include "pinn/metrics.hpp"
#include "pinn/problems.hpp"

namespace pinn {

/// Seeds of the independent random streams of one experiment.
struct Seeds {
  std::uint64_t params = 0;
  std::uint64_t interior = 1;
  std::uint64_t boundary = 2;
  std::uint64_t eval = 3;

  static Seeds from_base(std::uint64_t base) { return {base, base + 1, base + 2, base + 3}; }
};

struct TrainConfig {
  std::size_t iterations = 500;
  /// mu_k = min(L(theta_k), mu_cap) unless fixed_mu is set.
  double mu_cap = 1e-5;
  std::optional<double> fixed_mu;
  /// Step sizes 2^-j for j = 0..line_search_depth, plus 0.
  int line_search_depth = 30;
  Seeds seeds;
  SampleCounts counts;
  /// Hidden widths per field; empty means the problem defaults.
  std::vector<std::size_t> widths;
  std::size_t checkpoint_stride = 50;
  std::size_t eval_points = 10000;
  /// Size of the quadrature-gap sample relative to the training sample; 0 disables it.
  std::size_t gap_factor = 10;
  double loss_floor = 1e-14;
  std::size_t stall_limit = 10;
  /// Train output layers only (linear least squares in the remaining parameters).
  bool freeze_hidden = false;
  AssemblyOptions assembly;
  /// Starting parameters; random initialization when empty.
  std::vector<NetworkParams> initial;
};

enum class StopReason { IterationLimit, LossFloor, Stalled, ExactSolution, NotPositiveDefinite, NonFinite };

std::string to_string(StopReason reason);

struct Checkpoint {
  std::size_t iteration = 0;
  double loss = 0.0;
  double eta_hat = 0.0;
  double certificate = 0.0;
  ErrorReport errors;
};

struct TrainReport {
  std::string problem;
  /// loss[k] = L(theta_k) for k = 0..iterations_run.
  std::vector<double> loss;
  /// Step size and damping used to go from theta_k to theta_{k+1}.
  std::vector<double> alpha;
  std::vector<double> mu;
  std::vector<Checkpoint> checkpoints;
  std::vector<NetworkParams> params;
  StopReason stop = StopReason::IterationLimit;
  std::string message;
  std::size_t iterations_run = 0;
  double wall_seconds = 0.0;

  bool ok() const { return stop != StopReason::NonFinite && stop != StopReason::NotPositiveDefinite; }
  const Checkpoint& final_checkpoint() const { return checkpoints.back(); }
};

/// Solves (J^T J + mu Id) d = J^T r.
Vector lm_direction(const ResidualSystem& sys, double mu);

struct LineSearchResult {
  double alpha = 0.0;
  double loss = 0.0;
};

/// Exhaustive search over {2^-j : j = 0..depth} and 0 for the smallest
/// loss; ties go to the larger step and non-finite losses are rejected.
LineSearchResult line_search(const std::function<double(double)>& loss_at, int depth = 30);
LineSearchResult line_search(const std::function<double(double)>& loss_at, double loss_at_zero,
                             int depth = 30);

/// Parameters drawn with the configured seeds and widths.
std::vector<NetworkParams> initial_params(const PdeProblem& problem, const TrainConfig& config);

/// Levenberg-Marquardt damped natural gradient descent on fixed collocation
/// points, with errors and a posteriori certificates recorded at checkpoints.
TrainReport train(const PdeProblem& problem, const TrainConfig& config);

/// iteration,loss,alpha,mu with 17 significant digits.
void write_loss_csv(const TrainReport& report, std::ostream& os);

nlohmann::json to_json(const TrainReport& report);

}  // namespace pinn
