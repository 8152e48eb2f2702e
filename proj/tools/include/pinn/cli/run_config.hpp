#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pinn/optimizer.hpp"
#include "pinn/problems.hpp"

namespace pinn::cli {

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  std::string pde = "poisson";
  /// One width per field; a single entry applies to every field; empty means problem defaults.
  std::vector<std::size_t> widths;
  std::size_t iterations = 500;
  std::size_t interior = 1000;
  std::size_t boundary = 100;
  Seeds seeds;
  double eta_reg = 1e-3;
  double noise = 0.0;
  bool hard_boundary = false;
  bool average_penalty = false;
  std::size_t checkpoint_stride = 50;
  std::size_t eval_points = 10000;
  std::string out = "out";
};

/// Overlays the keys present in `j` onto `base`. Unknown keys and wrong
/// types throw ConfigError.
RunConfig merge_config(RunConfig base, const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

/// Builds the problem (hard-boundary wrapped if requested); throws ConfigError
/// on an unknown name, a bad width list or an invalid regularization.
PdeProblem build_problem(const RunConfig& config);
TrainConfig train_config(const RunConfig& config, const PdeProblem& problem);

/// Comma separated list of positive integers.
std::vector<std::size_t> parse_size_list(const std::string& text);

}  // namespace pinn::cli
