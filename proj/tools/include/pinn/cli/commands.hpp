#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pinn/cli/run_config.hpp"
#include "pinn/network.hpp"

namespace pinn::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNonFinite = 3 };

/// Trains and writes report.json, loss.csv and params.json into config.out.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

struct ReproduceOptions {
  int table = 1;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  std::optional<std::size_t> iterations;
  /// Directory for reproduce.json; nothing is written when empty.
  std::string out;
};
int cmd_reproduce(const ReproduceOptions& options, std::ostream& out, std::ostream& err);

struct CheckOptions {
  std::string scope = "all";
  std::size_t configs = 20;
  std::uint64_t seed = 0;
  /// Test fixture: replaces the activation by tanh with a wrong third derivative.
  bool corrupt_activation = false;
};
int cmd_check(const CheckOptions& options, std::ostream& out, std::ostream& err);

/// Reloads <dir>/report.json and <dir>/params.json, recomputes the
/// ErrorReport and compares it bit for bit with the stored one. The
/// recomputed report is written to `out_file` when given.
int cmd_export(const std::filesystem::path& dir, const std::string& out_file, std::ostream& out,
               std::ostream& err);

nlohmann::json params_to_json(const PdeProblem& problem, const std::vector<NetworkParams>& params,
                              std::uint64_t seed);
std::vector<NetworkParams> params_from_json(const PdeProblem& problem, const nlohmann::json& j);

/// tanh with sigma''' scaled by 1.5; values and first two derivatives are exact.
ActivationDerivs corrupted_tanh(double z);

}  // namespace pinn::cli
