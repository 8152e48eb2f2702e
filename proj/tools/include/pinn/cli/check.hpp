#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pinn/assembly.hpp"
#include "pinn/problems.hpp"

namespace pinn::cli {

/// Worst deviation seen for one (problem variant, block) pair.
struct Deviation {
  std::string problem;
  std::string block;
  double worst = 0.0;
  std::size_t samples = 0;
};

struct CheckReport {
  double tolerance = 0.0;
  std::vector<Deviation> entries;

  bool ok() const;
  const Deviation* worst() const;
};

/// Every registered problem, plus its hard-boundary variant when one
/// exists and the pressure-mean variants of the Stokes problems.
std::vector<std::pair<std::string, PdeProblem>> problem_variants();

struct GradientCheckOptions {
  std::size_t configs = 20;
  std::uint64_t seed = 0;
  double step = 1e-5;
  double tolerance = 1e-6;
  AssemblyOptions assembly;
};

/// Central finite differences of r against the assembled Jacobian (one
/// entry per block, relative Frobenius deviation) and of L against J^T r
/// (entry named "grad L", relative 2-norm deviation), over random widths,
/// points and parameters.
CheckReport check_gradients(const GradientCheckOptions& options);

/// Raw blockwise residuals of the manufactured truth at `points` random
/// points per region; absolute max. Regularization blocks are skipped.
CheckReport check_manufactured(std::size_t points = 100, std::uint64_t seed = 0,
                               double tolerance = 1e-8);

}  // namespace pinn::cli
