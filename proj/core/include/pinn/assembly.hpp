#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinn/network.hpp"
#include "pinn/numkit.hpp"
#include "pinn/problems.hpp"

namespace pinn {

/// Fixed collocation data for one problem: a sample set per region and the
/// block targets evaluated once on those points.
class Collocation {
 public:
  Collocation() = default;
  Collocation(const PdeProblem& problem, std::array<std::optional<SampleSet>, 3> sets);

  bool has(Region region) const { return sets_[index(region)].has_value(); }
  const SampleSet& samples(Region region) const;
  /// N x dim matrix of target(x_i) for block b (one row for Mean blocks' points as well).
  const DenseMatrix& targets(std::size_t block) const { return targets_.at(block); }
  std::size_t total_points() const;

 private:
  static std::size_t index(Region r) { return static_cast<std::size_t>(r); }
  std::array<std::optional<SampleSet>, 3> sets_;
  std::vector<DenseMatrix> targets_;
};

struct SampleCounts {
  std::size_t interior = 1000;
  /// Total boundary budget; on space-time domains it is split between the
  /// lateral boundary and the initial slice in proportion to their measures.
  std::size_t boundary = 100;

  SampleCounts scaled(std::size_t factor) const { return {interior * factor, boundary * factor}; }
};

/// Draws the collocation points: interior from (interior_seed, stream 1),
/// lateral boundary from (boundary_seed, stream 2), initial slice from
/// (boundary_seed, stream 3).
Collocation draw_collocation(const PdeProblem& problem, const SampleCounts& counts,
                             std::uint64_t interior_seed, std::uint64_t boundary_seed);

struct AssemblyOptions {
  ActivationFn activation = tanh_derivs;
};

/// Jet (and optionally ParamJet) of one field's ansatz, applying the hard
/// boundary wrapper when the field carries one.
void eval_field(const FieldSpec& spec, const NetworkParams& params, std::span<const double> x,
                Jet& jet, ParamJet* pjet, const AssemblyOptions& options = {});

/// Network jets of one field at a whole point set; `jet` applies the hard
/// boundary wrapper, if any, when reading point i.
class FieldBatch {
 public:
  void evaluate(const FieldSpec& spec, const NetworkParams& params, const DenseMatrix& points,
                const AssemblyOptions& options = {});
  void jet(std::size_t i, std::span<const double> x, Jet& out) const;

 private:
  const FieldSpec* spec_ = nullptr;
  JetBatch batch_;
};

struct BlockRange {
  std::string name;
  std::size_t row_begin = 0;
  std::size_t row_count = 0;
};

struct FieldRange {
  std::string name;
  std::size_t col_begin = 0;
  std::size_t col_count = 0;
};

/// Stacked residual r with rows sqrt(weight) * raw residual, so that
/// L = 1/2 |r|^2, grad L = J^T r and the Gram matrix is J^T J.
struct ResidualSystem {
  Vector r;
  DenseMatrix J;
  bool has_jacobian = false;
  std::vector<BlockRange> blocks;
  std::vector<FieldRange> fields;

  double loss() const { return 0.5 * r.squaredNorm(); }
  /// 1/2 |r_b|^2 for every block.
  std::vector<double> block_losses() const;
};

/// Builds r(theta) and, if requested, J(theta). Throws DimensionMismatch
/// when params do not fit the fields and NonFiniteResidual on NaN/Inf.
ResidualSystem assemble(const PdeProblem& problem, const Collocation& collocation,
                        std::span<const NetworkParams> params, bool need_jacobian,
                        const AssemblyOptions& options = {});

/// Loss only; skips the Jacobian.
double assemble_loss(const PdeProblem& problem, const Collocation& collocation,
                     std::span<const NetworkParams> params, const AssemblyOptions& options = {});

/// J^T r.
Vector loss_gradient(const ResidualSystem& sys);

/// J^T J + mu Id, fully symmetric.
DenseMatrix gram_matrix(const ResidualSystem& sys, double mu);

/// Estimate of E(u_theta) - L(theta): the loss re-assembled on an
/// independent, larger collocation set minus the training loss.
double estimate_quadrature_gap(const PdeProblem& problem, const Collocation& fine,
                               std::span<const NetworkParams> params, double training_loss,
                               const AssemblyOptions& options = {});

/// Concatenation / split of per-field parameter vectors.
Vector flatten_params(std::span<const NetworkParams> params);
void unflatten_params(const Vector& theta, std::span<NetworkParams> params);

}  // namespace pinn
