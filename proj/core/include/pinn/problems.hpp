#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinn/geometry.hpp"
#include "pinn/network.hpp"

namespace pinn {

/// Which sample set a residual block is discretized on.
enum class Region { Interior, Boundary, Initial };

std::string to_string(Region region);
Region region_of(SampleTag tag);

/// Pointwise blocks contribute one row per point and component; Mean blocks
/// contribute a single row per component holding the sample mean scaled by
/// sqrt(measure), which discretizes 1/2 |Omega| <r>^2.
enum class Reduction { Pointwise, Mean };

/// Reference to one entry of a field's jet: value, d/dx_a or d^2/dx_a dx_b.
struct JetRef {
  enum class Kind { Value, Gradient, Hessian };
  Kind kind = Kind::Value;
  std::size_t field = 0;
  std::size_t component = 0;
  std::size_t a = 0;
  std::size_t b = 0;

  double read(std::span<const Jet> jets) const;
  std::span<const double> read(std::span<const ParamJet> pjets) const;
};

struct Term {
  JetRef ref;
  double coeff = 1.0;
};

/// Writes a vector-valued data function at x.
using DataFn = std::function<void(std::span<const double> x, std::span<double> out)>;

/// One component of the operator T discretized on one region. Each residual
/// component is a fixed linear combination of jet entries minus target(x),
/// so blocks are affine in the jets by construction.
struct ResidualBlock {
  std::string name;
  Region region = Region::Interior;
  std::vector<std::vector<Term>> rows;
  DataFn target;
  Reduction reduction = Reduction::Pointwise;
  /// Set on Dirichlet trace blocks; dropped when that field is hard-constrained.
  std::optional<std::size_t> trace_of_field;
  /// Regularization blocks do not vanish at the truth.
  bool regularization = false;

  std::size_t dim() const { return rows.size(); }

  /// Linear part only: sum of coeff * jet entry, per component.
  void apply(std::span<const Jet> jets, std::span<double> out) const;
  /// Raw residual: apply(jets) - target(x).
  void evaluate(std::span<const Jet> jets, std::span<const double> x,
                std::span<double> out) const;
  /// Indices of the fields referenced by any term.
  std::vector<std::size_t> fields_used() const;
};

struct FieldSpec {
  std::string name;
  std::size_t d_out = 1;
  std::size_t default_width = 64;
  /// Dirichlet data of this field is zero, so the zero lift admits a hard constraint.
  bool homogeneous_trace = false;
  std::optional<HardBoundary> hard;
};

struct Coefficients {
  double lame_lambda = 0.5769;
  double lame_mu = 0.3846;
  double eta_reg = 1e-3;
};

struct DataField {
  std::size_t dim = 1;
  DataFn fn;
};

/// Closed-form truth jets per field plus the data derived from them.
struct ManufacturedSolution {
  std::vector<JetFn> fields;
  /// Named data: any of f, g, g_D, u0, u1, u_d.
  std::map<std::string, DataField> data;

  Jet field_jet(std::size_t field, std::size_t d_out, std::span<const double> x) const;
};

struct PdeProblem {
  std::string name;
  Domain domain;
  std::vector<FieldSpec> fields;
  std::vector<ResidualBlock> blocks;
  Coefficients coefficients;
  ManufacturedSolution truth;

  std::size_t field_index(const std::string& field_name) const;
  bool uses_region(Region region) const;
};

/// -div(grad u) = f, u = g_D.
PdeProblem poisson();
/// sigma + grad p = f, div sigma = g, p = g_D.
PdeProblem darcy();
/// Isotropic linear elasticity with the fixed Lame constants.
PdeProblem elasticity();
/// Stationary or transient Stokes; `average_penalty` adds the pressure mean block.
PdeProblem stokes(bool transient = false, bool average_penalty = false);
/// du/dt - Laplace u = f on I x Omega.
PdeProblem parabolic();
/// d2u/dt2 - Laplace u = f on I x Omega.
PdeProblem hyperbolic();
/// Source recovery for Poisson from interior observations. Throws
/// InvalidRegularization if eta_reg <= 0. `noise` perturbs u_d by a
/// deterministic uniform amplitude in [-noise, noise].
PdeProblem inverse_source(double eta_reg = 1e-3, double noise = 0.0);

struct ProblemOptions {
  double eta_reg = 1e-3;
  double noise = 0.0;
  bool average_penalty = false;
};

/// poisson | darcy | elasticity | stokes | transient-stokes | parabolic | hyperbolic | inverse.
/// Throws ConfigError for unknown names.
PdeProblem make_problem(const std::string& name, const ProblemOptions& options = {});
const std::vector<std::string>& problem_names();

/// Copy with every field that has homogeneous Dirichlet data wrapped as
/// u = 0 + B * N and its boundary trace block removed.
PdeProblem with_hard_boundary(const PdeProblem& problem);

/// Raw residual of `block` evaluated on the manufactured truth at x.
std::vector<double> truth_residual(const PdeProblem& problem, std::size_t block,
                                   std::span<const double> x);

}  // namespace pinn
