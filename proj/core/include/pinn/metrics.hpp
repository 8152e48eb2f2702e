#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pinn/assembly.hpp"
#include "pinn/problems.hpp"

namespace pinn {

enum class NormKind { L2, H1, H1Semi };

std::string to_string(NormKind kind);

struct ErrorPair {
  double absolute = 0.0;
  double relative = 0.0;
};

/// Monte Carlo error of one field against its truth on `points` (weight =
/// measure / N). Gradients are spatial only, so on space-time domains H1
/// means L2(I, H1(Omega)). Throws ZeroTruthNorm if the truth norm is below 1e-14.
ErrorPair mc_error(const PdeProblem& problem, std::size_t field, const NetworkParams& params,
                   const SampleSet& points, NormKind kind, const AssemblyOptions& options = {});

struct FieldErrors {
  std::string field;
  ErrorPair l2;
  ErrorPair h1;
  ErrorPair h1_semi;
  /// Squared Gagliardo H^{1/2} seminorm of the error, when requested.
  std::optional<double> fractional;
};

struct ErrorReport {
  std::vector<FieldErrors> fields;
  std::size_t n_points = 0;
  std::uint64_t seed = 0;

  const FieldErrors& field(const std::string& name) const;
};

struct ErrorOptions {
  std::size_t n_points = 10000;
  std::uint64_t seed = 3;
  /// 0 disables the fractional estimate.
  std::size_t fractional_pairs = 0;
  double fractional_cut = 1e-3;
};

/// Draws fresh evaluation points from (seed, stream 4) and reports every
/// field's L2 / H1 / H1-semi errors.
ErrorReport evaluate_errors(const PdeProblem& problem, std::span<const NetworkParams> params,
                            const ErrorOptions& options, const AssemblyOptions& assembly = {});

using VectorFn = std::function<void(std::span<const double> x, std::span<double> out)>;

/// Monte Carlo estimate of the double integral
///   int int |e(x) - e(y)|^2 / |x - y|^{d + 2s} dx dy  over (0,1)^d x (0,1)^d,
/// i.e. the squared Gagliardo seminorm, restricted to pairs with |x - y| >= cut.
/// The truncation biases the estimate low.
double gagliardo_seminorm(const VectorFn& e, std::size_t out_dim, std::size_t dim, double s,
                          std::size_t n_pairs, double cut, Rng& rng);

/// 2 (L + max(eta_hat, 0)): the computable part of the a posteriori bound
/// |||u_theta - u|||^2 <= 2/alpha (L + eta), with the unknown coercivity
/// constant alpha set to one.
double a_posteriori_certificate(double loss, double eta_hat);

nlohmann::json to_json(const ErrorReport& report);
ErrorReport error_report_from_json(const nlohmann::json& j);

/// Plain-text table: field, L2, H1, H1-semi (absolute and relative).
std::string format_error_table(const ErrorReport& report);

}  // namespace pinn
