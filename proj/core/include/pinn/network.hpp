#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pinn/numkit.hpp"

namespace pinn {

/// Layout of a shallow (one hidden layer) tanh network R^d_in -> R^d_out.
///
/// The flat parameter vector is ordered
///   [W (width x d_in, row-major) | b (width) | V (d_out x width, row-major) | c (d_out)]
/// and this ordering is part of the checkpoint format.
struct NetworkShape {
  std::size_t d_in = 1;
  std::size_t d_out = 1;
  std::size_t width = 1;

  std::size_t param_count() const { return width * d_in + width + d_out * width + d_out; }
  std::size_t hidden_weight_offset() const { return 0; }
  std::size_t hidden_bias_offset() const { return width * d_in; }
  std::size_t output_weight_offset() const { return width * d_in + width; }
  std::size_t output_bias_offset() const { return width * d_in + width + d_out * width; }

  bool operator==(const NetworkShape&) const = default;
};

struct NetworkParams {
  NetworkShape shape;
  std::vector<double> theta;

  NetworkParams() = default;
  explicit NetworkParams(NetworkShape s) : shape(s), theta(s.param_count(), 0.0) {}
  NetworkParams(NetworkShape s, std::vector<double> values);

  double hidden_weight(std::size_t i, std::size_t a) const { return theta[i * shape.d_in + a]; }
  double hidden_bias(std::size_t i) const { return theta[shape.hidden_bias_offset() + i]; }
  double output_weight(std::size_t k, std::size_t i) const {
    return theta[shape.output_weight_offset() + k * shape.width + i];
  }
  double output_bias(std::size_t k) const { return theta[shape.output_bias_offset() + k]; }
};

/// Hidden weights and biases ~ U(-1, 1); output weights and biases ~ U(-1/sqrt(w), 1/sqrt(w)).
NetworkParams init_params(const NetworkShape& shape, Rng& rng);

/// tanh and its first three derivatives at one point.
struct ActivationDerivs {
  double s0;
  double s1;
  double s2;
  double s3;
};

using ActivationFn = ActivationDerivs (*)(double);

ActivationDerivs tanh_derivs(double z);

/// Value, input gradient and input Hessian of a vector-valued function at a point.
class Jet {
 public:
  Jet() = default;
  Jet(std::size_t d_out, std::size_t d_in) { reset(d_out, d_in); }

  /// Resizes and zeroes all entries.
  void reset(std::size_t d_out, std::size_t d_in);

  std::size_t d_out() const { return d_out_; }
  std::size_t d_in() const { return d_in_; }

  double& value(std::size_t k) { return value_[k]; }
  double value(std::size_t k) const { return value_[k]; }
  double& gradient(std::size_t k, std::size_t a) { return gradient_[k * d_in_ + a]; }
  double gradient(std::size_t k, std::size_t a) const { return gradient_[k * d_in_ + a]; }
  double& hessian(std::size_t k, std::size_t a, std::size_t b) {
    return hessian_[(k * d_in_ + a) * d_in_ + b];
  }
  double hessian(std::size_t k, std::size_t a, std::size_t b) const {
    return hessian_[(k * d_in_ + a) * d_in_ + b];
  }

  std::span<const double> values() const { return value_; }
  std::span<const double> gradients() const { return gradient_; }
  std::span<const double> hessians() const { return hessian_; }

  bool operator==(const Jet&) const = default;

 private:
  std::size_t d_out_ = 0;
  std::size_t d_in_ = 0;
  std::vector<double> value_;
  std::vector<double> gradient_;
  std::vector<double> hessian_;
};

/// Derivatives of every Jet entry with respect to the P network parameters.
/// The parameter index is innermost, so each accessor returns a length-P span.
class ParamJet {
 public:
  ParamJet() = default;
  ParamJet(std::size_t d_out, std::size_t d_in, std::size_t n_params) {
    reset(d_out, d_in, n_params);
  }

  void reset(std::size_t d_out, std::size_t d_in, std::size_t n_params);

  std::size_t d_out() const { return d_out_; }
  std::size_t d_in() const { return d_in_; }
  std::size_t n_params() const { return n_params_; }

  std::span<double> value(std::size_t k) { return {&value_[k * n_params_], n_params_}; }
  std::span<const double> value(std::size_t k) const {
    return {&value_[k * n_params_], n_params_};
  }
  std::span<double> gradient(std::size_t k, std::size_t a) {
    return {&gradient_[(k * d_in_ + a) * n_params_], n_params_};
  }
  std::span<const double> gradient(std::size_t k, std::size_t a) const {
    return {&gradient_[(k * d_in_ + a) * n_params_], n_params_};
  }
  std::span<double> hessian(std::size_t k, std::size_t a, std::size_t b) {
    return {&hessian_[((k * d_in_ + a) * d_in_ + b) * n_params_], n_params_};
  }
  std::span<const double> hessian(std::size_t k, std::size_t a, std::size_t b) const {
    return {&hessian_[((k * d_in_ + a) * d_in_ + b) * n_params_], n_params_};
  }

 private:
  std::size_t d_out_ = 0;
  std::size_t d_in_ = 0;
  std::size_t n_params_ = 0;
  std::vector<double> value_;
  std::vector<double> gradient_;
  std::vector<double> hessian_;
};

/// Closed-form jet of the network at x. Throws DimensionMismatch if |x| != d_in.
Jet eval_jet(const NetworkParams& params, std::span<const double> x,
             ActivationFn act = tanh_derivs);
void eval_jet(const NetworkParams& params, std::span<const double> x, Jet& out,
              ActivationFn act = tanh_derivs);

/// Jet plus its parameter Jacobian. The Jet is bit-identical to eval_jet.
std::pair<Jet, ParamJet> eval_param_jet(const NetworkParams& params, std::span<const double> x,
                                        ActivationFn act = tanh_derivs);
void eval_param_jet(const NetworkParams& params, std::span<const double> x, Jet& jet,
                    ParamJet& pjet, ActivationFn act = tanh_derivs);

/// Jets of one network at many points: row i of each matrix belongs to
/// point i. Gradient columns are k * d_in + a, Hessian columns
/// (k * d_in + a) * d_in + b.
struct JetBatch {
  std::size_t d_out = 0;
  std::size_t d_in = 0;
  DenseMatrix values;
  DenseMatrix gradients;
  DenseMatrix hessians;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  /// Copies point i into `out`.
  void extract(std::size_t i, Jet& out) const;
};

/// Evaluates all points (one per row) with dense matrix products. Agrees
/// with eval_jet to round-off, not bit-for-bit.
void eval_jet_batch(const NetworkParams& params, const DenseMatrix& points, JetBatch& out,
                    ActivationFn act = tanh_derivs);

/// Writes the jet of a known function (lift, bubble, manufactured solution) at x.
using JetFn = std::function<void(std::span<const double> x, Jet& out)>;

/// Ansatz u = G + B * N that matches Dirichlet data exactly: G is a lift of
/// the boundary values and B a scalar bubble vanishing on the boundary.
struct HardBoundary {
  JetFn lift;
  JetFn bubble;
};

/// Product rule combination of the jets of N, G and B. `net_p` / `out_p` may
/// be null when parameter derivatives are not needed.
void wrap_hard_boundary(const Jet& net, const ParamJet* net_p, const Jet& lift, const Jet& bubble,
                        Jet& out, ParamJet* out_p);

std::pair<Jet, ParamJet> wrap_hard_boundary(const NetworkParams& params, std::span<const double> x,
                                            const HardBoundary& hb,
                                            ActivationFn act = tanh_derivs);

struct NetworkCheckpoint {
  NetworkParams params;
  std::uint64_t seed = 0;
  nlohmann::json meta = nlohmann::json::object();
};

/// {d_in, d_out, width, theta, seed, meta}. Doubles are written in shortest
/// round-trip form, so reading back is bit-exact.
nlohmann::json checkpoint_to_json(const NetworkCheckpoint& ckpt);
NetworkCheckpoint checkpoint_from_json(const nlohmann::json& j);

}  // namespace pinn
