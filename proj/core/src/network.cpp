#include "pinn/network.hpp"

#include <cmath>
#include <string>

#include "pinn/errors.hpp"

namespace pinn {

NetworkParams::NetworkParams(NetworkShape s, std::vector<double> values)
    : shape(s), theta(std::move(values)) {
  if (theta.size() != shape.param_count()) {
    throw DimensionMismatch("NetworkParams: theta has " + std::to_string(theta.size()) +
                            " entries, shape requires " + std::to_string(shape.param_count()));
  }
}

NetworkParams init_params(const NetworkShape& shape, Rng& rng) {
  NetworkParams p(shape);
  const std::size_t n_hidden = shape.output_weight_offset();
  const double out_scale = 1.0 / std::sqrt(static_cast<double>(shape.width));
  for (std::size_t j = 0; j < p.theta.size(); ++j) {
    p.theta[j] = j < n_hidden ? rng.uniform(-1.0, 1.0) : rng.uniform(-out_scale, out_scale);
  }
  return p;
}

ActivationDerivs tanh_derivs(double z) {
  const double s0 = std::tanh(z);
  const double s1 = 1.0 - s0 * s0;
  const double s2 = -2.0 * s0 * s1;
  const double s3 = -2.0 * (s1 * s1 + s0 * s2);
  return {s0, s1, s2, s3};
}

void Jet::reset(std::size_t d_out, std::size_t d_in) {
  d_out_ = d_out;
  d_in_ = d_in;
  value_.assign(d_out, 0.0);
  gradient_.assign(d_out * d_in, 0.0);
  hessian_.assign(d_out * d_in * d_in, 0.0);
}

void ParamJet::reset(std::size_t d_out, std::size_t d_in, std::size_t n_params) {
  d_out_ = d_out;
  d_in_ = d_in;
  n_params_ = n_params;
  value_.assign(d_out * n_params, 0.0);
  gradient_.assign(d_out * d_in * n_params, 0.0);
  hessian_.assign(d_out * d_in * d_in * n_params, 0.0);
}

namespace {

void check_input(const NetworkParams& params, std::span<const double> x) {
  if (x.size() != params.shape.d_in) {
    throw DimensionMismatch("network expects " + std::to_string(params.shape.d_in) +
                            " inputs, got " + std::to_string(x.size()));
  }
  if (params.theta.size() != params.shape.param_count()) {
    throw DimensionMismatch("network parameter vector does not match its shape");
  }
}

// Shared by eval_jet and eval_param_jet so that both produce identical bits.
void accumulate_jet(const NetworkParams& params, std::span<const double> x, ActivationFn act,
                    Jet& jet, std::vector<ActivationDerivs>& hidden) {
  const auto& s = params.shape;
  const std::size_t n = s.d_in;
  jet.reset(s.d_out, n);
  hidden.resize(s.width);

  for (std::size_t i = 0; i < s.width; ++i) {
    double z = 0.0;
    for (std::size_t a = 0; a < n; ++a) z += params.hidden_weight(i, a) * x[a];
    z += params.hidden_bias(i);
    hidden[i] = act(z);
  }

  for (std::size_t k = 0; k < s.d_out; ++k) {
    double value = 0.0;
    for (std::size_t i = 0; i < s.width; ++i) {
      const double v = params.output_weight(k, i);
      const ActivationDerivs& d = hidden[i];
      value += v * d.s0;
      const double v1 = v * d.s1;
      const double v2 = v * d.s2;
      for (std::size_t a = 0; a < n; ++a) {
        const double wa = params.hidden_weight(i, a);
        jet.gradient(k, a) += v1 * wa;
        const double v2a = v2 * wa;
        for (std::size_t b = a; b < n; ++b) jet.hessian(k, a, b) += v2a * params.hidden_weight(i, b);
      }
    }
    jet.value(k) = value + params.output_bias(k);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < a; ++b) jet.hessian(k, a, b) = jet.hessian(k, b, a);
    }
  }
}

}  // namespace

void eval_jet(const NetworkParams& params, std::span<const double> x, Jet& out,
              ActivationFn act) {
  check_input(params, x);
  thread_local std::vector<ActivationDerivs> hidden;
  accumulate_jet(params, x, act, out, hidden);
}

Jet eval_jet(const NetworkParams& params, std::span<const double> x, ActivationFn act) {
  Jet jet;
  eval_jet(params, x, jet, act);
  return jet;
}

void eval_param_jet(const NetworkParams& params, std::span<const double> x, Jet& jet,
                    ParamJet& pjet, ActivationFn act) {
  check_input(params, x);
  thread_local std::vector<ActivationDerivs> hidden;
  accumulate_jet(params, x, act, jet, hidden);

  const auto& s = params.shape;
  const std::size_t n = s.d_in;
  const std::size_t w_off = s.hidden_weight_offset();
  const std::size_t b_off = s.hidden_bias_offset();
  const std::size_t v_off = s.output_weight_offset();
  const std::size_t c_off = s.output_bias_offset();
  pjet.reset(s.d_out, n, s.param_count());

  for (std::size_t k = 0; k < s.d_out; ++k) {
    auto dval = pjet.value(k);
    dval[c_off + k] = 1.0;
    for (std::size_t i = 0; i < s.width; ++i) {
      const double v = params.output_weight(k, i);
      const ActivationDerivs& d = hidden[i];
      const std::size_t wi = w_off + i * n;

      dval[v_off + k * s.width + i] = d.s0;
      dval[b_off + i] = v * d.s1;
      for (std::size_t e = 0; e < n; ++e) dval[wi + e] = v * d.s1 * x[e];

      for (std::size_t a = 0; a < n; ++a) {
        const double wa = params.hidden_weight(i, a);
        auto dgrad = pjet.gradient(k, a);
        dgrad[v_off + k * s.width + i] = d.s1 * wa;
        dgrad[b_off + i] = v * d.s2 * wa;
        for (std::size_t e = 0; e < n; ++e) {
          dgrad[wi + e] = v * (d.s2 * x[e] * wa + (a == e ? d.s1 : 0.0));
        }

        for (std::size_t b = a; b < n; ++b) {
          const double wb = params.hidden_weight(i, b);
          auto dhess = pjet.hessian(k, a, b);
          dhess[v_off + k * s.width + i] = d.s2 * wa * wb;
          dhess[b_off + i] = v * d.s3 * wa * wb;
          for (std::size_t e = 0; e < n; ++e) {
            double t = d.s3 * x[e] * wa * wb;
            if (e == a) t += d.s2 * wb;
            if (e == b) t += d.s2 * wa;
            dhess[wi + e] = v * t;
          }
        }
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < a; ++b) {
        auto src = pjet.hessian(k, b, a);
        auto dst = pjet.hessian(k, a, b);
        std::copy(src.begin(), src.end(), dst.begin());
      }
    }
  }
}

std::pair<Jet, ParamJet> eval_param_jet(const NetworkParams& params, std::span<const double> x,
                                        ActivationFn act) {
  std::pair<Jet, ParamJet> out;
  eval_param_jet(params, x, out.first, out.second, act);
  return out;
}

namespace {

// Vectorized tanh accurate to a few ulp: Taylor series of tanh(z)/z for
// |z| < 1/4 and (1 - e) / (1 + e), e = exp(-2|z|), elsewhere.
DenseMatrix tanh_array(const DenseMatrix& z) {
  using Arr = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  static constexpr double kTaylor[] = {
      1.0,
      -1.0 / 3.0,
      2.0 / 15.0,
      -17.0 / 315.0,
      62.0 / 2835.0,
      -1382.0 / 155925.0,
      21844.0 / 6081075.0,
      -929569.0 / 638512875.0,
      6404582.0 / 10854718875.0,
      -443861162.0 / 1856156927625.0,
      18888466084.0 / 194896477400625.0,
  };
  const Arr az = z.array().abs();
  const Arr e = (-2.0 * az).exp();
  const Arr large = (1.0 - e) / (1.0 + e);
  const Arr z2 = az.square();
  Arr poly = Arr::Constant(z.rows(), z.cols(), kTaylor[10]);
  for (int k = 9; k >= 0; --k) poly = poly * z2 + kTaylor[k];
  const Arr mag = (az < 0.25).select(az * poly, large);
  return (z.array() < 0.0).select(-mag, mag).matrix();
}

}  // namespace

void JetBatch::extract(std::size_t i, Jet& out) const {
  out.reset(d_out, d_in);
  const auto row = static_cast<Eigen::Index>(i);
  for (std::size_t k = 0; k < d_out; ++k) {
    out.value(k) = values(row, static_cast<Eigen::Index>(k));
    for (std::size_t a = 0; a < d_in; ++a) {
      out.gradient(k, a) = gradients(row, static_cast<Eigen::Index>(k * d_in + a));
      for (std::size_t b = 0; b < d_in; ++b) {
        out.hessian(k, a, b) = hessians(row, static_cast<Eigen::Index>((k * d_in + a) * d_in + b));
      }
    }
  }
}

void eval_jet_batch(const NetworkParams& params, const DenseMatrix& points, JetBatch& out,
                    ActivationFn act) {
  const auto& s = params.shape;
  if (static_cast<std::size_t>(points.cols()) != s.d_in) {
    throw DimensionMismatch("network expects " + std::to_string(s.d_in) + " inputs, got " +
                            std::to_string(points.cols()));
  }
  if (params.theta.size() != s.param_count()) {
    throw DimensionMismatch("network parameter vector does not match its shape");
  }
  const auto n = static_cast<Eigen::Index>(s.d_in);
  const auto w = static_cast<Eigen::Index>(s.width);
  const auto m = static_cast<Eigen::Index>(s.d_out);
  const Eigen::Index n_pts = points.rows();
  using RowMat = DenseMatrix;
  Eigen::Map<const RowMat> W(params.theta.data() + s.hidden_weight_offset(), w, n);
  Eigen::Map<const Eigen::RowVectorXd> b(params.theta.data() + s.hidden_bias_offset(), w);
  Eigen::Map<const RowMat> V(params.theta.data() + s.output_weight_offset(), m, w);
  Eigen::Map<const Eigen::RowVectorXd> c(params.theta.data() + s.output_bias_offset(), m);

  RowMat z = points * W.transpose();
  z.rowwise() += b;
  RowMat s0(n_pts, w), s1(n_pts, w), s2(n_pts, w);
  if (act == tanh_derivs) {
    s0 = tanh_array(z);
    s1 = 1.0 - s0.array().square();
    s2 = -2.0 * s0.array() * s1.array();
  } else {
    for (Eigen::Index i = 0; i < n_pts; ++i) {
      for (Eigen::Index j = 0; j < w; ++j) {
        const ActivationDerivs d = act(z(i, j));
        s0(i, j) = d.s0;
        s1(i, j) = d.s1;
        s2(i, j) = d.s2;
      }
    }
  }

  // Products W_ia W_ib, laid out to match the Hessian columns of one output.
  RowMat ww(w, n * n);
  for (Eigen::Index i = 0; i < w; ++i) {
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index bb = 0; bb < n; ++bb) ww(i, a * n + bb) = W(i, a) * W(i, bb);
    }
  }

  out.d_out = s.d_out;
  out.d_in = s.d_in;
  out.values = s0 * V.transpose();
  out.values.rowwise() += c;
  out.gradients.resize(n_pts, m * n);
  out.hessians.resize(n_pts, m * n * n);
  RowMat scaled(n_pts, w);
  for (Eigen::Index k = 0; k < m; ++k) {
    scaled = s1.array().rowwise() * V.row(k).array();
    out.gradients.middleCols(k * n, n).noalias() = scaled * W;
    scaled = s2.array().rowwise() * V.row(k).array();
    out.hessians.middleCols(k * n * n, n * n).noalias() = scaled * ww;
  }
}

void wrap_hard_boundary(const Jet& net, const ParamJet* net_p, const Jet& lift, const Jet& bubble,
                        Jet& out, ParamJet* out_p) {
  const std::size_t m = net.d_out();
  const std::size_t n = net.d_in();
  if (lift.d_out() != m || lift.d_in() != n || bubble.d_out() != 1 || bubble.d_in() != n) {
    throw DimensionMismatch("wrap_hard_boundary: lift/bubble jets do not match the network");
  }
  const double B = bubble.value(0);
  out.reset(m, n);
  for (std::size_t k = 0; k < m; ++k) {
    const double N = net.value(k);
    out.value(k) = lift.value(k) + B * N;
    for (std::size_t a = 0; a < n; ++a) {
      out.gradient(k, a) =
          lift.gradient(k, a) + bubble.gradient(0, a) * N + B * net.gradient(k, a);
      for (std::size_t b = 0; b < n; ++b) {
        out.hessian(k, a, b) = lift.hessian(k, a, b) + bubble.hessian(0, a, b) * N +
                               bubble.gradient(0, a) * net.gradient(k, b) +
                               bubble.gradient(0, b) * net.gradient(k, a) +
                               B * net.hessian(k, a, b);
      }
    }
  }
  if (net_p == nullptr || out_p == nullptr) return;

  const std::size_t P = net_p->n_params();
  out_p->reset(m, n, P);
  for (std::size_t k = 0; k < m; ++k) {
    auto dN = net_p->value(k);
    auto dv = out_p->value(k);
    for (std::size_t j = 0; j < P; ++j) dv[j] = B * dN[j];
    for (std::size_t a = 0; a < n; ++a) {
      const double Ba = bubble.gradient(0, a);
      auto dNa = net_p->gradient(k, a);
      auto dg = out_p->gradient(k, a);
      for (std::size_t j = 0; j < P; ++j) dg[j] = Ba * dN[j] + B * dNa[j];
      for (std::size_t b = 0; b < n; ++b) {
        const double Bb = bubble.gradient(0, b);
        const double Bab = bubble.hessian(0, a, b);
        auto dNb = net_p->gradient(k, b);
        auto dNab = net_p->hessian(k, a, b);
        auto dh = out_p->hessian(k, a, b);
        for (std::size_t j = 0; j < P; ++j) {
          dh[j] = Bab * dN[j] + Ba * dNb[j] + Bb * dNa[j] + B * dNab[j];
        }
      }
    }
  }
}

std::pair<Jet, ParamJet> wrap_hard_boundary(const NetworkParams& params, std::span<const double> x,
                                            const HardBoundary& hb, ActivationFn act) {
  auto [net, net_p] = eval_param_jet(params, x, act);
  Jet lift(params.shape.d_out, params.shape.d_in);
  Jet bubble(1, params.shape.d_in);
  hb.lift(x, lift);
  hb.bubble(x, bubble);
  std::pair<Jet, ParamJet> out;
  wrap_hard_boundary(net, &net_p, lift, bubble, out.first, &out.second);
  return out;
}

nlohmann::json checkpoint_to_json(const NetworkCheckpoint& ckpt) {
  const auto& s = ckpt.params.shape;
  return nlohmann::json{{"d_in", s.d_in},
                        {"d_out", s.d_out},
                        {"width", s.width},
                        {"theta", ckpt.params.theta},
                        {"seed", ckpt.seed},
                        {"meta", ckpt.meta}};
}

NetworkCheckpoint checkpoint_from_json(const nlohmann::json& j) {
  NetworkShape shape{j.at("d_in").get<std::size_t>(), j.at("d_out").get<std::size_t>(),
                     j.at("width").get<std::size_t>()};
  NetworkCheckpoint ckpt;
  ckpt.params = NetworkParams(shape, j.at("theta").get<std::vector<double>>());
  ckpt.seed = j.value("seed", std::uint64_t{0});
  ckpt.meta = j.value("meta", nlohmann::json::object());
  return ckpt;
}

}  // namespace pinn
