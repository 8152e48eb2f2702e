#include "pinn/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <memory>
#include <numbers>

#include "pinn/errors.hpp"

namespace pinn {

namespace {

constexpr double kPi = std::numbers::pi;

using Kind = JetRef::Kind;

Term value(std::size_t field, std::size_t comp, double coeff = 1.0) {
  return {{Kind::Value, field, comp, 0, 0}, coeff};
}
Term grad(std::size_t field, std::size_t comp, std::size_t a, double coeff = 1.0) {
  return {{Kind::Gradient, field, comp, a, 0}, coeff};
}
Term hess(std::size_t field, std::size_t comp, std::size_t a, std::size_t b,
          double coeff = 1.0) {
  return {{Kind::Hessian, field, comp, a, b}, coeff};
}

// coeff * Laplacian of one component over the spatial axes.
void add_laplacian(std::vector<Term>& row, const Domain& dom, std::size_t field,
                   std::size_t comp, double coeff) {
  for (std::size_t a = 0; a < dom.spatial_dim; ++a) {
    const std::size_t ax = dom.spatial_offset() + a;
    row.push_back(hess(field, comp, ax, ax, coeff));
  }
}

// (f, f', f'') of one axis factor of a separable function.
struct AxisFactor {
  double v;
  double d1;
  double d2;
};

// out[k] += scale * prod_a f_a(x_a), including its gradient and Hessian.
void add_product(std::span<const AxisFactor> f, double scale, Jet& out, std::size_t k) {
  const std::size_t n = f.size();
  auto prod_except = [&](std::size_t s1, std::size_t s2) {
    double p = 1.0;
    for (std::size_t a = 0; a < n; ++a) {
      if (a != s1 && a != s2) p *= f[a].v;
    }
    return p;
  };
  out.value(k) += scale * prod_except(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    out.gradient(k, a) += scale * f[a].d1 * prod_except(a, n);
    for (std::size_t b = 0; b < n; ++b) {
      out.hessian(k, a, b) += scale * (a == b ? f[a].d2 * prod_except(a, n)
                                              : f[a].d1 * f[b].d1 * prod_except(a, b));
    }
  }
}

AxisFactor one() { return {1.0, 0.0, 0.0}; }
AxisFactor sine(double s) {
  return {std::sin(kPi * s), kPi * std::cos(kPi * s), -kPi * kPi * std::sin(kPi * s)};
}
// Derivative of sine(s): pi cos(pi s) and its derivatives.
AxisFactor sine_prime(double s) {
  return {kPi * std::cos(kPi * s), -kPi * kPi * std::sin(kPi * s),
          -kPi * kPi * kPi * std::cos(kPi * s)};
}
AxisFactor cosine(double s) {
  return {std::cos(kPi * s), -kPi * std::sin(kPi * s), -kPi * kPi * std::cos(kPi * s)};
}
AxisFactor exp_decay(double t, double rate) {
  const double e = std::exp(-rate * t);
  return {e, -rate * e, rate * rate * e};
}

// prod_a sin(pi x_a) over the spatial axes, times an optional time factor.
void sine_product(const Domain& dom, std::span<const double> x, double scale, Jet& out,
                  std::size_t k, std::optional<AxisFactor> time = std::nullopt) {
  std::array<AxisFactor, 4> f{};
  const std::size_t n = dom.coord_dim();
  if (dom.is_spacetime()) f[0] = time.value_or(one());
  for (std::size_t a = dom.spatial_offset(); a < n; ++a) f[a] = sine(x[a]);
  add_product({f.data(), n}, scale, out, k);
}

// Stokes stream function factor P(s) = s^2 (s-1)^2 and derivatives up to third order.
struct Quartic {
  double p0, p1, p2, p3;
};
Quartic stream_factor(double s) {
  return {s * s * (s - 1.0) * (s - 1.0), 2.0 * s * (s - 1.0) * (2.0 * s - 1.0),
          12.0 * s * s - 12.0 * s + 2.0, 24.0 * s - 12.0};
}

double sine_value(const Domain& dom, std::span<const double> x) {
  double v = 1.0;
  for (std::size_t a = dom.spatial_offset(); a < dom.coord_dim(); ++a) v *= std::sin(kPi * x[a]);
  return v;
}

DataFn zeros() {
  return [](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
}

using SharedFields = std::shared_ptr<const std::vector<JetFn>>;

SharedFields share_fields(const ManufacturedSolution& truth) {
  return std::make_shared<const std::vector<JetFn>>(truth.fields);
}

Jet jet_of(const SharedFields& fields, std::size_t field, std::size_t d_out,
           std::span<const double> x) {
  Jet j(d_out, x.size());
  (*fields)[field](x, j);
  return j;
}

// Target function that applies `rows` to the truth jets.
DataFn stencil_of_truth(SharedFields fields, std::vector<std::size_t> dims,
                        std::vector<std::vector<Term>> rows, double sign) {
  return [fields, dims, rows, sign](std::span<const double> x, std::span<double> out) {
    std::vector<Jet> jets(dims.size());
    for (std::size_t f = 0; f < dims.size(); ++f) jets[f] = jet_of(fields, f, dims[f], x);
    ResidualBlock tmp;
    tmp.rows = rows;
    tmp.apply(jets, out);
    for (double& v : out) v *= sign;
  };
}

DataFn trace_of(SharedFields fields, std::size_t field, std::size_t d_out) {
  return [fields, field, d_out](std::span<const double> x, std::span<double> out) {
    const Jet j = jet_of(fields, field, d_out, x);
    for (std::size_t k = 0; k < d_out; ++k) out[k] = j.value(k);
  };
}

DataFn from_data(const ManufacturedSolution& truth, const std::string& name, double sign = 1.0) {
  DataFn fn = truth.data.at(name).fn;
  return [fn, sign](std::span<const double> x, std::span<double> out) {
    fn(x, out);
    for (double& v : out) v *= sign;
  };
}

std::vector<Term> single(Term t) { return {t}; }

ResidualBlock trace_block(const std::string& name, Region region, std::size_t field,
                          std::size_t d_out, DataFn target) {
  ResidualBlock b;
  b.name = name;
  b.region = region;
  for (std::size_t k = 0; k < d_out; ++k) b.rows.push_back(single(value(field, k)));
  b.target = std::move(target);
  b.trace_of_field = field;
  return b;
}

std::uint64_t hash_point(std::span<const double> x) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (double v : x) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = splitmix64(h ^ bits);
  }
  return h;
}

}  // namespace

std::string to_string(Region region) {
  switch (region) {
    case Region::Interior: return "interior";
    case Region::Boundary: return "boundary";
    case Region::Initial: return "initial";
  }
  return "unknown";
}

Region region_of(SampleTag tag) {
  switch (tag) {
    case SampleTag::Interior:
    case SampleTag::SpaceTimeInterior: return Region::Interior;
    case SampleTag::Boundary:
    case SampleTag::SpaceTimeBoundary: return Region::Boundary;
    case SampleTag::Initial: return Region::Initial;
  }
  return Region::Interior;
}

double JetRef::read(std::span<const Jet> jets) const {
  const Jet& j = jets[field];
  switch (kind) {
    case Kind::Value: return j.value(component);
    case Kind::Gradient: return j.gradient(component, a);
    case Kind::Hessian: return j.hessian(component, a, b);
  }
  return 0.0;
}

std::span<const double> JetRef::read(std::span<const ParamJet> pjets) const {
  const ParamJet& j = pjets[field];
  switch (kind) {
    case Kind::Value: return j.value(component);
    case Kind::Gradient: return j.gradient(component, a);
    case Kind::Hessian: return j.hessian(component, a, b);
  }
  return {};
}

void ResidualBlock::apply(std::span<const Jet> jets, std::span<double> out) const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double acc = 0.0;
    for (const Term& t : rows[r]) acc += t.coeff * t.ref.read(jets);
    out[r] = acc;
  }
}

void ResidualBlock::evaluate(std::span<const Jet> jets, std::span<const double> x,
                             std::span<double> out) const {
  apply(jets, out);
  thread_local std::vector<double> tgt;
  tgt.assign(dim(), 0.0);
  target(x, tgt);
  for (std::size_t r = 0; r < dim(); ++r) out[r] -= tgt[r];
}

std::vector<std::size_t> ResidualBlock::fields_used() const {
  std::vector<std::size_t> used;
  for (const auto& row : rows) {
    for (const Term& t : row) used.push_back(t.ref.field);
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  return used;
}

Jet ManufacturedSolution::field_jet(std::size_t field, std::size_t d_out,
                                    std::span<const double> x) const {
  Jet j(d_out, x.size());
  fields.at(field)(x, j);
  return j;
}

std::size_t PdeProblem::field_index(const std::string& field_name) const {
  for (std::size_t f = 0; f < fields.size(); ++f) {
    if (fields[f].name == field_name) return f;
  }
  throw ConfigError("problem " + name + " has no field '" + field_name + "'");
}

bool PdeProblem::uses_region(Region region) const {
  return std::any_of(blocks.begin(), blocks.end(),
                     [region](const ResidualBlock& b) { return b.region == region; });
}

PdeProblem poisson() {
  PdeProblem p;
  p.name = "poisson";
  p.domain = Domain::cube(3);
  p.fields = {{"u", 1, 64, true, std::nullopt}};
  const Domain dom = p.domain;

  auto truth = std::make_shared<ManufacturedSolution>();
  truth->fields = {[dom](std::span<const double> x, Jet& out) {
    out.reset(1, x.size());
    sine_product(dom, x, 1.0, out, 0);
  }};
  truth->data["f"] = {1, [dom](std::span<const double> x, std::span<double> out) {
                        out[0] = 3.0 * kPi * kPi * sine_value(dom, x);
                      }};
  truth->data["g_D"] = {1, zeros()};

  ResidualBlock interior;
  interior.name = "interior";
  interior.region = Region::Interior;
  interior.rows.resize(1);
  add_laplacian(interior.rows[0], dom, 0, 0, 1.0);
  // residual = Laplace u + f
  interior.target = from_data(*truth, "f", -1.0);

  p.blocks = {interior, trace_block("boundary", Region::Boundary, 0, 1, from_data(*truth, "g_D"))};
  p.truth = *truth;
  return p;
}

PdeProblem darcy() {
  PdeProblem p;
  p.name = "darcy";
  p.domain = Domain::cube(3);
  p.fields = {{"sigma", 3, 32, false, std::nullopt}, {"p", 1, 32, true, std::nullopt}};
  const Domain dom = p.domain;

  auto truth = std::make_shared<ManufacturedSolution>();
  auto sigma_jet = [](std::span<const double> x, Jet& out) {
    out.reset(3, x.size());
    for (std::size_t i = 0; i < 3; ++i) {
      std::array<AxisFactor, 3> f{sine(x[0]), sine(x[1]), sine(x[2])};
      f[i] = sine_prime(x[i]);
      add_product(f, 1.0, out, i);
    }
  };
  truth->fields = {sigma_jet, [dom](std::span<const double> x, Jet& out) {
                     out.reset(1, x.size());
                     sine_product(dom, x, 1.0, out, 0);
                   }};
  truth->data["f"] = {3, [](std::span<const double> x, std::span<double> out) {
                        // f = sigma + grad p = 2 grad p
                        for (std::size_t i = 0; i < 3; ++i) {
                          double v = 2.0 * kPi * std::cos(kPi * x[i]);
                          for (std::size_t j = 0; j < 3; ++j) {
                            if (j != i) v *= std::sin(kPi * x[j]);
                          }
                          out[i] = v;
                        }
                      }};
  truth->data["g"] = {1, [dom](std::span<const double> x, std::span<double> out) {
                        out[0] = -3.0 * kPi * kPi * sine_value(dom, x);
                      }};
  truth->data["g_D"] = {1, zeros()};

  ResidualBlock constitutive;
  constitutive.name = "constitutive";
  constitutive.region = Region::Interior;
  for (std::size_t i = 0; i < 3; ++i) constitutive.rows.push_back({value(0, i), grad(1, 0, i)});
  constitutive.target = from_data(*truth, "f");

  ResidualBlock divergence;
  divergence.name = "divergence";
  divergence.region = Region::Interior;
  divergence.rows.resize(1);
  for (std::size_t i = 0; i < 3; ++i) divergence.rows[0].push_back(grad(0, i, i));
  divergence.target = from_data(*truth, "g");

  p.blocks = {constitutive, divergence,
              trace_block("boundary", Region::Boundary, 1, 1, from_data(*truth, "g_D"))};
  p.truth = *truth;
  return p;
}

PdeProblem elasticity() {
  PdeProblem p;
  p.name = "elasticity";
  p.domain = Domain::cube(3);
  p.fields = {{"u", 3, 64, false, std::nullopt}};
  const Domain dom = p.domain;
  const double lam = p.coefficients.lame_lambda;
  const double mu = p.coefficients.lame_mu;

  auto truth = std::make_shared<ManufacturedSolution>();
  truth->fields = {[](std::span<const double> x, Jet& out) {
    out.reset(3, x.size());
    std::array<AxisFactor, 3> f{};
    for (std::size_t a = 0; a < 3; ++a) {
      const double s = x[a];
      const double e = std::exp(s);
      f[a] = {(s * s + 1.0) * e, (s + 1.0) * (s + 1.0) * e, (s + 1.0) * (s + 3.0) * e};
    }
    for (std::size_t k = 0; k < 3; ++k) add_product(f, 1.0, out, k);
  }};

  // div(C eps(u)) = mu Laplace u + (lambda + mu) grad div u
  std::vector<std::vector<Term>> op(3);
  for (std::size_t i = 0; i < 3; ++i) {
    add_laplacian(op[i], dom, 0, i, mu);
    for (std::size_t a = 0; a < 3; ++a) op[i].push_back(hess(0, a, i, a, lam + mu));
  }
  truth->data["f"] = {3, stencil_of_truth(share_fields(*truth), {3}, op, -1.0)};
  truth->data["g_D"] = {3, trace_of(share_fields(*truth), 0, 3)};

  ResidualBlock interior;
  interior.name = "interior";
  interior.region = Region::Interior;
  interior.rows = op;
  // residual = div(C eps(u)) + f
  interior.target = from_data(*truth, "f", -1.0);

  p.blocks = {interior, trace_block("boundary", Region::Boundary, 0, 3, from_data(*truth, "g_D"))};
  p.truth = *truth;
  return p;
}

PdeProblem stokes(bool transient, bool average_penalty) {
  PdeProblem p;
  p.name = transient ? "transient-stokes" : "stokes";
  p.domain = transient ? Domain::spacetime(3) : Domain::cube(3);
  p.fields = {{"u", 3, 32, false, std::nullopt}, {"p", 1, 32, false, std::nullopt}};
  const Domain dom = p.domain;
  const std::size_t s = dom.spatial_offset();

  auto time_factor = [transient](std::span<const double> x) -> std::optional<AxisFactor> {
    if (!transient) return std::nullopt;
    return exp_decay(x[0], 0.5);
  };

  auto truth = std::make_shared<ManufacturedSolution>();
  // u = curl(psi, 0, 0) = (0, 0, -P(x) P'(y)) with psi = P(x) P(y).
  truth->fields = {
      [dom, s, time_factor](std::span<const double> x, Jet& out) {
        out.reset(3, x.size());
        const Quartic px = stream_factor(x[s]);
        const Quartic py = stream_factor(x[s + 1]);
        std::array<AxisFactor, 4> f{};
        if (dom.is_spacetime()) f[0] = *time_factor(x);
        f[s] = {px.p0, px.p1, px.p2};
        f[s + 1] = {py.p1, py.p2, py.p3};
        f[s + 2] = one();
        add_product({f.data(), dom.coord_dim()}, -1.0, out, 2);
      },
      [dom, s, time_factor](std::span<const double> x, Jet& out) {
        out.reset(1, x.size());
        std::array<AxisFactor, 4> f{};
        if (dom.is_spacetime()) f[0] = *time_factor(x);
        for (std::size_t a = s; a < s + 3; ++a) f[a] = {x[a] * (1.0 - x[a]), 1.0 - 2.0 * x[a], -2.0};
        add_product({f.data(), dom.coord_dim()}, 1.0, out, 0);
      }};

  // Momentum operator: (du/dt) - Laplace u + grad p.
  std::vector<std::vector<Term>> momentum(3);
  for (std::size_t i = 0; i < 3; ++i) {
    if (transient) momentum[i].push_back(grad(0, i, 0));
    add_laplacian(momentum[i], dom, 0, i, -1.0);
    momentum[i].push_back(grad(1, 0, s + i));
  }
  truth->data["f"] = {3, stencil_of_truth(share_fields(*truth), {3, 1}, momentum, 1.0)};
  truth->data["g_D"] = {3, trace_of(share_fields(*truth), 0, 3)};
  if (transient) truth->data["u0"] = {3, trace_of(share_fields(*truth), 0, 3)};

  ResidualBlock mom;
  mom.name = "momentum";
  mom.region = Region::Interior;
  mom.rows = momentum;
  mom.target = from_data(*truth, "f");

  ResidualBlock div;
  div.name = "divergence";
  div.region = Region::Interior;
  div.rows.resize(1);
  for (std::size_t i = 0; i < 3; ++i) div.rows[0].push_back(grad(0, i, s + i));
  div.target = zeros();

  p.blocks = {mom, div, trace_block("boundary", Region::Boundary, 0, 3, from_data(*truth, "g_D"))};
  if (transient) {
    ResidualBlock init = trace_block("initial", Region::Initial, 0, 3, from_data(*truth, "u0"));
    init.trace_of_field.reset();
    p.blocks.push_back(init);
  }
  if (average_penalty) {
    // Pins the pressure constant to that of the manufactured pressure.
    ResidualBlock avg;
    avg.name = "pressure_mean";
    avg.region = Region::Interior;
    avg.reduction = Reduction::Mean;
    avg.rows = {single(value(1, 0))};
    avg.target = trace_of(share_fields(*truth), 1, 1);
    p.blocks.push_back(avg);
  }
  p.truth = *truth;
  return p;
}

PdeProblem parabolic() {
  PdeProblem p;
  p.name = "parabolic";
  p.domain = Domain::spacetime(3);
  p.fields = {{"u", 1, 64, false, std::nullopt}};
  const Domain dom = p.domain;
  const double rate = kPi * kPi / 4.0;

  auto truth = std::make_shared<ManufacturedSolution>();
  truth->fields = {[rate](std::span<const double> x, Jet& out) {
    out.reset(1, x.size());
    for (std::size_t j = 1; j <= 3; ++j) {
      std::array<AxisFactor, 4> f{exp_decay(x[0], rate), one(), one(), one()};
      f[j] = cosine(x[j]);
      add_product(f, 1.0, out, 0);
    }
  }};
  auto u_value = [rate](std::span<const double> x) {
    return std::exp(-rate * x[0]) *
           (std::cos(kPi * x[1]) + std::cos(kPi * x[2]) + std::cos(kPi * x[3]));
  };
  truth->data["f"] = {1, [u_value](std::span<const double> x, std::span<double> out) {
                        out[0] = 0.75 * kPi * kPi * u_value(x);
                      }};
  truth->data["g_D"] = {1, [u_value](std::span<const double> x, std::span<double> out) {
                          out[0] = u_value(x);
                        }};
  truth->data["u0"] = {1, [](std::span<const double> x, std::span<double> out) {
                         out[0] = std::cos(kPi * x[1]) + std::cos(kPi * x[2]) +
                                  std::cos(kPi * x[3]);
                       }};

  ResidualBlock interior;
  interior.name = "interior";
  interior.region = Region::Interior;
  interior.rows.resize(1);
  interior.rows[0].push_back(grad(0, 0, 0));
  add_laplacian(interior.rows[0], dom, 0, 0, -1.0);
  interior.target = from_data(*truth, "f");

  ResidualBlock init = trace_block("initial", Region::Initial, 0, 1, from_data(*truth, "u0"));
  init.trace_of_field.reset();
  p.blocks = {interior, trace_block("boundary", Region::Boundary, 0, 1, from_data(*truth, "g_D")),
              init};
  p.truth = *truth;
  return p;
}

PdeProblem hyperbolic() {
  PdeProblem p;
  p.name = "hyperbolic";
  p.domain = Domain::spacetime(3);
  p.fields = {{"u", 1, 64, true, std::nullopt}};
  const Domain dom = p.domain;

  auto truth = std::make_shared<ManufacturedSolution>();
  truth->fields = {[dom](std::span<const double> x, Jet& out) {
    out.reset(1, x.size());
    sine_product(dom, x, 1.0, out, 0, sine(x[0]));
  }};
  truth->data["f"] = {1, [dom](std::span<const double> x, std::span<double> out) {
                        out[0] = 2.0 * kPi * kPi * std::sin(kPi * x[0]) * sine_value(dom, x);
                      }};
  truth->data["g_D"] = {1, zeros()};
  truth->data["u0"] = {1, zeros()};
  truth->data["u1"] = {1, [dom](std::span<const double> x, std::span<double> out) {
                         out[0] = kPi * sine_value(dom, x);
                       }};

  ResidualBlock interior;
  interior.name = "interior";
  interior.region = Region::Interior;
  interior.rows.resize(1);
  interior.rows[0].push_back(hess(0, 0, 0, 0));
  add_laplacian(interior.rows[0], dom, 0, 0, -1.0);
  interior.target = from_data(*truth, "f");

  ResidualBlock init = trace_block("initial_value", Region::Initial, 0, 1, from_data(*truth, "u0"));
  init.trace_of_field.reset();
  ResidualBlock velocity;
  velocity.name = "initial_velocity";
  velocity.region = Region::Initial;
  velocity.rows = {single(grad(0, 0, 0))};
  velocity.target = from_data(*truth, "u1");

  p.blocks = {interior, trace_block("boundary", Region::Boundary, 0, 1, from_data(*truth, "g_D")),
              init, velocity};
  p.truth = *truth;
  return p;
}

PdeProblem inverse_source(double eta_reg, double noise) {
  if (!(eta_reg > 0.0) || !std::isfinite(eta_reg)) {
    throw InvalidRegularization("inverse_source: regularization must be positive, got " +
                                std::to_string(eta_reg));
  }
  PdeProblem p;
  p.name = "inverse";
  p.domain = Domain::cube(3);
  p.coefficients.eta_reg = eta_reg;
  p.fields = {{"u", 1, 32, true, std::nullopt}, {"f", 1, 32, false, std::nullopt}};
  const Domain dom = p.domain;

  auto truth = std::make_shared<ManufacturedSolution>();
  truth->fields = {[dom](std::span<const double> x, Jet& out) {
                     out.reset(1, x.size());
                     sine_product(dom, x, 1.0, out, 0);
                   },
                   [dom](std::span<const double> x, Jet& out) {
                     out.reset(1, x.size());
                     sine_product(dom, x, 3.0 * kPi * kPi, out, 0);
                   }};
  truth->data["f"] = {1, [dom](std::span<const double> x, std::span<double> out) {
                        out[0] = 3.0 * kPi * kPi * sine_value(dom, x);
                      }};
  truth->data["g"] = {1, zeros()};
  truth->data["u_d"] = {1, [dom, noise](std::span<const double> x, std::span<double> out) {
                          double v = sine_value(dom, x);
                          if (noise != 0.0) {
                            const double xi =
                                static_cast<double>(hash_point(x) >> 11) * 0x1.0p-53;
                            v += noise * (2.0 * xi - 1.0);
                          }
                          out[0] = v;
                        }};

  ResidualBlock source;
  source.name = "source";
  source.region = Region::Interior;
  source.rows.resize(1);
  add_laplacian(source.rows[0], dom, 0, 0, 1.0);
  source.rows[0].push_back(value(1, 0));
  source.target = zeros();

  ResidualBlock observation;
  observation.name = "observation";
  observation.region = Region::Interior;
  observation.rows = {single(value(0, 0))};
  observation.target = from_data(*truth, "u_d");

  ResidualBlock reg;
  reg.name = "regularization";
  reg.region = Region::Interior;
  reg.rows = {single(value(1, 0, eta_reg))};
  reg.target = zeros();
  reg.regularization = true;

  p.blocks = {source, observation,
              trace_block("boundary", Region::Boundary, 0, 1, from_data(*truth, "g")), reg};
  p.truth = *truth;
  return p;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"poisson",          "darcy",     "elasticity",
                                              "stokes",           "transient-stokes",
                                              "parabolic",        "hyperbolic", "inverse"};
  return names;
}

PdeProblem make_problem(const std::string& name, const ProblemOptions& options) {
  if (name == "poisson") return poisson();
  if (name == "darcy") return darcy();
  if (name == "elasticity") return elasticity();
  if (name == "stokes") return stokes(false, options.average_penalty);
  if (name == "transient-stokes") return stokes(true, options.average_penalty);
  if (name == "parabolic") return parabolic();
  if (name == "hyperbolic") return hyperbolic();
  if (name == "inverse") return inverse_source(options.eta_reg, options.noise);
  std::string valid;
  for (const auto& n : problem_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown pde '" + name + "' (valid: " + valid + ")");
}

PdeProblem with_hard_boundary(const PdeProblem& problem) {
  PdeProblem out = problem;
  const Domain dom = problem.domain;
  std::vector<bool> wrapped(out.fields.size(), false);
  for (std::size_t f = 0; f < out.fields.size(); ++f) {
    FieldSpec& spec = out.fields[f];
    if (!spec.homogeneous_trace) continue;
    const std::size_t d_out = spec.d_out;
    spec.hard = HardBoundary{
        [d_out](std::span<const double> x, Jet& j) { zero_jet(d_out, x.size(), j); },
        [dom](std::span<const double> x, Jet& j) { bubble_jet(dom, x, j); }};
    wrapped[f] = true;
  }
  std::erase_if(out.blocks, [&](const ResidualBlock& b) {
    return b.trace_of_field.has_value() && wrapped[*b.trace_of_field];
  });
  return out;
}

std::vector<double> truth_residual(const PdeProblem& problem, std::size_t block,
                                   std::span<const double> x) {
  std::vector<Jet> jets(problem.fields.size());
  for (std::size_t f = 0; f < problem.fields.size(); ++f) {
    jets[f] = problem.truth.field_jet(f, problem.fields[f].d_out, x);
  }
  const ResidualBlock& b = problem.blocks.at(block);
  std::vector<double> r(b.dim());
  b.evaluate(jets, x, r);
  return r;
}

}  // namespace pinn
