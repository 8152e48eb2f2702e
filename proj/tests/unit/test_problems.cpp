#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "pinn/assembly.hpp"
#include "pinn/errors.hpp"
#include "pinn/problems.hpp"

using namespace pinn;
using std::numbers::pi;

namespace {

double data(const PdeProblem& p, const std::string& name, std::vector<double> x,
            std::size_t component = 0) {
  const DataField& d = p.truth.data.at(name);
  std::vector<double> out(d.dim);
  d.fn(x, out);
  return out.at(component);
}

std::vector<double> random_point(std::size_t d, Rng& rng) {
  std::vector<double> x(d);
  for (auto& v : x) v = rng.uniform();
  return x;
}

SampleSet region_samples(const PdeProblem& p, Region r, std::size_t n, Rng& rng) {
  switch (r) {
    case Region::Interior: return sample_interior(p.domain, n, rng);
    case Region::Boundary: return sample_boundary(p.domain, n, rng);
    case Region::Initial: return sample_initial(p.domain, n, rng);
  }
  return {};
}

// Closed-form truths, written independently of the library.
double elasticity_u(const std::vector<double>& x) {
  return (x[0] * x[0] + 1) * (x[1] * x[1] + 1) * (x[2] * x[2] + 1) * std::exp(x[0] + x[1] + x[2]);
}

double stokes_u3(const std::vector<double>& x) {
  const double X = x[0], Y = x[1];
  return -2 * X * X * (X - 1) * (X - 1) * Y * (Y - 1) * (2 * Y - 1);
}

}  // namespace

TEST(Problems, NamesAndUnknownName) {
  EXPECT_EQ(problem_names().size(), 8u);
  try {
    make_problem("heat");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("transient-stokes"), std::string::npos);
  }
}

TEST(Problems, PoissonValues) {
  const PdeProblem p = poisson();
  const std::vector<double> c{0.5, 0.5, 0.5};
  EXPECT_NEAR(p.truth.field_jet(0, 1, c).value(0), 1.0, 1e-15);
  EXPECT_NEAR(data(p, "f", c), 3 * pi * pi, 1e-12);
  EXPECT_NEAR(data(p, "f", c), 29.60881, 1e-5);
}

TEST(Problems, PoissonZeroNetworkResidualIsF) {
  const PdeProblem p = poisson();
  Rng rng(1, 0);
  std::vector<Jet> zero(1, Jet(1, 3));
  for (int i = 0; i < 10; ++i) {
    const auto x = random_point(3, rng);
    std::vector<double> r(1);
    p.blocks.at(0).evaluate(zero, x, r);
    EXPECT_NEAR(r[0], data(p, "f", x), 1e-12);
    // Sign convention: residual = Laplace u + f.
    const double s = std::sin(pi * x[0]) * std::sin(pi * x[1]) * std::sin(pi * x[2]);
    EXPECT_NEAR(r[0], 3 * pi * pi * s, 1e-12);
  }
}

TEST(Problems, DarcyValues) {
  const PdeProblem p = darcy();
  const std::vector<double> c{0.5, 0.5, 0.5};
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(data(p, "f", c, k), 0.0, 1e-14);
  EXPECT_NEAR(data(p, "g", c), -3 * pi * pi, 1e-12);
  EXPECT_NEAR(data(p, "g", c), -29.60881, 1e-5);
}

TEST(Problems, ElasticityCoefficients) {
  const PdeProblem p = elasticity();
  EXPECT_EQ(p.coefficients.lame_lambda, 0.5769);
  EXPECT_EQ(p.coefficients.lame_mu, 0.3846);
}

TEST(Problems, ElasticityOperatorMatchesFiniteDifferenceOfStress) {
  const PdeProblem p = elasticity();
  const double lam = 0.5769, mu = 0.3846;
  // Every component of the truth is the same scalar function.
  auto grad_u = [&](std::vector<double> x, std::size_t a) {
    const double h = 1e-4;
    auto xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    return (elasticity_u(xp) - elasticity_u(xm)) / (2 * h);
  };
  auto stress = [&](std::vector<double> x, std::size_t i, std::size_t b) {
    double div = 0.0;
    for (std::size_t a = 0; a < 3; ++a) div += grad_u(x, a);
    // eps_ib = (d_i u_b + d_b u_i) / 2 with u_b = u_i = u.
    const double eps = 0.5 * (grad_u(x, i) + grad_u(x, b));
    return (i == b ? lam * div : 0.0) + 2 * mu * eps;
  };
  Rng rng(3, 0);
  std::vector<Jet> jets(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_point(3, rng);
    jets[0] = p.truth.field_jet(0, 3, x);
    std::vector<double> op(3);
    p.blocks.at(0).apply(jets, op);
    for (std::size_t i = 0; i < 3; ++i) {
      double fd = 0.0;
      for (std::size_t b = 0; b < 3; ++b) {
        const double h = 1e-3;
        auto xp = x, xm = x;
        xp[b] += h;
        xm[b] -= h;
        fd += (stress(xp, i, b) - stress(xm, i, b)) / (2 * h);
      }
      EXPECT_NEAR(op[i], fd, 1e-5 * std::abs(fd)) << "component " << i;
    }
  }
}

TEST(Problems, StokesTruth) {
  const PdeProblem p = stokes();
  Rng rng(4, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_point(3, rng);
    const Jet u = p.truth.field_jet(0, 3, x);
    EXPECT_NEAR(u.gradient(0, 0) + u.gradient(1, 1) + u.gradient(2, 2), 0.0, 1e-15);
    EXPECT_EQ(u.value(0), 0.0);
    EXPECT_EQ(u.value(1), 0.0);
    EXPECT_NEAR(u.value(2), stokes_u3(x), 1e-15);
    const Jet pr = p.truth.field_jet(1, 1, x);
    double expect = 1.0;
    for (double v : x) expect *= v * (1 - v);
    EXPECT_NEAR(pr.value(0), expect, 1e-16);
  }
  const Jet mid = p.truth.field_jet(0, 3, std::vector<double>{0.5, 0.5, 0.3});
  EXPECT_NEAR(mid.value(2), 0.0, 1e-16);
}

TEST(Problems, TransientStokesDecays) {
  const PdeProblem p = stokes(true);
  const std::vector<double> x{0.8, 0.3, 0.6, 0.2};
  const std::vector<double> xs{0.3, 0.6, 0.2};
  EXPECT_NEAR(p.truth.field_jet(0, 3, x).value(2), std::exp(-0.4) * stokes_u3(xs), 1e-15);
}

TEST(Problems, ParabolicValues) {
  const PdeProblem p = parabolic();
  const std::vector<double> o{0, 0, 0, 0};
  EXPECT_NEAR(p.truth.field_jet(0, 1, o).value(0), 3.0, 1e-15);
  EXPECT_NEAR(data(p, "f", o), 9 * pi * pi / 4, 1e-12);
  EXPECT_NEAR(data(p, "f", o), 22.20661, 1e-5);
  // Dirichlet data is the (non-zero) trace of the truth.
  Rng rng(5, 0);
  const SampleSet s = sample_boundary(p.domain, 20, rng);
  double largest = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::vector<double> x(s.point(i).begin(), s.point(i).end());
    const double u = std::exp(-pi * pi * x[0] / 4) *
                     (std::cos(pi * x[1]) + std::cos(pi * x[2]) + std::cos(pi * x[3]));
    EXPECT_NEAR(data(p, "g_D", x), u, 1e-14);
    largest = std::max(largest, std::abs(u));
  }
  EXPECT_GT(largest, 0.1);
}

TEST(Problems, HyperbolicValues) {
  const PdeProblem p = hyperbolic();
  EXPECT_NEAR(data(p, "f", {0.5, 0.5, 0.5, 0.5}), 2 * pi * pi, 1e-12);
  EXPECT_NEAR(data(p, "f", {0.5, 0.5, 0.5, 0.5}), 19.73921, 1e-5);
  Rng rng(6, 0);
  for (int i = 0; i < 10; ++i) {
    const auto x = random_point(4, rng);
    EXPECT_EQ(data(p, "u0", x), 0.0);
    EXPECT_EQ(data(p, "g_D", x), 0.0);
  }
}

TEST(Problems, InverseRegularization) {
  EXPECT_THROW(inverse_source(0.0), InvalidRegularization);
  EXPECT_THROW(inverse_source(-1.0), InvalidRegularization);
  const PdeProblem p = inverse_source(1e-2);
  Rng rng(7, 0);
  std::size_t reg = p.blocks.size();
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    if (p.blocks[b].regularization) reg = b;
  }
  ASSERT_LT(reg, p.blocks.size());
  for (int i = 0; i < 20; ++i) {
    const auto x = random_point(3, rng);
    const double u = std::sin(pi * x[0]) * std::sin(pi * x[1]) * std::sin(pi * x[2]);
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
      if (p.blocks[b].region != Region::Interior) continue;
      const double r = truth_residual(p, b, x).at(0);
      if (b == reg) {
        EXPECT_NEAR(r, 1e-2 * 3 * pi * pi * u, 1e-14);
      } else {
        EXPECT_NEAR(r, 0.0, 1e-12) << p.blocks[b].name;
      }
    }
  }
}

TEST(Problems, InverseNoisePerturbsObservations) {
  const PdeProblem clean = inverse_source(1e-3, 0.0), noisy = inverse_source(1e-3, 0.1);
  const std::vector<double> x{0.3, 0.4, 0.5};
  const double d = data(noisy, "u_d", x) - data(clean, "u_d", x);
  EXPECT_LE(std::abs(d), 0.1);
  EXPECT_NE(d, 0.0);
  EXPECT_EQ(data(noisy, "u_d", x), data(inverse_source(1e-3, 0.1), "u_d", x));
}

TEST(Problems, ManufacturedConsistency) {
  for (const auto& name : problem_names()) {
    ProblemOptions opts;
    opts.average_penalty = true;
    const PdeProblem p = make_problem(name, opts);
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
      if (p.blocks[b].regularization) continue;
      Rng rng(8, b);
      const SampleSet s = region_samples(p, p.blocks[b].region, 100, rng);
      for (std::size_t i = 0; i < s.size(); ++i) {
        for (double r : truth_residual(p, b, s.point(i))) {
          ASSERT_LE(std::abs(r), 1e-8) << name << "/" << p.blocks[b].name;
        }
      }
    }
  }
}

// Truth jets against finite differences of their own values.
TEST(Problems, TruthJetsMatchFiniteDifferences) {
  for (const auto& name : problem_names()) {
    const PdeProblem p = make_problem(name);
    const std::size_t d = p.domain.coord_dim();
    Rng rng(9, 0);
    for (std::size_t f = 0; f < p.fields.size(); ++f) {
      const std::size_t m = p.fields[f].d_out;
      for (int trial = 0; trial < 5; ++trial) {
        const auto x = random_point(d, rng);
        const Jet j = p.truth.field_jet(f, m, x);
        for (std::size_t a = 0; a < d; ++a) {
          const double h = 1e-5;
          auto xp = x, xm = x;
          xp[a] += h;
          xm[a] -= h;
          const Jet jp = p.truth.field_jet(f, m, xp), jm = p.truth.field_jet(f, m, xm);
          for (std::size_t k = 0; k < m; ++k) {
            const double scale = std::max(1.0, std::abs(j.gradient(k, a)));
            EXPECT_NEAR((jp.value(k) - jm.value(k)) / (2 * h), j.gradient(k, a), 1e-6 * scale)
                << name;
            for (std::size_t b = 0; b < d; ++b) {
              const double hs = std::max(1.0, std::abs(j.hessian(k, a, b)));
              EXPECT_NEAR((jp.gradient(k, b) - jm.gradient(k, b)) / (2 * h), j.hessian(k, a, b),
                          1e-5 * hs)
                  << name;
            }
          }
        }
      }
    }
  }
}

TEST(Problems, ElasticityTruthIsPaperSolution) {
  const PdeProblem p = elasticity();
  const std::vector<double> x{0.1, 0.6, 0.8};
  const Jet j = p.truth.field_jet(0, 3, x);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(j.value(k), elasticity_u(x), 1e-12);
}

TEST(Problems, BlocksAreAffineInJets) {
  Rng rng(10, 0);
  for (const auto& name : problem_names()) {
    ProblemOptions opts;
    opts.average_penalty = true;
    const PdeProblem p = make_problem(name, opts);
    const std::size_t d = p.domain.coord_dim();
    auto random_jets = [&] {
      std::vector<Jet> jets;
      for (const auto& f : p.fields) {
        Jet j(f.d_out, d);
        for (std::size_t k = 0; k < f.d_out; ++k) {
          j.value(k) = rng.normal();
          for (std::size_t a = 0; a < d; ++a) {
            j.gradient(k, a) = rng.normal();
            for (std::size_t b = 0; b < d; ++b) j.hessian(k, a, b) = rng.normal();
          }
        }
        jets.push_back(j);
      }
      return jets;
    };
    const auto j1 = random_jets(), j2 = random_jets();
    std::vector<Jet> sum = j1, zero;
    for (std::size_t f = 0; f < sum.size(); ++f) {
      const std::size_t m = p.fields[f].d_out;
      zero.emplace_back(m, d);
      for (std::size_t k = 0; k < m; ++k) {
        sum[f].value(k) += j2[f].value(k);
        for (std::size_t a = 0; a < d; ++a) {
          sum[f].gradient(k, a) += j2[f].gradient(k, a);
          for (std::size_t b = 0; b < d; ++b) sum[f].hessian(k, a, b) += j2[f].hessian(k, a, b);
        }
      }
    }
    const auto x = random_point(d, rng);
    for (const auto& block : p.blocks) {
      std::vector<double> r12(block.dim()), r1(block.dim()), r2(block.dim()), r0(block.dim());
      block.evaluate(sum, x, r12);
      block.evaluate(j1, x, r1);
      block.evaluate(j2, x, r2);
      block.evaluate(zero, x, r0);
      for (std::size_t c = 0; c < block.dim(); ++c) {
        EXPECT_NEAR(r12[c] - r1[c] - r2[c] + r0[c], 0.0, 1e-12) << name << "/" << block.name;
      }
    }
  }
}

TEST(Problems, HardBoundaryDropsTraceBlocks) {
  const PdeProblem p = with_hard_boundary(poisson());
  ASSERT_TRUE(p.fields[0].hard.has_value());
  for (const auto& b : p.blocks) EXPECT_NE(b.region, Region::Boundary);
  const PdeProblem e = with_hard_boundary(elasticity());
  EXPECT_FALSE(e.fields[0].hard.has_value());
  EXPECT_EQ(e.blocks.size(), elasticity().blocks.size());
}

TEST(Problems, InverseEnergyAtTruth) {
  PdeProblem p = inverse_source(1e-2);
  // Represent the truth exactly: zero networks under a lift equal to the truth.
  for (std::size_t f = 0; f < p.fields.size(); ++f) {
    const ManufacturedSolution truth = p.truth;
    const std::size_t m = p.fields[f].d_out;
    p.fields[f].hard = HardBoundary{
        [truth, f, m](std::span<const double> x, Jet& out) { out = truth.field_jet(f, m, x); },
        [dom = p.domain](std::span<const double> x, Jet& out) { bubble_jet(dom, x, out); }};
  }
  const Collocation col = draw_collocation(p, {100000, 100}, 1, 2);
  std::vector<NetworkParams> zero;
  for (const auto& f : p.fields) zero.emplace_back(NetworkShape{3, f.d_out, 1});
  const double loss = assemble_loss(p, col, zero);
  const double expected = 0.5 * 1e-4 * 9 * std::pow(pi, 4) / 8;
  EXPECT_NEAR(loss, expected, 0.02 * expected);
}
