#include <gtest/gtest.h>

#include <cmath>

#include "pinn/assembly.hpp"
#include "pinn/errors.hpp"
#include "pinn/problems.hpp"

using namespace pinn;

namespace {

std::vector<NetworkParams> random_params(const PdeProblem& p, std::size_t width, std::uint64_t seed) {
  Rng rng(seed, 100);
  std::vector<NetworkParams> out;
  for (const auto& f : p.fields) out.push_back(init_params({p.domain.coord_dim(), f.d_out, width}, rng));
  return out;
}

// 1/2 sum_b sum_i w_b |r_b(x_i)|^2 from pointwise jets; Mean blocks use 1/2 |Omega| <r>^2.
double scalar_loss(const PdeProblem& p, const Collocation& col, const std::vector<NetworkParams>& params) {
  double total = 0.0;
  for (const auto& block : p.blocks) {
    const SampleSet& s = col.samples(block.region);
    std::vector<double> mean(block.dim(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::vector<Jet> jets(p.fields.size());
      for (std::size_t f = 0; f < p.fields.size(); ++f) eval_field(p.fields[f], params[f], s.point(i), jets[f], nullptr);
      std::vector<double> r(block.dim());
      block.evaluate(jets, s.point(i), r);
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (block.reduction == Reduction::Mean) {
          mean[c] += r[c] / static_cast<double>(s.size());
        } else {
          total += 0.5 * s.weight * r[c] * r[c];
        }
      }
    }
    if (block.reduction == Reduction::Mean) {
      for (double m : mean) total += 0.5 * s.measure() * m * m;
    }
  }
  return total;
}

}  // namespace

TEST(Assemble, ConstantResidualGivesHalf) {
  PdeProblem p = poisson();
  p.blocks.at(0).target = [](std::span<const double>, std::span<double> out) { out[0] = -1.0; };
  const Collocation col = draw_collocation(p, {1000, 100}, 1, 2);
  std::vector<NetworkParams> zero{NetworkParams({3, 1, 8})};
  const ResidualSystem sys = assemble(p, col, zero, false);
  EXPECT_NEAR(sys.loss(), 0.5, 1e-14);
  const auto blocks = sys.block_losses();
  EXPECT_NEAR(blocks[0], 0.5, 1e-14);
  EXPECT_EQ(blocks[1], 0.0);
}

TEST(Assemble, TruthInterpolatingLiftHasZeroLoss) {
  PdeProblem p = poisson();
  const ManufacturedSolution truth = p.truth;
  p.fields[0].hard = HardBoundary{
      [truth](std::span<const double> x, Jet& out) { out = truth.field_jet(0, 1, x); },
      [](std::span<const double> x, Jet& out) { bubble_jet(Domain::cube(3), x, out); }};
  const Collocation col = draw_collocation(p, {1000, 100}, 1, 2);
  std::vector<NetworkParams> zero{NetworkParams({3, 1, 8})};
  EXPECT_LE(assemble_loss(p, col, zero), 1e-16);
}

TEST(Assemble, LossMatchesScalarAccumulation) {
  for (const auto& name : problem_names()) {
    ProblemOptions opts;
    opts.average_penalty = true;
    for (bool hard : {false, true}) {
      const PdeProblem base = make_problem(name, opts);
      const PdeProblem p = hard ? with_hard_boundary(base) : base;
      const Collocation col = draw_collocation(p, {50, 21}, 3, 4);
      const auto params = random_params(p, 6, 5);
      const double expected = scalar_loss(p, col, params);
      EXPECT_NEAR(assemble(p, col, params, true).loss(), expected, 1e-12 * expected) << name;
      EXPECT_NEAR(assemble_loss(p, col, params), expected, 1e-12 * expected) << name;
    }
  }
}

TEST(Assemble, JacobianMatchesFiniteDifferences) {
  ProblemOptions opts;
  opts.average_penalty = true;
  for (const std::string name : {"poisson", "stokes", "hyperbolic", "inverse"}) {
    const PdeProblem p = make_problem(name, opts);
    const Collocation col = draw_collocation(p, {6, 14}, 7, 8);
    auto params = random_params(p, 5, 9);
    const ResidualSystem sys = assemble(p, col, params, true);
    const Vector theta = flatten_params(params);
    DenseMatrix fd(sys.r.size(), theta.size());
    Vector gfd(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      const double h = 1e-5;
      Vector t = theta;
      t[j] += h;
      unflatten_params(t, params);
      const ResidualSystem plus = assemble(p, col, params, false);
      t[j] -= 2 * h;
      unflatten_params(t, params);
      const ResidualSystem minus = assemble(p, col, params, false);
      fd.col(j) = (plus.r - minus.r) / (2 * h);
      gfd[j] = (plus.loss() - minus.loss()) / (2 * h);
    }
    for (const auto& b : sys.blocks) {
      const auto rows = Eigen::seqN(b.row_begin, b.row_count);
      EXPECT_LE((sys.J(rows, Eigen::all) - fd(rows, Eigen::all)).norm(),
                1e-6 * sys.J(rows, Eigen::all).norm())
          << name << "/" << b.name;
    }
    const Vector g = loss_gradient(sys);
    EXPECT_LE((g - gfd).norm(), 1e-6 * g.norm()) << name;
  }
}

TEST(Assemble, MapsCoverRowsAndColumns) {
  const PdeProblem p = stokes(true);
  const Collocation col = draw_collocation(p, {10, 14}, 1, 2);
  const auto params = random_params(p, 4, 3);
  const ResidualSystem sys = assemble(p, col, params, true);
  std::size_t rows = 0;
  for (const auto& b : sys.blocks) {
    EXPECT_EQ(b.row_begin, rows);
    rows += b.row_count;
  }
  EXPECT_EQ(rows, static_cast<std::size_t>(sys.r.size()));
  ASSERT_EQ(sys.fields.size(), 2u);
  EXPECT_EQ(sys.fields[1].col_begin, params[0].shape.param_count());
  EXPECT_EQ(sys.fields[0].col_count + sys.fields[1].col_count, static_cast<std::size_t>(sys.J.cols()));
}

TEST(Assemble, Errors) {
  const PdeProblem p = poisson();
  const Collocation col = draw_collocation(p, {10, 10}, 1, 2);
  std::vector<NetworkParams> none;
  EXPECT_THROW(assemble(p, col, none, false), DimensionMismatch);
  std::vector<NetworkParams> wrong{NetworkParams({2, 1, 4})};
  EXPECT_THROW(assemble(p, col, wrong, false), DimensionMismatch);
  auto params = random_params(p, 4, 1);
  params[0].theta[0] = std::nan("");
  EXPECT_THROW(assemble(p, col, params, true), NonFiniteResidual);
}

TEST(Assemble, Deterministic) {
  const PdeProblem p = darcy();
  const Collocation col = draw_collocation(p, {40, 20}, 1, 2);
  const auto params = random_params(p, 7, 3);
  const ResidualSystem a = assemble(p, col, params, true), b = assemble(p, col, params, true);
  EXPECT_EQ(a.r, b.r);
  EXPECT_EQ(a.J, b.J);
}

TEST(LossGradient, SmallCases) {
  ResidualSystem zero;
  zero.r = Vector::Zero(3);
  zero.J = DenseMatrix::Ones(3, 2);
  zero.has_jacobian = true;
  EXPECT_EQ(loss_gradient(zero), Vector::Zero(2));

  ResidualSystem s;
  s.r = Vector::Constant(1, 2.0);
  s.J = DenseMatrix::Constant(1, 1, 3.0);
  s.has_jacobian = true;
  EXPECT_EQ(loss_gradient(s)[0], 6.0);
}

TEST(GramMatrix, IdentityAndPositivity) {
  ResidualSystem s;
  s.r = Vector::Zero(2);
  s.J = DenseMatrix::Identity(2, 2);
  s.has_jacobian = true;
  EXPECT_EQ(gram_matrix(s, 1.0), DenseMatrix(2.0 * DenseMatrix::Identity(2, 2)));

  Rng rng(1, 0);
  for (int trial = 0; trial < 5; ++trial) {
    ResidualSystem r;
    r.J = uniform_points(rng, 40, 12).array() - 0.5;
    r.r = Vector::Ones(40);
    r.has_jacobian = true;
    const DenseMatrix g = gram_matrix(r, 1e-12);
    EXPECT_EQ(g, g.transpose());
    EXPECT_NO_THROW(solve_spd(g, Vector::Ones(12)));
  }
}

TEST(GramMatrix, MatchesDoubleLoopForFrozenHiddenLayer) {
  const PdeProblem p = poisson();
  const Collocation col = draw_collocation(p, {30, 20}, 1, 2);
  const auto params = random_params(p, 5, 4);
  const NetworkParams& net = params[0];
  const ResidualSystem sys = assemble(p, col, params, true);
  const DenseMatrix g = gram_matrix(sys, 0.0);

  // Output-layer features: phi_i = tanh(z_i) (and 1 for the bias); the
  // interior operator maps them to Laplace phi_i = tanh''(z_i) |W_i|^2.
  const std::size_t w = net.shape.width;
  auto features = [&](std::span<const double> x, bool laplace) {
    std::vector<double> out(w + 1);
    for (std::size_t i = 0; i < w; ++i) {
      double z = net.hidden_bias(i), norm2 = 0.0;
      for (std::size_t a = 0; a < 3; ++a) {
        z += net.hidden_weight(i, a) * x[a];
        norm2 += net.hidden_weight(i, a) * net.hidden_weight(i, a);
      }
      const double t = std::tanh(z);
      out[i] = laplace ? -2.0 * t * (1 - t * t) * norm2 : t;
    }
    out[w] = laplace ? 0.0 : 1.0;
    return out;
  };
  std::vector<std::vector<double>> oracle(w + 1, std::vector<double>(w + 1, 0.0));
  for (const auto& [region, laplace] : {std::pair{Region::Interior, true}, std::pair{Region::Boundary, false}}) {
    const SampleSet& s = col.samples(region);
    for (std::size_t n = 0; n < s.size(); ++n) {
      const auto phi = features(s.point(n), laplace);
      for (std::size_t i = 0; i <= w; ++i)
        for (std::size_t l = 0; l <= w; ++l) oracle[i][l] += s.weight * phi[i] * phi[l];
    }
  }
  const std::size_t off = net.shape.output_weight_offset();
  for (std::size_t i = 0; i <= w; ++i)
    for (std::size_t l = 0; l <= w; ++l)
      EXPECT_NEAR(g(off + i, off + l), oracle[i][l], 1e-12 * std::max(1.0, std::abs(oracle[i][l])));
}

TEST(QuadratureGap, IsFineLossMinusTrainingLoss) {
  const PdeProblem p = poisson();
  const Collocation coarse = draw_collocation(p, {100, 20}, 1, 2);
  const Collocation fine = draw_collocation(p, {1000, 200}, 11, 12);
  const auto params = random_params(p, 6, 3);
  const double l = assemble_loss(p, coarse, params);
  EXPECT_DOUBLE_EQ(estimate_quadrature_gap(p, fine, params, l), assemble_loss(p, fine, params) - l);
}

TEST(Params, FlattenRoundTrip) {
  const PdeProblem p = stokes();
  auto params = random_params(p, 4, 1);
  const Vector theta = flatten_params(params);
  EXPECT_EQ(static_cast<std::size_t>(theta.size()),
            params[0].shape.param_count() + params[1].shape.param_count());
  auto copy = params;
  for (auto& c : copy) std::fill(c.theta.begin(), c.theta.end(), 0.0);
  unflatten_params(theta, copy);
  EXPECT_EQ(copy[0].theta, params[0].theta);
  EXPECT_EQ(copy[1].theta, params[1].theta);
}
