#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "pinn/errors.hpp"
#include "pinn/optimizer.hpp"

using namespace pinn;

namespace {

ResidualSystem linear_system(const DenseMatrix& j, const Vector& r) {
  ResidualSystem s;
  s.J = j;
  s.r = r;
  s.has_jacobian = true;
  return s;
}

TrainConfig quick_config(std::size_t iterations) {
  TrainConfig c;
  c.iterations = iterations;
  c.widths = {8};
  c.counts = {200, 60};
  c.eval_points = 200;
  c.gap_factor = 2;
  c.checkpoint_stride = 5;
  return c;
}

}  // namespace

TEST(LineSearch, GridExamples) {
  EXPECT_EQ(line_search([](double a) { return (1 - a) * (1 - a); }).alpha, 1.0);
  EXPECT_EQ(line_search([](double) { return 4.0; }).alpha, 1.0);
  EXPECT_EQ(line_search([](double a) { return (0.3 - a) * (0.3 - a); }).alpha, 0.25);
  // Only alpha = 0 keeps the loss finite.
  const auto r = line_search([](double a) {
    return a > 0 ? std::numeric_limits<double>::quiet_NaN() : 2.0;
  });
  EXPECT_EQ(r.alpha, 0.0);
  EXPECT_EQ(r.loss, 2.0);
  // Every non-zero step increases the loss.
  EXPECT_EQ(line_search([](double a) { return 1.0 + a; }).alpha, 0.0);
}

TEST(LineSearch, DepthLimitsTheGrid) {
  const auto r = line_search([](double a) { return std::abs(a - 0.1); }, 3);
  EXPECT_EQ(r.alpha, 0.125);
}

TEST(LmDirection, IdentitySystem) {
  const ResidualSystem s = linear_system(DenseMatrix::Identity(2, 2), Vector{{1.0, 0.0}});
  EXPECT_EQ(lm_direction(s, 0.0), (Vector{{1.0, 0.0}}));
  EXPECT_TRUE(lm_direction(s, 1.0).isApprox(Vector{{0.5, 0.0}}, 1e-15));
}

TEST(LmDirection, ReachesLeastSquaresOptimum) {
  Rng rng(3, 0);
  const DenseMatrix a = uniform_points(rng, 30, 6).array() - 0.5;
  Vector y(30), theta(6);
  for (auto& v : y) v = rng.normal();
  for (auto& v : theta) v = rng.normal();
  const ResidualSystem s = linear_system(a, a * theta - y);
  const Vector next = theta - lm_direction(s, 0.0);
  const Vector oracle = a.householderQr().solve(y);
  EXPECT_LE((next - oracle).norm(), 1e-8 * oracle.norm());
  EXPECT_LE((a.transpose() * (a * next - y)).norm(), 1e-8);
}

TEST(Train, GaussNewtonExactnessWithFrozenHiddenLayer) {
  const PdeProblem p = poisson();
  TrainConfig c = quick_config(1);
  c.freeze_hidden = true;
  c.fixed_mu = 0.0;
  const std::vector<NetworkParams> init = initial_params(p, c);
  const Collocation col = draw_collocation(p, c.counts, c.seeds.interior, c.seeds.boundary);
  const ResidualSystem sys = assemble(p, col, init, true);

  // Residual is affine in the output layer: r(v) = r0 + J_out (v - v0).
  const std::size_t off = init[0].shape.output_weight_offset();
  const std::size_t n_out = init[0].shape.param_count() - off;
  const DenseMatrix j_out = sys.J.rightCols(n_out);
  const Vector step = j_out.householderQr().solve(sys.r);
  const double optimum = 0.5 * (sys.r - j_out * step).squaredNorm();

  const TrainReport rep = train(p, c);
  ASSERT_EQ(rep.alpha.size(), 1u);
  EXPECT_EQ(rep.alpha[0], 1.0);
  EXPECT_LE(std::abs(rep.loss.back() - optimum), 1e-8 * optimum);
  for (std::size_t j = 0; j < off; ++j) EXPECT_EQ(rep.params[0].theta[j], init[0].theta[j]);
}

TEST(Train, TruthIsAFixedPoint) {
  PdeProblem p = poisson();
  const ManufacturedSolution truth = p.truth;
  p.fields[0].hard = HardBoundary{
      [truth](std::span<const double> x, Jet& out) { out = truth.field_jet(0, 1, x); },
      [](std::span<const double> x, Jet& out) { bubble_jet(Domain::cube(3), x, out); }};
  TrainConfig c = quick_config(5);
  c.initial = {NetworkParams({3, 1, 8})};
  const TrainReport rep = train(p, c);
  EXPECT_TRUE(rep.stop == StopReason::LossFloor || rep.stop == StopReason::ExactSolution);
  EXPECT_LE(rep.loss.back(), 1e-20);
  EXPECT_EQ(rep.params[0].theta, c.initial[0].theta);
  EXPECT_NEAR(rep.final_checkpoint().errors.field("u").l2.absolute, 0.0, 1e-15);
}

TEST(Train, MonotoneAndDeterministic) {
  const PdeProblem p = stokes();
  TrainConfig c = quick_config(15);
  c.widths = {6, 6};
  const TrainReport a = train(p, c);
  const TrainReport b = train(p, c);
  ASSERT_EQ(a.loss.size(), 16u);
  for (std::size_t k = 1; k < a.loss.size(); ++k) EXPECT_LE(a.loss[k], a.loss[k - 1]);
  std::ostringstream ca, cb;
  write_loss_csv(a, ca);
  write_loss_csv(b, cb);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(to_json(a).at("checkpoints").dump(), to_json(b).at("checkpoints").dump());
  for (std::size_t k = 0; k < a.mu.size(); ++k) EXPECT_EQ(a.mu[k], std::min(a.loss[k], 1e-5));
}

TEST(Train, CheckpointsAndCsvLayout) {
  const TrainReport rep = train(poisson(), quick_config(12));
  std::vector<std::size_t> its;
  for (const auto& c : rep.checkpoints) its.push_back(c.iteration);
  EXPECT_EQ(its, (std::vector<std::size_t>{0, 5, 10, 12}));
  for (const auto& c : rep.checkpoints) {
    EXPECT_EQ(c.certificate, a_posteriori_certificate(c.loss, c.eta_hat));
  }
  std::ostringstream csv;
  write_loss_csv(rep, csv);
  std::istringstream in(csv.str());
  std::string line, last;
  std::getline(in, line);
  EXPECT_EQ(line, "iteration,loss,alpha,mu");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    last = line;
    ++rows;
  }
  EXPECT_EQ(rows, 13u);
  EXPECT_EQ(last.substr(0, 3), "12,");
  EXPECT_EQ(last.substr(last.size() - 2), ",,");
}

TEST(Train, RejectsOverlappingSeedsAndBadWidths) {
  TrainConfig c = quick_config(1);
  c.seeds.eval = c.seeds.interior;
  EXPECT_THROW(train(poisson(), c), ConfigError);
  TrainConfig w = quick_config(1);
  w.widths = {8, 8};
  EXPECT_THROW(train(poisson(), w), ConfigError);
}

TEST(Train, PoissonDefaultsReachTableAccuracy) {
  TrainConfig c;
  c.seeds = Seeds::from_base(0);
  const TrainReport rep = train(poisson(), c);
  EXPECT_EQ(rep.iterations_run, 500u);
  EXPECT_LT(rep.final_checkpoint().errors.field("u").l2.absolute, 1e-3);
}
