#include "pinn/cli/check.hpp"

#include <algorithm>
#include <cmath>

#include "pinn/geometry.hpp"
#include "pinn/numkit.hpp"

namespace pinn::cli {

bool CheckReport::ok() const {
  return std::all_of(entries.begin(), entries.end(), [&](const Deviation& d) {
    return std::isfinite(d.worst) && d.worst <= tolerance;
  });
}

const Deviation* CheckReport::worst() const {
  const Deviation* w = nullptr;
  for (const auto& d : entries) {
    // NaN counts as worst.
    if (!w || !(d.worst <= w->worst)) w = &d;
  }
  return w;
}

std::vector<std::pair<std::string, PdeProblem>> problem_variants() {
  std::vector<std::pair<std::string, PdeProblem>> out;
  for (const auto& name : problem_names()) {
    PdeProblem p = make_problem(name);
    const bool has_hard = std::any_of(p.fields.begin(), p.fields.end(),
                                      [](const FieldSpec& f) { return f.homogeneous_trace; });
    out.emplace_back(name, p);
    if (has_hard) out.emplace_back(name + "+hard", with_hard_boundary(p));
    if (name == "stokes" || name == "transient-stokes") {
      ProblemOptions opts;
      opts.average_penalty = true;
      out.emplace_back(name + "+mean", make_problem(name, opts));
    }
  }
  return out;
}

namespace {

double relative(double diff, double scale) {
  if (diff == 0.0) return 0.0;
  return diff / std::max(scale, 1e-300);
}

}  // namespace

CheckReport check_gradients(const GradientCheckOptions& opts) {
  CheckReport report;
  report.tolerance = opts.tolerance;
  for (const auto& [label, problem] : problem_variants()) {
    std::vector<Deviation> blocks(problem.blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b] = {label, problem.blocks[b].name, 0.0, 0};
    }
    Deviation grad{label, "grad L", 0.0, 0};

    for (std::size_t c = 0; c < opts.configs; ++c) {
      Rng rng(opts.seed, c);
      std::vector<NetworkParams> params;
      for (const auto& f : problem.fields) {
        const NetworkShape shape{problem.domain.coord_dim(), f.d_out, 2 + rng.below(7)};
        params.push_back(init_params(shape, rng));
      }
      // Boundary budget >= 7 keeps the initial slice non-empty on space-time domains.
      const SampleCounts counts{3 + rng.below(6), 7 + rng.below(6)};
      const std::uint64_t s_int = rng.next_u64();
      const std::uint64_t s_bnd = rng.next_u64();
      const Collocation col = draw_collocation(problem, counts, s_int, s_bnd);

      const ResidualSystem sys = assemble(problem, col, params, true, opts.assembly);
      const Vector g = loss_gradient(sys);
      const Vector theta = flatten_params(params);
      DenseMatrix jfd(sys.r.size(), theta.size());
      Vector gfd(theta.size());
      std::vector<NetworkParams> trial = params;
      for (Eigen::Index j = 0; j < theta.size(); ++j) {
        const double h = opts.step * std::max(1.0, std::abs(theta[j]));
        Vector t = theta;
        t[j] = theta[j] + h;
        unflatten_params(t, trial);
        const ResidualSystem plus = assemble(problem, col, trial, false, opts.assembly);
        t[j] = theta[j] - h;
        unflatten_params(t, trial);
        const ResidualSystem minus = assemble(problem, col, trial, false, opts.assembly);
        jfd.col(j) = (plus.r - minus.r) / (2.0 * h);
        gfd[j] = (plus.loss() - minus.loss()) / (2.0 * h);
      }

      for (std::size_t b = 0; b < sys.blocks.size(); ++b) {
        const auto& range = sys.blocks[b];
        const auto rows = Eigen::seqN(range.row_begin, range.row_count);
        const double dev = relative((sys.J(rows, Eigen::all) - jfd(rows, Eigen::all)).norm(),
                                    sys.J(rows, Eigen::all).norm());
        if (!(dev <= blocks[b].worst)) blocks[b].worst = dev;
        ++blocks[b].samples;
      }
      const double gdev = relative((g - gfd).norm(), g.norm());
      if (!(gdev <= grad.worst)) grad.worst = gdev;
      ++grad.samples;
    }
    for (auto& d : blocks) report.entries.push_back(std::move(d));
    report.entries.push_back(std::move(grad));
  }
  return report;
}

CheckReport check_manufactured(std::size_t points, std::uint64_t seed, double tolerance) {
  CheckReport report;
  report.tolerance = tolerance;
  for (const auto& [label, problem] : problem_variants()) {
    for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
      const ResidualBlock& block = problem.blocks[b];
      // eta * f penalizes the truth by design; it is not a consistency residual.
      if (block.regularization) continue;
      Rng rng(seed, b);
      SampleSet set;
      switch (block.region) {
        case Region::Interior: set = sample_interior(problem.domain, points, rng); break;
        case Region::Boundary: set = sample_boundary(problem.domain, points, rng); break;
        case Region::Initial: set = sample_initial(problem.domain, points, rng); break;
      }
      double worst = 0.0;
      for (std::size_t i = 0; i < set.size(); ++i) {
        for (double v : truth_residual(problem, b, set.point(i))) {
          if (!(std::abs(v) <= worst)) worst = std::abs(v);
        }
      }
      report.entries.push_back({label, block.name, worst, set.size()});
    }
  }
  return report;
}

}  // namespace pinn::cli
