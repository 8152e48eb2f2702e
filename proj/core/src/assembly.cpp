#include "pinn/assembly.hpp"

#include <cmath>
#include <string>

#include "pinn/errors.hpp"

namespace pinn {

Collocation::Collocation(const PdeProblem& problem,
                         std::array<std::optional<SampleSet>, 3> sets)
    : sets_(std::move(sets)) {
  targets_.reserve(problem.blocks.size());
  std::vector<double> buf;
  for (const ResidualBlock& b : problem.blocks) {
    if (!has(b.region)) {
      throw DimensionMismatch("collocation has no samples for region " + to_string(b.region) +
                              " required by block " + b.name);
    }
    const SampleSet& s = samples(b.region);
    if (s.dim() != problem.domain.coord_dim()) {
      throw DimensionMismatch("samples for block " + b.name + " have wrong dimension");
    }
    DenseMatrix t(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(b.dim()));
    buf.assign(b.dim(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      b.target(s.point(i), buf);
      for (std::size_t k = 0; k < b.dim(); ++k) t(i, k) = buf[k];
    }
    targets_.push_back(std::move(t));
  }
}

const SampleSet& Collocation::samples(Region region) const {
  const auto& s = sets_[index(region)];
  if (!s) throw DimensionMismatch("collocation has no samples for region " + to_string(region));
  return *s;
}

std::size_t Collocation::total_points() const {
  std::size_t n = 0;
  for (const auto& s : sets_) n += s ? s->size() : 0;
  return n;
}

Collocation draw_collocation(const PdeProblem& problem, const SampleCounts& counts,
                             std::uint64_t interior_seed, std::uint64_t boundary_seed) {
  const Domain& dom = problem.domain;
  std::array<std::optional<SampleSet>, 3> sets;
  Rng interior_rng(interior_seed, 1);
  sets[0] = sample_interior(dom, counts.interior, interior_rng);
  if (dom.is_spacetime()) {
    const auto [n_lat, n_init] = split_parabolic_budget(dom, counts.boundary);
    Rng lateral_rng(boundary_seed, 2);
    Rng initial_rng(boundary_seed, 3);
    sets[1] = sample_boundary(dom, n_lat, lateral_rng);
    sets[2] = sample_initial(dom, n_init, initial_rng);
  } else {
    Rng boundary_rng(boundary_seed, 2);
    sets[1] = sample_boundary(dom, counts.boundary, boundary_rng);
  }
  return Collocation(problem, std::move(sets));
}

void eval_field(const FieldSpec& spec, const NetworkParams& params, std::span<const double> x,
                Jet& jet, ParamJet* pjet, const AssemblyOptions& options) {
  if (params.shape.d_out != spec.d_out) {
    throw DimensionMismatch("field " + spec.name + " expects " + std::to_string(spec.d_out) +
                            " outputs, network has " + std::to_string(params.shape.d_out));
  }
  if (!spec.hard) {
    if (pjet) {
      eval_param_jet(params, x, jet, *pjet, options.activation);
    } else {
      eval_jet(params, x, jet, options.activation);
    }
    return;
  }
  thread_local Jet net, lift, bubble;
  thread_local ParamJet net_p;
  if (pjet) {
    eval_param_jet(params, x, net, net_p, options.activation);
  } else {
    eval_jet(params, x, net, options.activation);
  }
  lift.reset(spec.d_out, x.size());
  bubble.reset(1, x.size());
  spec.hard->lift(x, lift);
  spec.hard->bubble(x, bubble);
  wrap_hard_boundary(net, pjet ? &net_p : nullptr, lift, bubble, jet, pjet);
}

void FieldBatch::evaluate(const FieldSpec& spec, const NetworkParams& params,
                          const DenseMatrix& points, const AssemblyOptions& options) {
  if (params.shape.d_out != spec.d_out) {
    throw DimensionMismatch("field " + spec.name + " expects " + std::to_string(spec.d_out) +
                            " outputs, network has " + std::to_string(params.shape.d_out));
  }
  spec_ = &spec;
  eval_jet_batch(params, points, batch_, options.activation);
}

void FieldBatch::jet(std::size_t i, std::span<const double> x, Jet& out) const {
  if (!spec_->hard) {
    batch_.extract(i, out);
    return;
  }
  thread_local Jet net, lift, bubble;
  batch_.extract(i, net);
  lift.reset(spec_->d_out, x.size());
  bubble.reset(1, x.size());
  spec_->hard->lift(x, lift);
  spec_->hard->bubble(x, bubble);
  wrap_hard_boundary(net, nullptr, lift, bubble, out, nullptr);
}

std::vector<double> ResidualSystem::block_losses() const {
  std::vector<double> out;
  for (const BlockRange& b : blocks) {
    out.push_back(0.5 * r.segment(static_cast<Eigen::Index>(b.row_begin),
                                  static_cast<Eigen::Index>(b.row_count))
                            .squaredNorm());
  }
  return out;
}

namespace {

void check_params(const PdeProblem& problem, std::span<const NetworkParams> params) {
  if (params.size() != problem.fields.size()) {
    throw DimensionMismatch("problem " + problem.name + " has " +
                            std::to_string(problem.fields.size()) + " fields, got " +
                            std::to_string(params.size()) + " parameter sets");
  }
  for (std::size_t f = 0; f < params.size(); ++f) {
    const auto& s = params[f].shape;
    if (s.d_in != problem.domain.coord_dim() || s.d_out != problem.fields[f].d_out ||
        params[f].theta.size() != s.param_count()) {
      throw DimensionMismatch("parameters of field " + problem.fields[f].name +
                              " do not match the problem");
    }
  }
}

}  // namespace

ResidualSystem assemble(const PdeProblem& problem, const Collocation& collocation,
                        std::span<const NetworkParams> params, bool need_jacobian,
                        const AssemblyOptions& options) {
  check_params(problem, params);
  ResidualSystem sys;
  sys.has_jacobian = need_jacobian;

  std::size_t cols = 0;
  for (std::size_t f = 0; f < params.size(); ++f) {
    sys.fields.push_back({problem.fields[f].name, cols, params[f].theta.size()});
    cols += params[f].theta.size();
  }
  std::size_t rows = 0;
  for (const ResidualBlock& b : problem.blocks) {
    const std::size_t n = b.reduction == Reduction::Mean
                              ? b.dim()
                              : collocation.samples(b.region).size() * b.dim();
    sys.blocks.push_back({b.name, rows, n});
    rows += n;
  }
  sys.r = Vector::Zero(static_cast<Eigen::Index>(rows));
  if (need_jacobian) sys.J = DenseMatrix::Zero(static_cast<Eigen::Index>(rows),
                                               static_cast<Eigen::Index>(cols));

  const std::size_t n_fields = problem.fields.size();
  std::vector<Jet> jets(n_fields);
  std::vector<ParamJet> pjets(n_fields);
  std::vector<FieldBatch> batches(n_fields);
  Jet scratch;
  std::vector<double> raw;

  for (Region region : {Region::Interior, Region::Boundary, Region::Initial}) {
    std::vector<std::size_t> block_ids;
    std::vector<bool> needed(n_fields, false);
    for (std::size_t bi = 0; bi < problem.blocks.size(); ++bi) {
      if (problem.blocks[bi].region != region) continue;
      block_ids.push_back(bi);
      for (std::size_t f : problem.blocks[bi].fields_used()) needed[f] = true;
    }
    if (block_ids.empty()) continue;

    const SampleSet& samples = collocation.samples(region);
    const std::size_t n_pts = samples.size();
    const double sqrt_w = std::sqrt(samples.weight);
    const double inv_n = 1.0 / static_cast<double>(n_pts);
    const double sqrt_measure = std::sqrt(samples.measure());
    for (std::size_t f = 0; f < n_fields; ++f) {
      if (needed[f]) batches[f].evaluate(problem.fields[f], params[f], samples.points, options);
    }

    for (std::size_t i = 0; i < n_pts; ++i) {
      const auto x = samples.point(i);
      for (std::size_t f = 0; f < n_fields; ++f) {
        if (!needed[f]) continue;
        batches[f].jet(i, x, jets[f]);
        if (need_jacobian) eval_field(problem.fields[f], params[f], x, scratch, &pjets[f], options);
      }
      for (std::size_t bi : block_ids) {
        const ResidualBlock& block = problem.blocks[bi];
        const DenseMatrix& tgt = collocation.targets(bi);
        const bool mean = block.reduction == Reduction::Mean;
        const double scale = mean ? sqrt_measure * inv_n : sqrt_w;
        raw.assign(block.dim(), 0.0);
        block.apply(jets, raw);
        for (std::size_t k = 0; k < block.dim(); ++k) {
          const std::size_t row =
              sys.blocks[bi].row_begin + (mean ? k : i * block.dim() + k);
          sys.r[static_cast<Eigen::Index>(row)] +=
              scale * (raw[k] - tgt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
          if (!need_jacobian) continue;
          double* jrow = sys.J.row(static_cast<Eigen::Index>(row)).data();
          for (const Term& t : block.rows[k]) {
            const auto d = t.ref.read(std::span<const ParamJet>(pjets));
            double* dst = jrow + sys.fields[t.ref.field].col_begin;
            const double c = scale * t.coeff;
            for (std::size_t j = 0; j < d.size(); ++j) dst[j] += c * d[j];
          }
        }
      }
    }
  }

  if (!sys.r.allFinite() || (need_jacobian && !sys.J.allFinite())) {
    throw NonFiniteResidual("non-finite residual while assembling " + problem.name);
  }
  return sys;
}

double assemble_loss(const PdeProblem& problem, const Collocation& collocation,
                     std::span<const NetworkParams> params, const AssemblyOptions& options) {
  return assemble(problem, collocation, params, false, options).loss();
}

Vector loss_gradient(const ResidualSystem& sys) {
  if (!sys.has_jacobian) throw DimensionMismatch("loss_gradient requires a Jacobian");
  return sys.J.transpose() * sys.r;
}

DenseMatrix gram_matrix(const ResidualSystem& sys, double mu) {
  if (!sys.has_jacobian) throw DimensionMismatch("gram_matrix requires a Jacobian");
  const Eigen::Index p = sys.J.cols();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p, p);
  g.selfadjointView<Eigen::Lower>().rankUpdate(sys.J.transpose());
  DenseMatrix out = g.selfadjointView<Eigen::Lower>();
  out.diagonal().array() += mu;
  return out;
}

double estimate_quadrature_gap(const PdeProblem& problem, const Collocation& fine,
                               std::span<const NetworkParams> params, double training_loss,
                               const AssemblyOptions& options) {
  return assemble_loss(problem, fine, params, options) - training_loss;
}

Vector flatten_params(std::span<const NetworkParams> params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.theta.size();
  Vector theta(static_cast<Eigen::Index>(n));
  std::size_t off = 0;
  for (const auto& p : params) {
    for (double v : p.theta) theta[static_cast<Eigen::Index>(off++)] = v;
  }
  return theta;
}

void unflatten_params(const Vector& theta, std::span<NetworkParams> params) {
  std::size_t off = 0;
  for (auto& p : params) {
    for (double& v : p.theta) {
      if (off >= static_cast<std::size_t>(theta.size())) {
        throw DimensionMismatch("unflatten_params: vector too short");
      }
      v = theta[static_cast<Eigen::Index>(off++)];
    }
  }
  if (off != static_cast<std::size_t>(theta.size())) {
    throw DimensionMismatch("unflatten_params: vector too long");
  }
}

}  // namespace pinn
