#include "pinn/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "pinn/errors.hpp"

namespace pinn {

std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L2: return "L2";
    case NormKind::H1: return "H1";
    case NormKind::H1Semi: return "H1semi";
  }
  return "unknown";
}

namespace {

struct SquaredNorms {
  double err_l2 = 0.0;
  double err_semi = 0.0;
  double ref_l2 = 0.0;
  double ref_semi = 0.0;
};

SquaredNorms accumulate(const PdeProblem& problem, std::size_t field, const NetworkParams& params,
                        const SampleSet& points, const AssemblyOptions& options) {
  const FieldSpec& spec = problem.fields.at(field);
  const std::size_t off = problem.domain.spatial_offset();
  const std::size_t dim = problem.domain.coord_dim();
  SquaredNorms acc;
  Jet jet, truth(spec.d_out, dim);
  FieldBatch batch;
  batch.evaluate(spec, params, points.points, options);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto x = points.point(i);
    batch.jet(i, x, jet);
    truth.reset(spec.d_out, dim);
    problem.truth.fields.at(field)(x, truth);
    for (std::size_t k = 0; k < spec.d_out; ++k) {
      const double e = jet.value(k) - truth.value(k);
      acc.err_l2 += e * e;
      acc.ref_l2 += truth.value(k) * truth.value(k);
      for (std::size_t a = off; a < dim; ++a) {
        const double g = jet.gradient(k, a) - truth.gradient(k, a);
        acc.err_semi += g * g;
        acc.ref_semi += truth.gradient(k, a) * truth.gradient(k, a);
      }
    }
  }
  acc.err_l2 *= points.weight;
  acc.err_semi *= points.weight;
  acc.ref_l2 *= points.weight;
  acc.ref_semi *= points.weight;
  return acc;
}

ErrorPair make_pair(double err_sq, double ref_sq, const std::string& what) {
  if (std::sqrt(ref_sq) < 1e-14) {
    throw ZeroTruthNorm("relative " + what + " error requested against a vanishing truth norm");
  }
  return {std::sqrt(err_sq), std::sqrt(err_sq) / std::sqrt(ref_sq)};
}

ErrorPair select(const SquaredNorms& n, NormKind kind) {
  switch (kind) {
    case NormKind::L2: return make_pair(n.err_l2, n.ref_l2, "L2");
    case NormKind::H1Semi: return make_pair(n.err_semi, n.ref_semi, "H1-semi");
    case NormKind::H1: return make_pair(n.err_l2 + n.err_semi, n.ref_l2 + n.ref_semi, "H1");
  }
  return {};
}

}  // namespace

ErrorPair mc_error(const PdeProblem& problem, std::size_t field, const NetworkParams& params,
                   const SampleSet& points, NormKind kind, const AssemblyOptions& options) {
  return select(accumulate(problem, field, params, points, options), kind);
}

const FieldErrors& ErrorReport::field(const std::string& name) const {
  for (const auto& f : fields) {
    if (f.field == name) return f;
  }
  throw ConfigError("error report has no field '" + name + "'");
}

ErrorReport evaluate_errors(const PdeProblem& problem, std::span<const NetworkParams> params,
                            const ErrorOptions& options, const AssemblyOptions& assembly) {
  Rng rng(options.seed, 4);
  const SampleSet points = sample_interior(problem.domain, options.n_points, rng);
  ErrorReport report;
  report.n_points = options.n_points;
  report.seed = options.seed;
  for (std::size_t f = 0; f < problem.fields.size(); ++f) {
    const SquaredNorms n = accumulate(problem, f, params[f], points, assembly);
    FieldErrors fe;
    fe.field = problem.fields[f].name;
    fe.l2 = select(n, NormKind::L2);
    fe.h1 = select(n, NormKind::H1);
    fe.h1_semi = select(n, NormKind::H1Semi);
    if (options.fractional_pairs > 0) {
      const FieldSpec& spec = problem.fields[f];
      const std::size_t dim = problem.domain.coord_dim();
      VectorFn err = [&](std::span<const double> x, std::span<double> out) {
        Jet jet, truth(spec.d_out, dim);
        eval_field(spec, params[f], x, jet, nullptr, assembly);
        problem.truth.fields[f](x, truth);
        for (std::size_t k = 0; k < spec.d_out; ++k) out[k] = jet.value(k) - truth.value(k);
      };
      Rng pair_rng(options.seed, 5 + f);
      fe.fractional = gagliardo_seminorm(err, spec.d_out, dim, 0.5, options.fractional_pairs,
                                         options.fractional_cut, pair_rng);
    }
    report.fields.push_back(fe);
  }
  return report;
}

double gagliardo_seminorm(const VectorFn& e, std::size_t out_dim, std::size_t dim, double s,
                          std::size_t n_pairs, double cut, Rng& rng) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("gagliardo_seminorm: order must lie in (0,1)");
  if (!(cut > 0.0)) throw ConfigError("gagliardo_seminorm: cut-off must be positive");
  std::vector<double> x(dim), y(dim), ex(out_dim), ey(out_dim);
  const double power = 0.5 * (static_cast<double>(dim) + 2.0 * s);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    double dist2 = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      x[a] = rng.uniform();
      y[a] = rng.uniform();
      dist2 += (x[a] - y[a]) * (x[a] - y[a]);
    }
    if (dist2 < cut * cut) continue;
    e(x, ex);
    e(y, ey);
    double diff2 = 0.0;
    for (std::size_t k = 0; k < out_dim; ++k) diff2 += (ex[k] - ey[k]) * (ex[k] - ey[k]);
    sum += diff2 / std::pow(dist2, power);
  }
  return sum / static_cast<double>(n_pairs);
}

double a_posteriori_certificate(double loss, double eta_hat) {
  return 2.0 * (loss + std::max(eta_hat, 0.0));
}

namespace {

nlohmann::json pair_json(const ErrorPair& p) {
  return {{"absolute", p.absolute}, {"relative", p.relative}};
}

ErrorPair pair_from(const nlohmann::json& j) {
  return {j.at("absolute").get<double>(), j.at("relative").get<double>()};
}

}  // namespace

nlohmann::json to_json(const ErrorReport& report) {
  nlohmann::json fields = nlohmann::json::array();
  for (const auto& f : report.fields) {
    nlohmann::json jf{{"field", f.field},
                      {"L2", pair_json(f.l2)},
                      {"H1", pair_json(f.h1)},
                      {"H1semi", pair_json(f.h1_semi)}};
    if (f.fractional) jf["H1/2_squared"] = *f.fractional;
    fields.push_back(jf);
  }
  return {{"n_points", report.n_points}, {"seed", report.seed}, {"fields", fields}};
}

ErrorReport error_report_from_json(const nlohmann::json& j) {
  ErrorReport r;
  r.n_points = j.at("n_points").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& jf : j.at("fields")) {
    FieldErrors f;
    f.field = jf.at("field").get<std::string>();
    f.l2 = pair_from(jf.at("L2"));
    f.h1 = pair_from(jf.at("H1"));
    f.h1_semi = pair_from(jf.at("H1semi"));
    if (jf.contains("H1/2_squared")) f.fractional = jf.at("H1/2_squared").get<double>();
    r.fields.push_back(f);
  }
  return r;
}

std::string format_error_table(const ErrorReport& report) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %12s %12s %12s %12s %12s %12s\n", "field", "L2",
                "L2(rel)", "H1", "H1(rel)", "H1semi", "H1semi(rel)");
  os << line;
  for (const auto& f : report.fields) {
    std::snprintf(line, sizeof line, "%-8s %12.3e %12.3e %12.3e %12.3e %12.3e %12.3e\n",
                  f.field.c_str(), f.l2.absolute, f.l2.relative, f.h1.absolute, f.h1.relative,
                  f.h1_semi.absolute, f.h1_semi.relative);
    os << line;
  }
  std::snprintf(line, sizeof line, "(%zu evaluation points, seed %llu)\n", report.n_points,
                static_cast<unsigned long long>(report.seed));
  os << line;
  return os.str();
}

}  // namespace pinn
