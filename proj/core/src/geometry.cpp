#include "pinn/geometry.hpp"

#include <cmath>

#include "pinn/errors.hpp"

namespace pinn {

std::string to_string(SampleTag tag) {
  switch (tag) {
    case SampleTag::Interior: return "interior";
    case SampleTag::Boundary: return "boundary";
    case SampleTag::Initial: return "initial";
    case SampleTag::SpaceTimeInterior: return "space_time_interior";
    case SampleTag::SpaceTimeBoundary: return "space_time_boundary";
  }
  return "unknown";
}

SampleSet sample_interior(const Domain& domain, std::size_t n, Rng& rng) {
  SampleSet set;
  set.points = uniform_points(rng, n, domain.coord_dim());
  set.weight = domain.volume() / static_cast<double>(n);
  set.tag = domain.is_spacetime() ? SampleTag::SpaceTimeInterior : SampleTag::Interior;
  return set;
}

SampleSet sample_boundary(const Domain& domain, std::size_t n, Rng& rng) {
  const std::size_t dim = domain.coord_dim();
  const std::size_t off = domain.spatial_offset();
  SampleSet set;
  set.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t face = rng.below(2 * domain.spatial_dim);
    const std::size_t axis = off + face / 2;
    for (std::size_t a = 0; a < dim; ++a) {
      const double u = rng.uniform();
      set.points(i, a) = a == axis ? static_cast<double>(face % 2) : u;
    }
  }
  set.weight = domain.boundary_measure() / static_cast<double>(n);
  set.tag = domain.is_spacetime() ? SampleTag::SpaceTimeBoundary : SampleTag::Boundary;
  return set;
}

SampleSet sample_initial(const Domain& domain, std::size_t n, Rng& rng) {
  if (!domain.is_spacetime()) {
    throw WrongDomainKind("sample_initial requires a space-time domain");
  }
  SampleSet set;
  set.points = uniform_points(rng, n, domain.coord_dim());
  set.points.col(0).setZero();
  set.weight = domain.initial_measure() / static_cast<double>(n);
  set.tag = SampleTag::Initial;
  return set;
}

std::pair<std::size_t, std::size_t> split_parabolic_budget(const Domain& domain, std::size_t n) {
  const double lateral = domain.boundary_measure();
  const double initial = domain.initial_measure();
  auto n_lat = static_cast<std::size_t>(std::lround(static_cast<double>(n) * lateral /
                                                    (lateral + initial)));
  n_lat = std::min(std::max<std::size_t>(n_lat, 1), n > 1 ? n - 1 : 1);
  const std::size_t n_init = n > n_lat ? n - n_lat : 1;
  return {n_lat, n_init};
}

void bubble_jet(const Domain& domain, std::span<const double> x, Jet& out) {
  const std::size_t dim = domain.coord_dim();
  const std::size_t off = domain.spatial_offset();
  out.reset(1, dim);
  // Factors q(s) = s(1-s), q' = 1 - 2s, q'' = -2 on the spatial axes.
  std::vector<double> q(dim, 1.0), dq(dim, 0.0), ddq(dim, 0.0);
  for (std::size_t a = off; a < dim; ++a) {
    q[a] = x[a] * (1.0 - x[a]);
    dq[a] = 1.0 - 2.0 * x[a];
    ddq[a] = -2.0;
  }
  auto prod_except = [&](std::size_t skip1, std::size_t skip2) {
    double p = 1.0;
    for (std::size_t a = off; a < dim; ++a) {
      if (a != skip1 && a != skip2) p *= q[a];
    }
    return p;
  };
  out.value(0) = prod_except(dim, dim);
  for (std::size_t a = off; a < dim; ++a) {
    out.gradient(0, a) = dq[a] * prod_except(a, dim);
    for (std::size_t b = off; b < dim; ++b) {
      out.hessian(0, a, b) =
          a == b ? ddq[a] * prod_except(a, dim) : dq[a] * dq[b] * prod_except(a, b);
    }
  }
}

void zero_jet(std::size_t d_out, std::size_t d_in, Jet& out) { out.reset(d_out, d_in); }

}  // namespace pinn
