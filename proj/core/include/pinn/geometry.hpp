#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "pinn/network.hpp"
#include "pinn/numkit.hpp"

namespace pinn {

enum class DomainKind { Cube, SpaceTime };

/// Unit cube (0,1)^d, optionally extended to the space-time cylinder
/// (0,1) x (0,1)^d. In space-time coordinates, time is coordinate 0.
struct Domain {
  DomainKind kind = DomainKind::Cube;
  std::size_t spatial_dim = 3;

  static Domain cube(std::size_t d) { return {DomainKind::Cube, d}; }
  static Domain spacetime(std::size_t d) { return {DomainKind::SpaceTime, d}; }

  bool is_spacetime() const { return kind == DomainKind::SpaceTime; }
  /// Number of coordinates of a point (d, or d + 1 with time).
  std::size_t coord_dim() const { return spatial_dim + (is_spacetime() ? 1 : 0); }
  /// Index of the first spatial coordinate.
  std::size_t spatial_offset() const { return is_spacetime() ? 1 : 0; }

  /// |Omega| or |I x Omega|.
  double volume() const { return 1.0; }
  /// |dOmega| or |I x dOmega|.
  double boundary_measure() const { return 2.0 * static_cast<double>(spatial_dim); }
  /// |Omega| for the t = 0 slice.
  double initial_measure() const { return 1.0; }
};

enum class SampleTag { Interior, Boundary, Initial, SpaceTimeInterior, SpaceTimeBoundary };

std::string to_string(SampleTag tag);

/// Monte Carlo points with a common quadrature weight measure / n.
struct SampleSet {
  DenseMatrix points;
  double weight = 0.0;
  SampleTag tag = SampleTag::Interior;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points.cols()); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * dim(), dim()};
  }
  /// weight * size, i.e. the measure of the sampled region.
  double measure() const { return weight * static_cast<double>(size()); }
};

SampleSet sample_interior(const Domain& domain, std::size_t n, Rng& rng);

/// Faces are chosen uniformly among the 2d faces of the cube, then a point
/// uniformly on the face. For space-time domains this samples I x dOmega.
SampleSet sample_boundary(const Domain& domain, std::size_t n, Rng& rng);

/// Points on the t = 0 slice. Throws WrongDomainKind for stationary domains.
SampleSet sample_initial(const Domain& domain, std::size_t n, Rng& rng);

/// Splits a boundary budget between the lateral boundary and the initial
/// slice in proportion to their measures. Returns {lateral, initial}.
std::pair<std::size_t, std::size_t> split_parabolic_budget(const Domain& domain, std::size_t n);

/// Jet of B(x) = prod_i x_i (1 - x_i) over the spatial coordinates, which
/// vanishes on the (lateral) boundary.
void bubble_jet(const Domain& domain, std::span<const double> x, Jet& out);

/// Jet of the zero function with d_out components.
void zero_jet(std::size_t d_out, std::size_t d_in, Jet& out);

}  // namespace pinn
