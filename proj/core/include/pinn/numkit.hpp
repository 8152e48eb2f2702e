#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace pinn {

using Vector = Eigen::VectorXd;

/// Dense row-major matrix of doubles. Point sets are stored one point per row.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Solves A x = b for symmetric positive definite A with an unpivoted
/// Cholesky factorization. Only the lower triangle of A is factored, but
/// A must be symmetric to 1e-10 relative.
///
/// Throws NotPositiveDefinite when a pivot is <= 0 and DimensionMismatch on
/// inconsistent shapes.
Vector solve_spd(const DenseMatrix& a, const Vector& b);

/// Seeded generator: a 64-bit Mersenne twister whose seed is mixed from
/// (seed, stream) with SplitMix64. Both the engine and the double conversion
/// (top 53 bits times 2^-53) are fully specified, so streams are identical
/// on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  /// Standard normal deviate (Box-Muller, no cached second value).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// n points drawn i.i.d. uniform in [0,1)^d, one per row.
DenseMatrix uniform_points(Rng& rng, std::size_t n, std::size_t d);

}  // namespace pinn
