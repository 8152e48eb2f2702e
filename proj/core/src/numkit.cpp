#include "pinn/numkit.hpp"

#include <cmath>
#include <string>

#include "pinn/errors.hpp"

namespace pinn {

Vector solve_spd(const DenseMatrix& a, const Vector& b) {
  const Eigen::Index n = a.rows();
  if (n < 1 || a.cols() != n || b.size() != n) {
    throw DimensionMismatch("solve_spd: expected square n x n matrix and length-n rhs, got " +
                            std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                            " and " + std::to_string(b.size()));
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw NotPositiveDefinite("solve_spd: non-finite entries in system");
  }
  const double scale = a.cwiseAbs().maxCoeff();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw DimensionMismatch("solve_spd: matrix is not symmetric (max |A - A^T| = " +
                            std::to_string(asym) + ")");
  }

  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("solve_spd: non-positive pivot in Cholesky factorization");
  }
  return llt.solve(b);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(seed ^ splitmix64(stream))) {}

std::size_t Rng::below(std::size_t n) {
  // Lemire's multiply-shift; bias is below 2^-64 * n.
  const unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
  return static_cast<std::size_t>(m >> 64);
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

DenseMatrix uniform_points(Rng& rng, std::size_t n, std::size_t d) {
  DenseMatrix pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  double* data = pts.data();
  for (std::size_t i = 0; i < n * d; ++i) data[i] = rng.uniform();
  return pts;
}

}  // namespace pinn
