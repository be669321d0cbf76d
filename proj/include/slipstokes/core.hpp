#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace slipstokes {

using Real = double;
using Complex = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using SpMat = Eigen::SparseMatrix<Scalar>;
using Triplet = Eigen::Triplet<double>;

/// Error with a stable machine-readable code ("infeasible-resolution",
/// "negative-alpha", ...) in front of the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

inline Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

/// Symmetrize exactly: (A + A^T)/2 entrywise, so that ||A - A^T||_max == 0.
SpMat<double> symmetrized(const SpMat<double>& a);

/// Deterministic triplet accumulation: duplicates are summed in insertion
/// order after a stable sort by (row, col), independent of any upstream
/// scheduling.
SpMat<double> from_triplets_stable(int rows, int cols, std::vector<Triplet>& trips);

/// xoshiro-free tiny deterministic generator (splitmix64) so that sampled
/// values are reproducible across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  /// uniform in (0, 1)
  double next_double() { return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
  /// uniform in (-1, 1)
  double next_symmetric() { return 2.0 * next_double() - 1.0; }

 private:
  std::uint64_t state_;
};

template <typename Scalar>
VecX<Scalar> random_vector(Rng& rng, int n) {
  VecX<Scalar> v(n);
  for (int i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<Scalar, Complex>)
      v[i] = Complex(rng.next_symmetric(), rng.next_symmetric());
    else
      v[i] = rng.next_symmetric();
  }
  return v;
}

/// Least-squares fit of y = slope*x + intercept; returns {slope, intercept, rms residual}.
struct LineFit {
  double slope = 0, intercept = 0, residual = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace slipstokes
