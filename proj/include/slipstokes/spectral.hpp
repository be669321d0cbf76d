#pragma once

#include "slipstokes/solve.hpp"

namespace slipstokes {

/// Generalized eigenpairs (K + B) phi = mu M phi on the discretely
/// divergence-free constrained subspace, M-orthonormal, mu ascending.
struct EigenDecomposition {
  VecX<double> mu;
  MatX<double> phi;  // n_u x k
  double max_residual = 0;
};

struct EigensolveOptions {
  double tol = 1e-9;       // divergence-free-projected residual per pair
  int max_iterations = 400;
  std::uint64_t seed = 0x5eed5eed*1ull;
};

EigenDecomposition eigensolve(const OperatorSet& ops, int k,
                              const EigensolveOptions& opt = {});

/// A^beta u by eigenexpansion; errors with "span-deficiency" when u leaks
/// outside the computed span by more than span_tol (relative, M-norm).
VecX<double> fractional_apply(const OperatorSet& ops, const EigenDecomposition& eig,
                              double beta, const VecX<double>& u,
                              double span_tol = 1e-6);

struct HalfPowerReport {
  double parseval_error = 0;  // max rel. mismatch of ||A^1/2 u||^2 vs u^T(K+B)u
  double c1 = 0, c2 = 0;      // extreme ratios of (||A^1/2 u||^2 + ||u||^2) / ||u||_H1^2
};
HalfPowerReport halfpower_equivalence(const OperatorSet& ops,
                                      const EigenDecomposition& eig,
                                      int n_samples = 20, std::uint64_t seed = 7);

/// max over span directions of ||A^{is} u|| / ||u||; 1 at p = 2.
double imaginary_power_norm(const OperatorSet& ops, const EigenDecomposition& eig,
                            double s, int n_samples = 20, std::uint64_t seed = 11);

struct EigAlphaRow {
  double alpha = 0;
  VecX<double> mu;
};
struct EigAlphaTable {
  std::vector<EigAlphaRow> rows;   // ascending alpha
  VecX<double> mu_dirichlet;
  /// fitted slope of log(mu_D - mu(alpha)) vs log alpha over the top decade,
  /// per index
  std::vector<double> gap_slopes;
};
EigAlphaTable eig_alpha_table(const DiscreteModel& model,
                              const std::vector<double>& alpha_grid, int k,
                              const EigensolveOptions& opt = {});

/// Extreme generalized eigenvalues of (K + M) against the H1 Gram (M + W);
/// the Korn-equivalence interval [c, C].
std::pair<double, double> korn_interval(const OperatorSet& ops, int iters = 200);

}  // namespace slipstokes
