#include "slipstokes/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <cmath>

namespace slipstokes {

namespace {

/// M-orthonormalize the columns of X in place (dense Cholesky of the Gram).
void m_orthonormalize(const SpMat<double>& M, MatX<double>& X) {
  MatX<double> G = X.transpose() * (M * X);
  Eigen::LLT<MatX<double>> llt(G);
  if (llt.info() != Eigen::Success) {
    // re-randomization is the caller's job; fall back to SVD-based cleanup
    Eigen::SelfAdjointEigenSolver<MatX<double>> es(G);
    MatX<double> isq = es.eigenvectors() *
                       es.eigenvalues().cwiseMax(1e-30).cwiseSqrt().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose();
    X = X * isq;
    return;
  }
  X = llt.matrixU().template solve<Eigen::OnTheRight>(X);
}

}  // namespace

EigenDecomposition eigensolve(const OperatorSet& ops, int k,
                              const EigensolveOptions& opt) {
  if (k > 50) throw Error("nonconvergence", "eigensolve supports k <= 50");
  const int nu = ops.n_u();
  const int m = std::min(nu, std::max(2 * k, k + 8));

  // shift-invert with shift -1: solve (K + B + M) y + D^T q = M x, D y = 0;
  // eigenvalues map to 1/(mu + 1) on the divergence-free subspace
  SpMat<double> A = ops.K + ops.B + ops.M;
  SaddleSolver<double> inv(A, ops.D, ops.pressure_mean);
  SpMat<double> KB = ops.K + ops.B;
  // Leray projector of M^{-1} r: mass saddle solve with rhs r
  SaddleSolver<double> proj(ops.M, ops.D, ops.pressure_mean);

  Rng rng(opt.seed);
  MatX<double> X(nu, m);
  for (int j = 0; j < m; ++j)
    X.col(j) = proj.solve_velocity_rhs(VecX<double>(ops.M * random_vector<double>(rng, nu))).u;

  EigenDecomposition out;
  VecX<double> theta(m);
  MatX<double> Y(nu, m);
  double maxres = 1e300;
  for (int it = 0; it < opt.max_iterations; ++it) {
    for (int j = 0; j < m; ++j)
      Y.col(j) = inv.solve_velocity_rhs(VecX<double>(ops.M * X.col(j))).u;
    m_orthonormalize(ops.M, Y);
    MatX<double> H = Y.transpose() * (KB * Y);
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatX<double>> es(H);
    theta = es.eigenvalues();
    X = Y * es.eigenvectors();
    // residuals of the first k pairs, measured after Leray projection
    maxres = 0;
    for (int j = 0; j < k; ++j) {
      VecX<double> r = KB * X.col(j) - theta[j] * (ops.M * X.col(j));
      VecX<double> pz = proj.solve_velocity_rhs(r).u;
      maxres = std::max(maxres, ops.norm_L2(pz));
    }
    if (maxres <= opt.tol) break;
  }
  if (maxres > opt.tol) {
    // identify the worst index for the diagnostic
    int bad = 0;
    double worst = 0;
    for (int j = 0; j < k; ++j) {
      VecX<double> r = KB * X.col(j) - theta[j] * (ops.M * X.col(j));
      double rn = r.norm();
      if (rn > worst) {
        worst = rn;
        bad = j;
      }
    }
    throw Error("nonconvergence",
                "eigensolve failed at index " + std::to_string(bad) +
                    " (projected residual " + std::to_string(maxres) + ")");
  }
  out.mu = theta.head(k);
  out.phi = X.leftCols(k);
  out.max_residual = maxres;
  return out;
}

VecX<double> fractional_apply(const OperatorSet& ops, const EigenDecomposition& eig,
                              double beta, const VecX<double>& u, double span_tol) {
  VecX<double> c = eig.phi.transpose() * (ops.M * u);
  VecX<double> recon = eig.phi * c;
  double leak = ops.norm_L2(VecX<double>(u - recon));
  double scale = ops.norm_L2(u);
  if (leak > span_tol * std::max(scale, 1e-300))
    throw Error("span-deficiency",
                "input leaks outside the eigenspan by " + std::to_string(leak / scale));
  VecX<double> cb(c.size());
  for (int i = 0; i < c.size(); ++i) cb[i] = std::pow(eig.mu[i], beta) * c[i];
  return eig.phi * cb;
}

HalfPowerReport halfpower_equivalence(const OperatorSet& ops,
                                      const EigenDecomposition& eig, int n_samples,
                                      std::uint64_t seed) {
  HalfPowerReport rep;
  const int k = int(eig.mu.size());
  Rng rng(seed);
  SpMat<double> KB = ops.K + ops.B;
  for (int s = 0; s < n_samples; ++s) {
    VecX<double> c = random_vector<double>(rng, k);
    VecX<double> u = eig.phi * c;
    double lhs = 0;
    for (int i = 0; i < k; ++i) lhs += eig.mu[i] * c[i] * c[i];
    double rhs = u.dot(KB * u);
    rep.parseval_error =
        std::max(rep.parseval_error, std::abs(lhs - rhs) / std::max(rhs, 1e-300));
  }
  // exact extreme ratios over the whole span: generalized eigenvalues of
  // (diag(mu) + I) c . c  against  c^T Phi^T (M + W) Phi c
  MatX<double> G = eig.phi.transpose() * ((ops.M + ops.W) * eig.phi);
  G = 0.5 * (G + G.transpose()).eval();
  MatX<double> Nmat = (eig.mu.array() + 1.0).matrix().asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatX<double>> ges(Nmat, G);
  rep.c1 = ges.eigenvalues().minCoeff();
  rep.c2 = ges.eigenvalues().maxCoeff();
  return rep;
}

double imaginary_power_norm(const OperatorSet& ops, const EigenDecomposition& eig,
                            double s, int n_samples, std::uint64_t seed) {
  const int k = int(eig.mu.size());
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < n_samples; ++t) {
    VecX<double> c = random_vector<double>(rng, k);
    VecX<Complex> cs(k);
    for (int i = 0; i < k; ++i) {
      Complex mu_is = std::exp(Complex(0, s * std::log(eig.mu[i])));
      cs[i] = mu_is * c[i];
    }
    // M-orthonormal basis: norms are coefficient norms
    double num = std::sqrt(cs.squaredNorm());
    double den = c.norm();
    worst = std::max(worst, num / den);
  }
  return worst;
}

EigAlphaTable eig_alpha_table(const DiscreteModel& model,
                              const std::vector<double>& alpha_grid, int k,
                              const EigensolveOptions& opt) {
  if (alpha_grid.size() >= 2) {
    double span = alpha_grid.back() / alpha_grid.front();
    if (span < 9999.0)
      throw Error("invalid-scan", "alpha grid must span at least four decades");
  }
  EigAlphaTable table;
  for (double a : alpha_grid) {
    OperatorSet ops = assemble(model, SlipCoefficient::constant_alpha(a));
    EigenDecomposition eig = eigensolve(ops, k, opt);
    table.rows.push_back({a, eig.mu});
  }
  OperatorSet opsD = assemble(model, SlipCoefficient::constant_alpha(0), /*dirichlet=*/true);
  EigenDecomposition eigD = eigensolve(opsD, k, opt);
  table.mu_dirichlet = eigD.mu;
  // slope of log(mu_D - mu(alpha)) vs log(alpha) over the top decade
  table.gap_slopes.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    std::vector<double> lx, ly;
    double amax = table.rows.back().alpha;
    for (const auto& row : table.rows) {
      if (row.alpha < amax / 10 - 1e-12) continue;
      double gap = table.mu_dirichlet[i] - row.mu[i];
      if (gap <= 0) continue;
      lx.push_back(std::log(row.alpha));
      ly.push_back(std::log(gap));
    }
    table.gap_slopes[i] = (lx.size() >= 2) ? fit_line(lx, ly).slope : 0.0;
  }
  return table;
}

std::pair<double, double> korn_interval(const OperatorSet& ops, int iters) {
  SpMat<double> P = ops.K + ops.M;   // pencil numerator
  SpMat<double> G = ops.M + ops.W;   // H1 Gram
  Eigen::SimplicialLLT<SpMat<double>> pl(P), gl(G);
  if (pl.info() != Eigen::Success || gl.info() != Eigen::Success)
    throw Error("singular-operator", "korn pencil factorization failed");
  Rng rng(13);
  VecX<double> x = random_vector<double>(rng, ops.n_u());
  // largest theta: power iteration on G^{-1} P
  double hi = 0;
  for (int it = 0; it < iters; ++it) {
    VecX<double> y = gl.solve(P * x);
    double n = std::sqrt(y.dot(G * y));
    x = y / n;
    hi = x.dot(P * x) / x.dot(G * x);
  }
  // smallest theta: power iteration on P^{-1} G
  VecX<double> z = random_vector<double>(rng, ops.n_u());
  double lo = 0;
  for (int it = 0; it < iters; ++it) {
    VecX<double> y = pl.solve(G * z);
    double n = std::sqrt(y.dot(G * y));
    z = y / n;
    lo = z.dot(P * z) / z.dot(G * z);
  }
  return {lo, hi};
}

}  // namespace slipstokes
