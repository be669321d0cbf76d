#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>

#include "slipstokes/spectral.hpp"

using namespace slipstokes;

namespace {

/// Dense oracle: explicit divergence-free basis from the nullspace of the
/// gauge-corrected constraint, then a dense generalized eigensolve.
VecX<double> dense_divfree_eigs(const OperatorSet& ops, int k) {
  Eigen::MatrixXd D = Eigen::MatrixXd(ops.D);
  Eigen::VectorXd m = ops.pressure_mean;
  double c0 = m.sum();
  Eigen::VectorXd colsum = D.colwise().sum();
  Eigen::MatrixXd C = D - m * (colsum.transpose() / c0);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
  lu.setThreshold(1e-10);
  Eigen::MatrixXd Z = lu.kernel();
  Eigen::MatrixXd Kz = Z.transpose() * Eigen::MatrixXd(SpMat<double>(ops.K + ops.B)) * Z;
  Eigen::MatrixXd Mz = Z.transpose() * Eigen::MatrixXd(ops.M) * Z;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      0.5 * (Kz + Kz.transpose()), 0.5 * (Mz + Mz.transpose()));
  return ges.eigenvalues().head(k);
}

}  // namespace

TEST_CASE("eigensolve matches the dense oracle on a coarse mesh") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.45);
  OperatorSet ops = assemble(model, SlipCoefficient::constant_alpha(1.0));
  CHECK(ops.n_u() <= 600);
  int k = 8;
  EigenDecomposition eig = eigensolve(ops, k);
  VecX<double> dense = dense_divfree_eigs(ops, k);
  for (int i = 0; i < k; ++i)
    CHECK(eig.mu[i] == doctest::Approx(dense[i]).epsilon(1e-8));
}

TEST_CASE("eigenpairs are M-orthonormal with small residuals") {
  DiscreteModel model = make_model(DomainSpec::annulus(0.5, 1.0), 0.2);
  OperatorSet ops = assemble(model, SlipCoefficient::constant_alpha(2.0));
  EigenDecomposition eig = eigensolve(ops, 6);
  CHECK(eig.max_residual <= 1e-8);
  MatX<double> G = eig.phi.transpose() * (ops.M * eig.phi);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(std::abs(G(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
  for (int i = 1; i < 6; ++i) CHECK(eig.mu[i] >= eig.mu[i - 1]);
  CHECK(eig.mu[0] > 0);  // alpha > 0 on the whole boundary
}

TEST_CASE("eigensolve is deterministic across calls") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.3);
  OperatorSet ops = assemble(model, SlipCoefficient::constant_alpha(1.0));
  EigenDecomposition a = eigensolve(ops, 5);
  EigenDecomposition b = eigensolve(ops, 5);
  CHECK((a.mu - b.mu).norm() == 0.0);
  CHECK((a.phi - b.phi).norm() == 0.0);
}

TEST_CASE("alpha = 0 on the disk: mu1 = 0 with the rigid rotation") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.3);
  OperatorSet ops = assemble(model, SlipCoefficient::constant_alpha(0.0));
  EigenDecomposition eig = eigensolve(ops, 3);
  CHECK(std::abs(eig.mu[0]) < 1e-8);
  VecX<double> r = model.space->interpolate(rigid_rotation(), false);
  r /= ops.norm_L2(r);
  double overlap = std::abs(r.dot(ops.M * eig.phi.col(0)));
  CHECK(overlap == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(eig.mu[1] > 1.0);  // the kernel is one-dimensional
}

TEST_CASE("alpha = 0 on the annulus: rotation stays admissible") {
  DiscreteModel model = make_model(DomainSpec::annulus(0.5, 1.0), 0.2);
  OperatorSet ops = assemble(model, SlipCoefficient::constant_alpha(0.0));
  EigenDecomposition eig = eigensolve(ops, 2);
  CHECK(std::abs(eig.mu[0]) < 1e-8);
}

TEST_CASE("rayleigh quotients never undercut mu1") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.3);
  OperatorSet ops = assemble(model, SlipCoefficient::constant_alpha(1.0));
  EigenDecomposition eig = eigensolve(ops, 1);
  Rng rng(41);
  SpMat<double> KB = ops.K + ops.B;
  for (int t = 0; t < 100; ++t) {
    VecX<double> v =
        helmholtz_project(ops, VecX<double>(random_vector<double>(rng, ops.n_u())))
            .projected;
    double q = v.dot(KB * v) / v.dot(ops.M * v);
    CHECK(q >= eig.mu[0] - 1e-8);
  }
}

TEST_CASE("fractional powers: identity, action, semigroup property") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.3);
  OperatorSet ops = assemble(model, SlipCoefficient::constant_alpha(1.0));
  EigenDecomposition eig = eigensolve(ops, 6);
  Rng rng(43);
  VecX<double> c = random_vector<double>(rng, 6);
  VecX<double> u = eig.phi * c;
  CHECK(ops.norm_L2(VecX<double>(fractional_apply(ops, eig, 0.0, u) - u)) <=
        1e-10 * ops.norm_L2(u));
  VecX<double> phi1 = eig.phi.col(0);
  CHECK(ops.norm_L2(VecX<double>(fractional_apply(ops, eig, 1.0, phi1) -
                                 eig.mu[0] * phi1)) <= 1e-10 * eig.mu[0]);
  VecX<double> twice =
      fractional_apply(ops, eig, 0.5, fractional_apply(ops, eig, 0.5, u));
  VecX<double> once = fractional_apply(ops, eig, 1.0, u);
  CHECK(ops.norm_L2(VecX<double>(twice - once)) <= 1e-10 * ops.norm_L2(once));
}

TEST_CASE("fractional powers reject span leakage") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.3);
  OperatorSet ops = assemble(model, SlipCoefficient::constant_alpha(1.0));
  EigenDecomposition eig = eigensolve(ops, 2);
  Rng rng(47);
  VecX<double> u =
      helmholtz_project(ops, VecX<double>(random_vector<double>(rng, ops.n_u())))
          .projected;
  CHECK_THROWS_WITH_AS(fractional_apply(ops, eig, 0.5, u),
                       doctest::Contains("span-deficiency"), Error);
}

TEST_CASE("half-power parseval identity and H1 equivalence stability") {
  std::vector<HalfPowerReport> reports;
  for (double h : {0.3, 0.15}) {
    DiscreteModel model = make_model(DomainSpec::disk(1.0), h);
    OperatorSet ops = assemble(model, SlipCoefficient::constant_alpha(1.0));
    EigenDecomposition eig = eigensolve(ops, 10);
    reports.push_back(halfpower_equivalence(ops, eig));
  }
  for (const auto& rep : reports) {
    CHECK(rep.parseval_error <= 1e-10);
    CHECK(rep.c1 > 0);
    CHECK(rep.c2 >= rep.c1);
  }
  double q0 = reports[0].c2 / reports[0].c1, q1 = reports[1].c2 / reports[1].c1;
  CHECK(q1 <= 1.25 * q0);
  CHECK(q1 >= 0.75 * q0);
}

TEST_CASE("boundary term bounds the equivalence constant linearly in alpha") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.25);
  std::vector<double> c2s, alphas = {1.0, 10.0, 100.0};
  for (double a : alphas) {
    OperatorSet ops = assemble(model, SlipCoefficient::constant_alpha(a));
    EigenDecomposition eig = eigensolve(ops, 8);
    c2s.push_back(halfpower_equivalence(ops, eig).c2);
  }
  for (size_t i = 1; i < alphas.size(); ++i) {
    double growth = c2s[i] / c2s[0];
    CHECK(growth <= alphas[i] / alphas[0] * 1.1 + 1.0);
  }
}

TEST_CASE("imaginary powers are unitary at p = 2") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.3);
  OperatorSet ops = assemble(model, SlipCoefficient::constant_alpha(1.0));
  EigenDecomposition eig = eigensolve(ops, 8);
  for (double s : {0.0, 1.0, -5.0, 5.0, 10.0})
    CHECK(imaginary_power_norm(ops, eig, s) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("eigenvalue table: monotone in alpha with 1/alpha gap decay") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.25);
  std::vector<double> grid = {1, 10, 100, 1000, 1e4, 1e5, 1e6};
  EigAlphaTable table = eig_alpha_table(model, grid, 3);
  for (size_t r = 1; r < table.rows.size(); ++r)
    for (int i = 0; i < 3; ++i)
      CHECK(table.rows[r].mu[i] >= table.rows[r - 1].mu[i] - 1e-10);
  for (int i = 0; i < 3; ++i) {
    for (size_t r = 1; r < table.rows.size(); ++r) {
      double g_prev = table.mu_dirichlet[i] - table.rows[r - 1].mu[i];
      double g_here = table.mu_dirichlet[i] - table.rows[r].mu[i];
      CHECK(g_here <= g_prev + 1e-10);
    }
    CHECK(table.gap_slopes[i] <= -0.9);
  }
  double rel = std::abs(table.rows.back().mu[0] - table.mu_dirichlet[0]) /
               table.mu_dirichlet[0];
  CHECK(rel <= 0.01);
}

TEST_CASE("alpha grid below four decades is rejected") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.4);
  CHECK_THROWS_AS(eig_alpha_table(model, {1, 10, 100}, 2), Error);
}
