#pragma once

#include <Eigen/SparseLU>

#include <optional>

#include "slipstokes/operators.hpp"

namespace slipstokes {

/// Direct factorization of the bordered saddle-point system
///   [ A   D^T  0  (Mk) ] [u ]   [F]
///   [ D   0    m   0   ] [p ]   [G]
///   [ 0   m^T  0   0   ] [mu] = [0]
///   [(Mk)^T 0  0   0   ] [nu]   [0]
/// The m-border pins the pressure mean to zero without pinning a node; the
/// optional kernel border (k with A k = 0, D k = 0) filters rigid motions
/// when alpha vanishes.
template <typename S>
class SaddleSolver {
 public:
  SaddleSolver(const SpMat<S>& A, const SpMat<double>& D, const VecX<double>& m,
               std::optional<VecX<double>> kernel_Mk = std::nullopt);

  struct Solution {
    VecX<S> u, p;
    S mean_mult = S(0);
    S kernel_mult = S(0);     // projection removed from the data
    double residual = 0;      // relative algebraic residual
  };
  Solution solve(const VecX<S>& F, const VecX<S>& G) const;
  Solution solve_velocity_rhs(const VecX<S>& F) const;

  int n_u() const { return nu_; }

 private:
  int nu_, np_;
  bool has_kernel_;
  SpMat<S> full_;
  Eigen::SparseLU<SpMat<S>> lu_;
};

extern template class SaddleSolver<double>;
extern template class SaddleSolver<Complex>;

struct SteadyOptions {
  bool filter_kernel = true;  // project rigid motions when alpha == 0 allows them
};

struct SteadySolution {
  VecX<double> u, p;
  double residual = 0;
  double kernel_projection = 0;  // coefficient removed from the data, 0 if none
};

/// Zero-deformation field admissible for this operator set (rigid rotation on
/// disk/annulus, horizontal translation on the channel), or empty when alpha
/// or the boundary condition rules it out.
std::optional<VecX<double>> rigid_kernel(const OperatorSet& ops);

SteadySolution solve_steady(const OperatorSet& ops, const VecX<double>& F,
                            const VecX<double>* G_boundary = nullptr,
                            const SteadyOptions& opt = {});

struct ResolventSample {
  Complex lambda;
  double norm_u = 0, norm_Du = 0, norm_pi = 0;
  double residual = 0;
  double alpha_min = 0, alpha_max = 0;
};

struct ResolventSolution {
  VecX<Complex> u, p;
  ResolventSample sample;
};

ResolventSolution solve_resolvent(const OperatorSet& ops, Complex lambda,
                                  const VecX<double>& F);
ResolventSolution solve_resolvent(const OperatorSet& ops, Complex lambda,
                                  const VecX<Complex>& F);

/// Scan |lambda| along rays arg(lambda); least-squares slopes of log-norms.
struct ScanRay {
  double arg = 0;
  std::vector<ResolventSample> samples;
  double slope_u = 0, slope_Du = 0;
  /// measured constant sup |lambda| ||u|| / ||f||
  double constant = 0;
};
struct ScanResult {
  std::vector<ScanRay> rays;
  double norm_f = 0;
};
ScanResult resolvent_scan(const OperatorSet& ops, const std::vector<double>& ray_args,
                          const std::vector<double>& magnitudes, const VecX<double>& F,
                          int threads = 1);

/// Closed-form solution pair with the induced interior forcing and slip data;
/// div u = 0 and u.n = 0 hold by construction (stream functions).
struct ManufacturedCase {
  std::string id;
  VectorField u;
  ScalarField p;
};

/// Manufactured cases per geometry (see tests); p has zero mean.
ManufacturedCase manufactured_channel(const DomainSpec& spec);
ManufacturedCase manufactured_disk_azimuthal(const DomainSpec& spec);
ManufacturedCase manufactured_disk_stream(const DomainSpec& spec);
ManufacturedCase manufactured_annulus(const DomainSpec& spec);

/// RHS data for lambda*u - div(2 D u) + grad p = f with slip data
/// g = 2[(D u)n]_tau + alpha u_tau evaluated from the closed form.
VecX<double> manufactured_load(const OperatorSet& ops, const ManufacturedCase& mc,
                               double lambda);
VecX<double> manufactured_slip_load(const OperatorSet& ops, const ManufacturedCase& mc);

struct ConvergenceRow {
  double h = 0;
  ErrorNorms err;
};
struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double order_l2 = 0, order_h1 = 0, order_p = 0;  // between the two finest meshes
};
ConvergenceStudy mms_convergence(const DomainSpec& spec, const ManufacturedCase& mc,
                                 const SlipCoefficient& alpha,
                                 const std::vector<double>& hs, double lambda = 0,
                                 bool dirichlet = false);

}  // namespace slipstokes
