#pragma once

#include <memory>
#include <optional>

#include "slipstokes/fem.hpp"

namespace slipstokes {

/// Nonnegative slip coefficient on the boundary (units 1/length); constant,
/// piecewise per arc, or sampled at the frame quadrature points.  Values are
/// taken pointwise with no smoothing, so discontinuous coefficients are fine.
struct SlipCoefficient {
  enum class Rep { Constant, PerArc, Samples };
  Rep rep = Rep::Constant;
  double constant = 0;
  struct Arc {
    int chart;
    double s0, s1;
    double value;
  };
  std::vector<Arc> arcs;       // PerArc; uncovered stretches use default_value
  double default_value = 0;
  std::vector<double> samples;  // Samples; aligned with frame points

  static SlipCoefficient constant_alpha(double a);
  static SlipCoefficient per_arc(std::vector<Arc> arcs, double default_value = 0);
  static SlipCoefficient sampled(std::vector<double> samples);

  double eval(int chart, double s, int frame_index) const;
  void validate() const;
  double min_value(const BoundaryFrame& frame) const;
  double max_value(const BoundaryFrame& frame) const;
  /// total arclength of {alpha > 0}
  double gamma0_length(const BoundaryFrame& frame) const;
};

/// Assembled operators on the constrained velocity space (u.n = 0 enforced
/// strongly at boundary nodes, or u = 0 for the Dirichlet twin).
struct OperatorSet {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FunctionSpace> space;
  std::shared_ptr<const BoundaryFrame> frame;
  SlipCoefficient alpha;
  bool dirichlet = false;

  SpMat<double> R;        // constrained -> full Cartesian coefficients
  SpMat<double> M;        // velocity mass
  SpMat<double> K;        // 2 int D(u):D(v)
  SpMat<double> B;        // int_Gamma alpha u_tau . v_tau
  SpMat<double> W;        // int grad u : grad v  (H1 Gram = M + W)
  SpMat<double> D;        // (n_p x n_u) divergence: D_{kj} = int psi_k div phi_j
  SpMat<double> Mp;       // pressure mass
  VecX<double> pressure_mean;  // m_k = int psi_k
  SpMat<double> Tx, Ty;   // trace evaluation at frame points (n_frame x n_u)
  VecX<double> frame_w;   // frame quadrature weights
  VecX<double> frame_alpha;
  // full Cartesian-layout twins, used to compare fields across boundary
  // conditions (slip vs Dirichlet live in different constrained spaces)
  SpMat<double> M_full, K_full, W_full, Tx_full, Ty_full;

  int n_u() const { return int(M.rows()); }
  int n_p() const { return int(Mp.rows()); }

  template <typename S>
  double norm_L2(const VecX<S>& u) const {
    return std::sqrt(std::abs((u.adjoint() * (M * u))(0)));
  }
  template <typename S>
  double norm_Du(const VecX<S>& u) const {  // ||D(u)||_{L2}
    return std::sqrt(std::max(0.0, 0.5 * std::real((u.adjoint() * (K * u))(0))));
  }
  template <typename S>
  double norm_H1(const VecX<S>& u) const {
    return std::sqrt(std::abs((u.adjoint() * ((M + W) * u))(0)));
  }
  template <typename S>
  double norm_pressure(const VecX<S>& p) const {
    return std::sqrt(std::abs((p.adjoint() * (Mp * p))(0)));
  }
  /// subtract the weighted mean so int p = 0
  template <typename S>
  void make_zero_mean(VecX<S>& p) const {
    S mean = pressure_mean.cast<S>().dot(p) / S(pressure_mean.sum());
    p.array() -= mean;
  }
  /// boundary trace of u at the frame points
  template <typename S>
  std::vector<Eigen::Matrix<S, 2, 1>> trace(const VecX<S>& u) const {
    VecX<S> ux = Tx * u, uy = Ty * u;
    std::vector<Eigen::Matrix<S, 2, 1>> out(ux.size());
    for (int i = 0; i < ux.size(); ++i) out[i] << ux[i], uy[i];
    return out;
  }
  /// int_Gamma |u - w|^2 ds (w optional, from another operator set on the
  /// same mesh/frame)
  template <typename S>
  double boundary_gap2(const VecX<S>& u, const OperatorSet& other,
                       const VecX<S>& w) const {
    VecX<S> dx = Tx * u - other.Tx * w, dy = Ty * u - other.Ty * w;
    double acc = 0;
    for (int i = 0; i < dx.size(); ++i)
      acc += frame_w[i] * (std::norm(Complex(dx[i])) + std::norm(Complex(dy[i])));
    return acc;
  }
  template <typename S>
  double boundary_norm2(const VecX<S>& u) const {
    VecX<S> dx = Tx * u, dy = Ty * u;
    double acc = 0;
    for (int i = 0; i < dx.size(); ++i)
      acc += frame_w[i] * (std::norm(Complex(dx[i])) + std::norm(Complex(dy[i])));
    return acc;
  }
};

/// Shared geometry + discretization bundle; assemble() variants below reuse it.
struct DiscreteModel {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FunctionSpace> space;
  std::shared_ptr<const BoundaryFrame> frame;
};
DiscreteModel make_model(const DomainSpec& spec, double h, int boundary_quad_order = 6);

OperatorSet assemble(const DiscreteModel& model, const SlipCoefficient& alpha,
                     bool dirichlet = false);
/// spec-level convenience: assembles space and operators from a mesh/frame pair
OperatorSet assemble(const Mesh& mesh, const BoundaryFrame& frame,
                     const SlipCoefficient& alpha, bool dirichlet = false);

/// Interior load vector F_i = int f . phi_i on the constrained space.
VecX<double> assemble_load(const OperatorSet& ops, const VectorField& f);
/// Boundary load G_i = int_Gamma g . phi_i with g evaluated on the chart.
VecX<double> assemble_boundary_load(const OperatorSet& ops,
                                    const std::function<Vec2(const FramePoint&)>& g);

/// Helmholtz (Leray) projection: w = psi - grad(pi) with the discrete
/// Neumann potential pi (zero mean); algebraically the M-orthogonal
/// projection onto the discretely divergence-free subspace.
template <typename S>
struct HelmholtzResult {
  VecX<S> projected;
  VecX<S> potential;
};
HelmholtzResult<double> helmholtz_project(const OperatorSet& ops, const VecX<double>& psi);
HelmholtzResult<Complex> helmholtz_project(const OperatorSet& ops, const VecX<Complex>& psi);

/// Discrete gradient of a pressure-space function into the velocity space
/// (M^{-1} D^T q); gradients are exactly annihilated by helmholtz_project.
VecX<double> discrete_gradient(const OperatorSet& ops, const VecX<double>& q);

/// Independent quadrature recomputation of u^T (K + B) u =
/// 2||D(u)||^2 + int_Gamma alpha |u_tau|^2.
double quadratic_form_recompute(const OperatorSet& ops, const VecX<double>& u);

/// max over constrained basis fields of the Green's formula mismatch
///   int (-lap v + grad pi) . phi  vs  2 int D(v):D(phi) - 2 <[(D v)n]_tau, phi>
/// normalized by ||phi||_{H1}.
double greens_formula_check(const OperatorSet& ops, const VectorField& v,
                            const ScalarField& pi);

/// Evaluate a discrete velocity field (value and jacobian) at a reference
/// point of a cell; `ufull` holds full Cartesian coefficients (R * u).
template <typename S>
void eval_cell_velocity(const FunctionSpace& space, const VecX<S>& ufull, int c,
                        const Vec2& xi, Eigen::Matrix<S, 2, 1>* value,
                        Eigen::Matrix<S, 2, 2>* jac);

/// Debug export of a sparse operator: one "row col value" line per entry,
/// sorted lexicographically, values with 17 significant digits.
void write_operator(std::ostream& os, const SpMat<double>& a);

/// L2 / H1(seminorm) / pressure-L2 errors of a discrete solution against
/// closed forms, by quadrature of degree 8.
struct ErrorNorms {
  double vel_l2 = 0, vel_h1 = 0, pre_l2 = 0;
};
ErrorNorms error_norms(const OperatorSet& ops, const VecX<double>& u,
                       const VecX<double>& p, const VectorField& u_exact,
                       const ScalarField& p_exact);

}  // namespace slipstokes
