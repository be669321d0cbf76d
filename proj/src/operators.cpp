#include "slipstokes/operators.hpp"

#include "slipstokes/report.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

namespace slipstokes {

SlipCoefficient SlipCoefficient::constant_alpha(double a) {
  SlipCoefficient s;
  s.rep = Rep::Constant;
  s.constant = a;
  s.validate();
  return s;
}

SlipCoefficient SlipCoefficient::per_arc(std::vector<Arc> arcs, double default_value) {
  SlipCoefficient s;
  s.rep = Rep::PerArc;
  s.arcs = std::move(arcs);
  s.default_value = default_value;
  s.validate();
  return s;
}

SlipCoefficient SlipCoefficient::sampled(std::vector<double> samples) {
  SlipCoefficient s;
  s.rep = Rep::Samples;
  s.samples = std::move(samples);
  s.validate();
  return s;
}

double SlipCoefficient::eval(int chart, double s, int frame_index) const {
  switch (rep) {
    case Rep::Constant:
      return constant;
    case Rep::PerArc:
      for (const auto& a : arcs)
        if (a.chart == chart && s >= a.s0 && s < a.s1) return a.value;
      return default_value;
    case Rep::Samples:
      if (frame_index < 0 || frame_index >= int(samples.size()))
        throw Error("inconsistent-chart", "sampled alpha does not match the frame");
      return samples[frame_index];
  }
  return 0;
}

void SlipCoefficient::validate() const {
  auto check = [](double v) {
    if (v < 0) throw Error("negative-alpha", "alpha must be nonnegative");
  };
  check(rep == Rep::Constant ? constant : 0.0);
  if (rep == Rep::PerArc) {
    check(default_value);
    for (const auto& a : arcs) {
      check(a.value);
      if (!(a.s1 > a.s0)) throw Error("negative-alpha", "empty arc in alpha table");
    }
  }
  if (rep == Rep::Samples)
    for (double v : samples) check(v);
}

double SlipCoefficient::min_value(const BoundaryFrame& frame) const {
  double m = 1e300;
  for (size_t i = 0; i < frame.points.size(); ++i)
    m = std::min(m, eval(frame.points[i].chart, frame.points[i].s, int(i)));
  return m;
}

double SlipCoefficient::max_value(const BoundaryFrame& frame) const {
  double m = 0;
  for (size_t i = 0; i < frame.points.size(); ++i)
    m = std::max(m, eval(frame.points[i].chart, frame.points[i].s, int(i)));
  return m;
}

double SlipCoefficient::gamma0_length(const BoundaryFrame& frame) const {
  double L = 0;
  for (size_t i = 0; i < frame.points.size(); ++i)
    if (eval(frame.points[i].chart, frame.points[i].s, int(i)) > 0)
      L += frame.points[i].weight;
  return L;
}

DiscreteModel make_model(const DomainSpec& spec, double h, int boundary_quad_order) {
  DiscreteModel m;
  m.mesh = std::make_shared<Mesh>(build_mesh(spec, h));
  m.space = std::make_shared<FunctionSpace>(*m.mesh);
  m.frame = std::make_shared<BoundaryFrame>(boundary_frame(*m.mesh, boundary_quad_order));
  return m;
}

namespace {

bool cell_is_curved(const FunctionSpace& space, int c) {
  Eigen::Matrix<double, 6, 2> X = space.cell_node_coords(c);
  double h2 = 0;
  for (int k = 0; k < 3; ++k)
    h2 = std::max(h2, (X.row(k) - X.row((k + 1) % 3)).norm());
  for (int k = 0; k < 3; ++k) {
    Vec2 mid = 0.5 * (X.row(k) + X.row((k + 1) % 3));
    if ((Vec2(X.row(3 + k)) - mid).norm() > 1e-12 * h2) return true;
  }
  return false;
}

struct CellQuad {
  // per quadrature point: weight*|detJ|, basis values, physical gradients,
  // physical position
  std::vector<double> w;
  std::vector<Eigen::Matrix<double, 6, 1>> N;
  std::vector<Eigen::Matrix<double, 6, 2>> g;   // rows: nodes; cols: d/dx, d/dy
  std::vector<Vec2> x;
  std::vector<Eigen::Matrix<double, 3, 1>> Np;
};

/// Interior quadrature of order 4 on affine cells, 6 on curved cells.
CellQuad cell_quadrature(const FunctionSpace& space, int c) {
  const TriangleRule& rule = triangle_rule(cell_is_curved(space, c) ? 6 : 4);
  Eigen::Matrix<double, 6, 2> X = space.cell_node_coords(c);
  CellQuad q;
  size_t n = rule.points.size();
  q.w.resize(n);
  q.N.resize(n);
  q.g.resize(n);
  q.x.resize(n);
  q.Np.resize(n);
  for (size_t k = 0; k < n; ++k) {
    Eigen::Matrix<double, 6, 1> N;
    Eigen::Matrix<double, 6, 2> dN;
    p2_shape(rule.points[k], N, dN);
    Mat2 J = X.transpose() * dN;
    double detJ = J.determinant();
    if (!(detJ > 0)) throw Error("meshing-failure", "nonpositive jacobian in cell map");
    Mat2 Jinv = J.inverse();
    q.w[k] = rule.weights[k] * detJ;
    q.N[k] = N;
    q.g[k] = dN * Jinv;  // rows: d N_a / d x_j
    q.x[k] = X.transpose() * N;
    Eigen::Matrix<double, 3, 1> Np;
    Eigen::Matrix<double, 3, 2> dNp;
    p1_shape(rule.points[k], Np, dNp);
    q.Np[k] = Np;
  }
  return q;
}

}  // namespace

OperatorSet assemble(const DiscreteModel& model, const SlipCoefficient& alpha,
                     bool dirichlet) {
  alpha.validate();
  const Mesh& mesh = *model.mesh;
  const FunctionSpace& space = *model.space;
  const BoundaryFrame& frame = *model.frame;

  OperatorSet ops;
  ops.mesh = model.mesh;
  ops.space = model.space;
  ops.frame = model.frame;
  ops.alpha = alpha;
  ops.dirichlet = dirichlet;
  ops.R = space.restriction(dirichlet);

  const int nfull = 2 * space.n_vnodes();
  const int np = space.n_pressure();

  std::vector<Triplet> tM, tK, tW, tD, tMp, tB;
  VecX<double> pmean = VecX<double>::Zero(np);

  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellQuad q = cell_quadrature(space, c);
    auto nodes = space.cell_nodes(c);
    Eigen::Matrix<double, 12, 12> m = Eigen::Matrix<double, 12, 12>::Zero();
    Eigen::Matrix<double, 12, 12> k2 = Eigen::Matrix<double, 12, 12>::Zero();
    Eigen::Matrix<double, 12, 12> w2 = Eigen::Matrix<double, 12, 12>::Zero();
    Eigen::Matrix<double, 3, 12> d = Eigen::Matrix<double, 3, 12>::Zero();
    Eigen::Matrix<double, 3, 3> mp = Eigen::Matrix<double, 3, 3>::Zero();
    Eigen::Matrix<double, 3, 1> mv = Eigen::Matrix<double, 3, 1>::Zero();
    for (size_t kq = 0; kq < q.w.size(); ++kq) {
      double w = q.w[kq];
      const auto& N = q.N[kq];
      const auto& g = q.g[kq];
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
          double nn = w * N[a] * N[b];
          double gg = w * g.row(a).dot(g.row(b));
          for (int i = 0; i < 2; ++i) {
            m(2 * a + i, 2 * b + i) += nn;
            w2(2 * a + i, 2 * b + i) += gg;
            k2(2 * a + i, 2 * b + i) += gg;
          }
          // 2 D(phi_a,i):D(phi_b,j) = delta_ij g_a.g_b + g_a[j] g_b[i]
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              k2(2 * a + i, 2 * b + j) += w * g(a, j) * g(b, i);
        }
      for (int p = 0; p < 3; ++p) {
        mv[p] += w * q.Np[kq][p];
        for (int l = 0; l < 3; ++l) mp(p, l) += w * q.Np[kq][p] * q.Np[kq][l];
        for (int b = 0; b < 6; ++b)
          for (int j = 0; j < 2; ++j) d(p, 2 * b + j) += w * q.Np[kq][p] * g(b, j);
      }
    }
    // exact local symmetry before scatter
    m = 0.5 * (m + m.transpose()).eval();
    k2 = 0.5 * (k2 + k2.transpose()).eval();
    w2 = 0.5 * (w2 + w2.transpose()).eval();
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            int ga = 2 * nodes[a] + i, gb = 2 * nodes[b] + j;
            if (m(2 * a + i, 2 * b + j) != 0) tM.emplace_back(ga, gb, m(2 * a + i, 2 * b + j));
            if (k2(2 * a + i, 2 * b + j) != 0) tK.emplace_back(ga, gb, k2(2 * a + i, 2 * b + j));
            if (w2(2 * a + i, 2 * b + j) != 0) tW.emplace_back(ga, gb, w2(2 * a + i, 2 * b + j));
          }
    for (int p = 0; p < 3; ++p) {
      int gp = mesh.cells(c, p);
      pmean[gp] += mv[p];
      for (int l = 0; l < 3; ++l) tMp.emplace_back(gp, mesh.cells(c, l), mp(p, l));
      for (int b = 0; b < 6; ++b)
        for (int j = 0; j < 2; ++j)
          if (d(p, 2 * b + j) != 0) tD.emplace_back(gp, 2 * nodes[b] + j, d(p, 2 * b + j));
    }
  }

  // boundary mass int_Gamma alpha (u - (u.n)n).(v - (v.n)n)
  ops.frame_w.resize(int(frame.points.size()));
  ops.frame_alpha.resize(int(frame.points.size()));
  std::vector<Triplet> tTx, tTy;
  for (size_t qi = 0; qi < frame.points.size(); ++qi) {
    const FramePoint& fp = frame.points[qi];
    double a_here = alpha.eval(fp.chart, fp.s, int(qi));
    ops.frame_w[int(qi)] = fp.weight;
    ops.frame_alpha[int(qi)] = a_here;
    const BoundaryEdge& be = mesh.boundary_edges[fp.edge];
    Vec2 xi = edge_point(be.local_edge, fp.ref_t);
    Eigen::Matrix<double, 6, 1> N;
    Eigen::Matrix<double, 6, 2> dN;
    p2_shape(xi, N, dN);
    auto nodes = space.cell_nodes(be.cell);
    Mat2 P = Mat2::Identity() - fp.n * fp.n.transpose();
    for (int a = 0; a < 6; ++a) {
      if (N[a] != 0) {
        tTx.emplace_back(int(qi), 2 * nodes[a], N[a]);
        tTy.emplace_back(int(qi), 2 * nodes[a] + 1, N[a]);
      }
      if (a_here == 0) continue;
      for (int b = 0; b < 6; ++b) {
        double nn = fp.weight * a_here * N[a] * N[b];
        if (nn == 0) continue;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            tB.emplace_back(2 * nodes[a] + i, 2 * nodes[b] + j, nn * P(i, j));
      }
    }
  }

  SpMat<double> Mf = from_triplets_stable(nfull, nfull, tM);
  SpMat<double> Kf = from_triplets_stable(nfull, nfull, tK);
  SpMat<double> Wf = from_triplets_stable(nfull, nfull, tW);
  SpMat<double> Bf = from_triplets_stable(nfull, nfull, tB);
  SpMat<double> Df = from_triplets_stable(np, nfull, tD);
  ops.Mp = from_triplets_stable(np, np, tMp);
  ops.pressure_mean = pmean;

  const SpMat<double>& R = ops.R;
  SpMat<double> Rt = SpMat<double>(R.transpose());
  ops.M = symmetrized(SpMat<double>(Rt * Mf * R));
  ops.K = symmetrized(SpMat<double>(Rt * Kf * R));
  ops.W = symmetrized(SpMat<double>(Rt * Wf * R));
  ops.B = symmetrized(SpMat<double>(Rt * Bf * R));
  ops.D = SpMat<double>(Df * R);
  SpMat<double> Txf(int(frame.points.size()), nfull), Tyf(int(frame.points.size()), nfull);
  Txf.setFromTriplets(tTx.begin(), tTx.end());
  Tyf.setFromTriplets(tTy.begin(), tTy.end());
  ops.Tx = SpMat<double>(Txf * R);
  ops.Ty = SpMat<double>(Tyf * R);
  ops.M_full = Mf;
  ops.K_full = Kf;
  ops.W_full = Wf;
  ops.Tx_full = Txf;
  ops.Ty_full = Tyf;
  return ops;
}

OperatorSet assemble(const Mesh& mesh, const BoundaryFrame& frame,
                     const SlipCoefficient& alpha, bool dirichlet) {
  DiscreteModel model;
  model.mesh = std::make_shared<Mesh>(mesh);
  model.space = std::make_shared<FunctionSpace>(*model.mesh);
  model.frame = std::make_shared<BoundaryFrame>(frame);
  return assemble(model, alpha, dirichlet);
}

VecX<double> assemble_load(const OperatorSet& ops, const VectorField& f) {
  const FunctionSpace& space = *ops.space;
  VecX<double> F = VecX<double>::Zero(2 * space.n_vnodes());
  for (int c = 0; c < ops.mesh->n_cells(); ++c) {
    CellQuad q = cell_quadrature(space, c);
    auto nodes = space.cell_nodes(c);
    for (size_t kq = 0; kq < q.w.size(); ++kq) {
      Vec2 val = f.value(ops.mesh->canonical(q.x[kq]));
      for (int a = 0; a < 6; ++a) {
        F[2 * nodes[a]] += q.w[kq] * q.N[kq][a] * val.x();
        F[2 * nodes[a] + 1] += q.w[kq] * q.N[kq][a] * val.y();
      }
    }
  }
  return SpMat<double>(ops.R.transpose()) * F;
}

VecX<double> assemble_boundary_load(const OperatorSet& ops,
                                    const std::function<Vec2(const FramePoint&)>& g) {
  const FunctionSpace& space = *ops.space;
  VecX<double> F = VecX<double>::Zero(2 * space.n_vnodes());
  for (size_t qi = 0; qi < ops.frame->points.size(); ++qi) {
    const FramePoint& fp = ops.frame->points[qi];
    Vec2 val = g(fp);
    const BoundaryEdge& be = ops.mesh->boundary_edges[fp.edge];
    Vec2 xi = edge_point(be.local_edge, fp.ref_t);
    Eigen::Matrix<double, 6, 1> N;
    Eigen::Matrix<double, 6, 2> dN;
    p2_shape(xi, N, dN);
    auto nodes = space.cell_nodes(be.cell);
    for (int a = 0; a < 6; ++a) {
      F[2 * nodes[a]] += fp.weight * N[a] * val.x();
      F[2 * nodes[a] + 1] += fp.weight * N[a] * val.y();
    }
  }
  return SpMat<double>(ops.R.transpose()) * F;
}

namespace {

/// Bordered mass saddle solve shared by real and complex Helmholtz paths.
template <typename S>
HelmholtzResult<S> helmholtz_impl(const OperatorSet& ops, const VecX<S>& psi) {
  const int nu = ops.n_u(), np = ops.n_p();
  const int n = nu + np + 1;
  std::vector<Eigen::Triplet<S>> trips;
  for (int k = 0; k < ops.M.outerSize(); ++k)
    for (typename SpMat<double>::InnerIterator it(ops.M, k); it; ++it)
      trips.emplace_back(int(it.row()), int(it.col()), S(it.value()));
  for (int k = 0; k < ops.D.outerSize(); ++k)
    for (typename SpMat<double>::InnerIterator it(ops.D, k); it; ++it) {
      trips.emplace_back(nu + int(it.row()), int(it.col()), S(it.value()));
      trips.emplace_back(int(it.col()), nu + int(it.row()), S(it.value()));
    }
  for (int k = 0; k < np; ++k) {
    trips.emplace_back(nu + k, nu + np, S(ops.pressure_mean[k]));
    trips.emplace_back(nu + np, nu + k, S(ops.pressure_mean[k]));
  }
  SpMat<S> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  Eigen::SparseLU<SpMat<S>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw Error("singular-system", "helmholtz saddle factorization failed");
  VecX<S> rhs = VecX<S>::Zero(n);
  rhs.head(nu) = ops.M * psi;
  VecX<S> sol = lu.solve(rhs);
  HelmholtzResult<S> out;
  out.projected = sol.head(nu);
  out.potential = sol.segment(nu, np);
  // q solves the Neumann problem for grad pi = psi - P psi; flip to the
  // potential convention P psi = psi - grad pi
  out.potential = -out.potential;
  ops.make_zero_mean(out.potential);
  return out;
}

}  // namespace

HelmholtzResult<double> helmholtz_project(const OperatorSet& ops, const VecX<double>& psi) {
  return helmholtz_impl<double>(ops, psi);
}
HelmholtzResult<Complex> helmholtz_project(const OperatorSet& ops, const VecX<Complex>& psi) {
  return helmholtz_impl<Complex>(ops, psi);
}

VecX<double> discrete_gradient(const OperatorSet& ops, const VecX<double>& q) {
  Eigen::SimplicialLLT<SpMat<double>> llt(ops.M);
  if (llt.info() != Eigen::Success) throw Error("singular-system", "mass factorization");
  // <grad q, phi>_M = -int q0 div phi with q0 the zero-mean part: the mean
  // component is pure gauge under the mean-bordered saddle formulation, and
  // dropping it here makes P annihilate gradients exactly
  VecX<double> q0 = q;
  ops.make_zero_mean(q0);
  return llt.solve(VecX<double>(-(SpMat<double>(ops.D.transpose()) * q0)));
}

double quadratic_form_recompute(const OperatorSet& ops, const VecX<double>& u) {
  const FunctionSpace& space = *ops.space;
  VecX<double> ufull = ops.R * u;
  double acc = 0;
  for (int c = 0; c < ops.mesh->n_cells(); ++c) {
    CellQuad q = cell_quadrature(space, c);
    auto nodes = space.cell_nodes(c);
    for (size_t kq = 0; kq < q.w.size(); ++kq) {
      Mat2 grad = Mat2::Zero();  // grad(i,j) = d u_i / d x_j
      for (int a = 0; a < 6; ++a)
        for (int i = 0; i < 2; ++i)
          grad.row(i) += ufull[2 * nodes[a] + i] * q.g[kq].row(a);
      Mat2 sym = 0.5 * (grad + grad.transpose());
      acc += q.w[kq] * 2.0 * sym.squaredNorm();
    }
  }
  VecX<double> tx = ops.Tx * u, ty = ops.Ty * u;
  for (size_t qi = 0; qi < ops.frame->points.size(); ++qi) {
    const FramePoint& fp = ops.frame->points[qi];
    double a_here = ops.frame_alpha[int(qi)];
    if (a_here == 0) continue;
    Vec2 val(tx[int(qi)], ty[int(qi)]);
    Vec2 vt = val - val.dot(fp.n) * fp.n;
    acc += fp.weight * a_here * vt.squaredNorm();
  }
  return acc;
}

double greens_formula_check(const OperatorSet& ops, const VectorField& v,
                            const ScalarField& pi) {
  const FunctionSpace& space = *ops.space;
  const int nfull = 2 * space.n_vnodes();
  VecX<double> L = VecX<double>::Zero(nfull), Rv = VecX<double>::Zero(nfull);
  for (int c = 0; c < ops.mesh->n_cells(); ++c) {
    CellQuad q = cell_quadrature(space, c);
    auto nodes = space.cell_nodes(c);
    for (size_t kq = 0; kq < q.w.size(); ++kq) {
      Vec2 x = ops.mesh->canonical(q.x[kq]);
      Vec2 stokes = -v.laplacian(x) + pi.gradient(x);
      Mat2 strain = v.strain(x);
      for (int a = 0; a < 6; ++a) {
        Vec2 grad_a = q.g[kq].row(a);
        Vec2 sg = strain * grad_a;
        for (int i = 0; i < 2; ++i) {
          L[2 * nodes[a] + i] += q.w[kq] * q.N[kq][a] * stokes[i];
          Rv[2 * nodes[a] + i] += q.w[kq] * 2.0 * sg[i];
        }
      }
    }
  }
  for (size_t qi = 0; qi < ops.frame->points.size(); ++qi) {
    const FramePoint& fp = ops.frame->points[qi];
    Mat2 strain = v.strain(fp.x);
    Vec2 dn = strain * fp.n;
    Vec2 dnt = dn - dn.dot(fp.n) * fp.n;
    const BoundaryEdge& be = ops.mesh->boundary_edges[fp.edge];
    Vec2 xi = edge_point(be.local_edge, fp.ref_t);
    Eigen::Matrix<double, 6, 1> N;
    Eigen::Matrix<double, 6, 2> dN;
    p2_shape(xi, N, dN);
    auto nodes = space.cell_nodes(be.cell);
    for (int a = 0; a < 6; ++a)
      for (int i = 0; i < 2; ++i)
        Rv[2 * nodes[a] + i] -= fp.weight * 2.0 * N[a] * dnt[i];
  }
  SpMat<double> Rt = SpMat<double>(ops.R.transpose());
  VecX<double> Lc = Rt * L, Rc = Rt * Rv;
  SpMat<double> h1 = ops.M + ops.W;
  VecX<double> h1diag = h1.diagonal();
  double worst = 0;
  for (int i = 0; i < Lc.size(); ++i)
    worst = std::max(worst, std::abs(Lc[i] - Rc[i]) / std::sqrt(h1diag[i]));
  return worst;
}

template <typename S>
void eval_cell_velocity(const FunctionSpace& space, const VecX<S>& ufull, int c,
                        const Vec2& xi, Eigen::Matrix<S, 2, 1>* value,
                        Eigen::Matrix<S, 2, 2>* jac) {
  Eigen::Matrix<double, 6, 1> N;
  Eigen::Matrix<double, 6, 2> dN;
  p2_shape(xi, N, dN);
  Eigen::Matrix<double, 6, 2> X = space.cell_node_coords(c);
  Mat2 J = X.transpose() * dN;
  Mat2 Jinv = J.inverse();
  Eigen::Matrix<double, 6, 2> g = dN * Jinv;
  auto nodes = space.cell_nodes(c);
  if (value) value->setZero();
  if (jac) jac->setZero();
  for (int a = 0; a < 6; ++a)
    for (int i = 0; i < 2; ++i) {
      S coef = ufull[2 * nodes[a] + i];
      if (value) (*value)[i] += coef * N[a];
      if (jac)
        for (int j = 0; j < 2; ++j) (*jac)(i, j) += coef * g(a, j);
    }
}

template void eval_cell_velocity<double>(const FunctionSpace&, const VecX<double>&, int,
                                         const Vec2&, Eigen::Matrix<double, 2, 1>*,
                                         Eigen::Matrix<double, 2, 2>*);
template void eval_cell_velocity<Complex>(const FunctionSpace&, const VecX<Complex>&, int,
                                          const Vec2&, Eigen::Matrix<Complex, 2, 1>*,
                                          Eigen::Matrix<Complex, 2, 2>*);

void write_operator(std::ostream& os, const SpMat<double>& a) {
  std::vector<std::tuple<int, int, double>> entries;
  entries.reserve(a.nonZeros());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat<double>::InnerIterator it(a, k); it; ++it)
      entries.emplace_back(int(it.row()), int(it.col()), it.value());
  std::sort(entries.begin(), entries.end());
  for (const auto& [r, c, v] : entries) os << r << " " << c << " " << fmt17(v) << "\n";
}

ErrorNorms error_norms(const OperatorSet& ops, const VecX<double>& u,
                       const VecX<double>& p, const VectorField& u_exact,
                       const ScalarField& p_exact) {
  const FunctionSpace& space = *ops.space;
  VecX<double> ufull = ops.R * u;
  const TriangleRule& rule = triangle_rule(8);
  double el2 = 0, eh1 = 0, ep = 0;
  for (int c = 0; c < ops.mesh->n_cells(); ++c) {
    Eigen::Matrix<double, 6, 2> X = space.cell_node_coords(c);
    auto nodes = space.cell_nodes(c);
    for (size_t kq = 0; kq < rule.points.size(); ++kq) {
      Eigen::Matrix<double, 6, 1> N;
      Eigen::Matrix<double, 6, 2> dN;
      p2_shape(rule.points[kq], N, dN);
      Mat2 J = X.transpose() * dN;
      double w = rule.weights[kq] * J.determinant();
      Eigen::Matrix<double, 6, 2> g = dN * J.inverse();
      Vec2 x = ops.mesh->canonical(X.transpose() * N);
      Vec2 uh = Vec2::Zero();
      Mat2 gh = Mat2::Zero();
      for (int a = 0; a < 6; ++a)
        for (int i = 0; i < 2; ++i) {
          double coef = ufull[2 * nodes[a] + i];
          uh[i] += coef * N[a];
          gh.row(i) += coef * g.row(a);
        }
      el2 += w * (uh - u_exact.value(x)).squaredNorm();
      eh1 += w * (gh - u_exact.jacobian(x)).squaredNorm();
      Eigen::Matrix<double, 3, 1> Np;
      Eigen::Matrix<double, 3, 2> dNp;
      p1_shape(rule.points[kq], Np, dNp);
      double ph = 0;
      for (int l = 0; l < 3; ++l) ph += p[ops.mesh->cells(c, l)] * Np[l];
      double diff = ph - p_exact.value(x);
      ep += w * diff * diff;
    }
  }
  return {std::sqrt(el2), std::sqrt(eh1), std::sqrt(ep)};
}

}  // namespace slipstokes
