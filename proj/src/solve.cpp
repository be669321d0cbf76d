#include "slipstokes/solve.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <atomic>
#include <cmath>
#include <thread>

namespace slipstokes {

namespace {

template <typename S>
void append_block(std::vector<Eigen::Triplet<S>>& trips, const SpMat<double>& blk,
                  int row0, int col0, bool also_transposed = false) {
  for (int k = 0; k < blk.outerSize(); ++k)
    for (SpMat<double>::InnerIterator it(blk, k); it; ++it) {
      trips.emplace_back(row0 + int(it.row()), col0 + int(it.col()), S(it.value()));
      if (also_transposed)
        trips.emplace_back(col0 + int(it.col()), row0 + int(it.row()), S(it.value()));
    }
}

}  // namespace

template <typename S>
SaddleSolver<S>::SaddleSolver(const SpMat<S>& A, const SpMat<double>& D,
                              const VecX<double>& m, std::optional<VecX<double>> kernel_Mk)
    : nu_(int(A.rows())), np_(int(D.rows())), has_kernel_(kernel_Mk.has_value()) {
  int n = nu_ + np_ + 1 + (has_kernel_ ? 1 : 0);
  std::vector<Eigen::Triplet<S>> trips;
  for (int k = 0; k < A.outerSize(); ++k)
    for (typename SpMat<S>::InnerIterator it(A, k); it; ++it)
      trips.emplace_back(int(it.row()), int(it.col()), it.value());
  append_block<S>(trips, D, nu_, 0, /*also_transposed=*/true);
  for (int k = 0; k < np_; ++k) {
    trips.emplace_back(nu_ + k, nu_ + np_, S(m[k]));
    trips.emplace_back(nu_ + np_, nu_ + k, S(m[k]));
  }
  if (has_kernel_) {
    const VecX<double>& mk = *kernel_Mk;
    int col = nu_ + np_ + 1;
    for (int i = 0; i < nu_; ++i)
      if (mk[i] != 0) {
        trips.emplace_back(i, col, S(mk[i]));
        trips.emplace_back(col, i, S(mk[i]));
      }
  }
  full_.resize(n, n);
  full_.setFromTriplets(trips.begin(), trips.end());
  full_.makeCompressed();
  lu_.compute(full_);
  if (lu_.info() != Eigen::Success)
    throw Error("singular-operator", "saddle-point factorization failed");
}

template <typename S>
typename SaddleSolver<S>::Solution SaddleSolver<S>::solve(const VecX<S>& F,
                                                          const VecX<S>& G) const {
  int n = int(full_.rows());
  VecX<S> rhs = VecX<S>::Zero(n);
  rhs.head(nu_) = F;
  rhs.segment(nu_, np_) = G;
  VecX<S> sol = lu_.solve(rhs);
  // one step of iterative refinement keeps the relative residual at the
  // 1e-10 contract even for stiff alpha
  VecX<S> r = rhs - full_ * sol;
  sol += lu_.solve(r);
  r = rhs - full_ * sol;
  double rn = r.norm(), bn = rhs.norm();
  Solution out;
  out.u = sol.head(nu_);
  out.p = -sol.segment(nu_, np_);  // solver pressure sign -> -div(2Du) + grad p
  out.mean_mult = sol[nu_ + np_];
  if (has_kernel_) out.kernel_mult = sol[nu_ + np_ + 1];
  out.residual = bn > 0 ? rn / bn : rn;
  if (!(out.residual < 1e-8))
    throw Error("nonconvergence", "saddle solve residual " + std::to_string(out.residual));
  return out;
}

template <typename S>
typename SaddleSolver<S>::Solution SaddleSolver<S>::solve_velocity_rhs(
    const VecX<S>& F) const {
  return solve(F, VecX<S>::Zero(np_));
}

template class SaddleSolver<double>;
template class SaddleSolver<Complex>;

std::optional<VecX<double>> rigid_kernel(const OperatorSet& ops) {
  if (ops.dirichlet) return std::nullopt;
  if (ops.alpha.max_value(*ops.frame) > 0) return std::nullopt;
  VectorField k;
  switch (ops.mesh->domain.kind) {
    case DomainKind::Disk:
    case DomainKind::Annulus:
      k = rigid_rotation();
      break;
    case DomainKind::Channel:
      k = constant_field(Vec2(1, 0));
      break;
  }
  VecX<double> kc = ops.space->interpolate(k, ops.dirichlet);
  double nrm = ops.norm_L2(kc);
  return VecX<double>(kc / nrm);
}

SteadySolution solve_steady(const OperatorSet& ops, const VecX<double>& F,
                            const VecX<double>* G_boundary, const SteadyOptions& opt) {
  SpMat<double> A = ops.K + ops.B;
  auto kernel = rigid_kernel(ops);
  if (kernel && !opt.filter_kernel)
    throw Error("singular-operator",
                "alpha == 0 with a rigid-motion kernel; enable kernel filtering");
  std::optional<VecX<double>> border;
  if (kernel) border = VecX<double>(ops.M * (*kernel));
  SaddleSolver<double> solver(A, ops.D, ops.pressure_mean, border);
  VecX<double> rhs = F;
  if (G_boundary) rhs += *G_boundary;
  auto sol = solver.solve_velocity_rhs(rhs);
  SteadySolution out;
  out.u = sol.u;
  out.p = sol.p;
  ops.make_zero_mean(out.p);
  out.residual = sol.residual;
  out.kernel_projection = std::abs(sol.kernel_mult);
  return out;
}

namespace {

ResolventSolution resolvent_impl(const OperatorSet& ops, Complex lambda,
                                 const VecX<Complex>& F) {
  if (!(lambda.real() >= 0) || lambda == Complex(0, 0))
    throw Error("invalid-lambda", "resolvent needs Re lambda >= 0, lambda != 0");
  std::vector<Eigen::Triplet<Complex>> trips;
  SpMat<double> KB = ops.K + ops.B;
  for (int k = 0; k < KB.outerSize(); ++k)
    for (SpMat<double>::InnerIterator it(KB, k); it; ++it)
      trips.emplace_back(int(it.row()), int(it.col()), Complex(it.value(), 0));
  for (int k = 0; k < ops.M.outerSize(); ++k)
    for (SpMat<double>::InnerIterator it(ops.M, k); it; ++it)
      trips.emplace_back(int(it.row()), int(it.col()), lambda * it.value());
  SpMat<Complex> A(ops.n_u(), ops.n_u());
  A.setFromTriplets(trips.begin(), trips.end());
  SaddleSolver<Complex> solver(A, ops.D, ops.pressure_mean);
  auto sol = solver.solve_velocity_rhs(F);
  ResolventSolution out;
  out.u = sol.u;
  out.p = sol.p;
  ops.make_zero_mean(out.p);
  out.sample.lambda = lambda;
  out.sample.norm_u = ops.norm_L2(out.u);
  out.sample.norm_Du = ops.norm_Du(out.u);
  out.sample.norm_pi = ops.norm_pressure(out.p);
  out.sample.residual = sol.residual;
  out.sample.alpha_min = ops.alpha.min_value(*ops.frame);
  out.sample.alpha_max = ops.alpha.max_value(*ops.frame);
  return out;
}

}  // namespace

ResolventSolution solve_resolvent(const OperatorSet& ops, Complex lambda,
                                  const VecX<double>& F) {
  return resolvent_impl(ops, lambda, VecX<Complex>(F.cast<Complex>()));
}
ResolventSolution solve_resolvent(const OperatorSet& ops, Complex lambda,
                                  const VecX<Complex>& F) {
  return resolvent_impl(ops, lambda, F);
}

ScanResult resolvent_scan(const OperatorSet& ops, const std::vector<double>& ray_args,
                          const std::vector<double>& magnitudes, const VecX<double>& F,
                          int threads) {
  if (magnitudes.size() >= 2) {
    double span = magnitudes.back() / magnitudes.front();
    if (span < 999.0)
      throw Error("invalid-scan", "magnitude grid must span at least three decades");
  }
  ScanResult res;
  // F is a load vector; the constant sup |lambda| ||u|| / ||f|| uses the L2
  // norm of its Riesz representative M^{-1} F.
  {
    Eigen::SimplicialLLT<SpMat<double>> llt(ops.M);
    VecX<double> f = llt.solve(F);
    res.norm_f = std::sqrt(std::max(0.0, f.dot(F)));
  }
  res.rays.resize(ray_args.size());
  for (size_t r = 0; r < ray_args.size(); ++r) {
    res.rays[r].arg = ray_args[r];
    res.rays[r].samples.resize(magnitudes.size());
  }
  struct Job {
    size_t ray, mag;
  };
  std::vector<Job> jobs;
  for (size_t r = 0; r < ray_args.size(); ++r)
    for (size_t m = 0; m < magnitudes.size(); ++m) jobs.push_back({r, m});
  auto work = [&](size_t j) {
    Complex lam = std::polar(magnitudes[jobs[j].mag], ray_args[jobs[j].ray]);
    if (std::abs(lam.real()) < 1e-14 * std::abs(lam)) lam.real(0.0);
    auto sol = solve_resolvent(ops, lam, F);
    res.rays[jobs[j].ray].samples[jobs[j].mag] = sol.sample;
  };
  if (threads <= 1) {
    for (size_t j = 0; j < jobs.size(); ++j) work(j);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&]() {
        for (size_t j = next.fetch_add(1); j < jobs.size(); j = next.fetch_add(1)) work(j);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& ray : res.rays) {
    std::vector<double> lx, lu, ld;
    double cst = 0;
    for (const auto& s : ray.samples) {
      lx.push_back(std::log(std::abs(s.lambda)));
      lu.push_back(std::log(s.norm_u));
      ld.push_back(std::log(s.norm_Du));
      cst = std::max(cst, std::abs(s.lambda) * s.norm_u / res.norm_f);
    }
    ray.slope_u = fit_line(lx, lu).slope;
    ray.slope_Du = fit_line(lx, ld).slope;
    ray.constant = cst;
  }
  return res;
}

// ---------------------------------------------------------------------------
// manufactured cases

ManufacturedCase manufactured_channel(const DomainSpec& spec) {
  double L = spec.length, H = spec.height;
  double k = 2 * M_PI / L;
  // psi = sin(kx) y^2 (H - y)^2 + H shear profile; tangential on both walls
  StreamFunction s1 = stream_product(fn_sin(k), fn_poly({0, 0, H * H, -2 * H, 1}));
  StreamFunction s2 = stream_product(fn_poly({1}), fn_poly({0, 0, 0, 1.0 / (H * H)}));
  ManufacturedCase mc;
  mc.id = "channel-trig";
  mc.u = from_stream(stream_sum({s1, s2}, {1.0, 0.5}));
  // zero-mean pressure, periodic in x
  Fn1D px = fn_cos(k);
  ScalarField p;
  p.value = [px, H](const Vec2& x) { return px.f(x.x()) * (x.y() - H / 2); };
  p.gradient = [px, H](const Vec2& x) {
    return Vec2(px.d1(x.x()) * (x.y() - H / 2), px.f(x.x()));
  };
  mc.p = p;
  return mc;
}

ManufacturedCase manufactured_disk_azimuthal(const DomainSpec& spec) {
  double R = spec.radius;
  // u = (-y, x)(x^2 + y^2) / R^2, tangential with nonzero slip trace
  Poly2 x = Poly2::monomial(1, 0), y = Poly2::monomial(0, 1);
  Poly2 r2 = x * x + y * y;
  Poly2 ux = (y * r2) * (-1.0 / (R * R));
  Poly2 uy = (x * r2) * (1.0 / (R * R));
  ManufacturedCase mc;
  mc.id = "disk-azimuthal";
  mc.u = poly_field(ux, uy);
  mc.p = (x + x * y).scalar_field();  // odd: zero mean on the disk
  return mc;
}

ManufacturedCase manufactured_disk_stream(const DomainSpec& spec) {
  double R = spec.radius;
  Poly2 x = Poly2::monomial(1, 0), y = Poly2::monomial(0, 1);
  Poly2 r2 = x * x + y * y;
  Poly2 w = Poly2::monomial(0, 0, R * R) - r2;
  Poly2 psi = x * w * w * (1.0 / (R * R * R * R * R));  // u vanishes on Gamma
  ManufacturedCase mc;
  mc.id = "disk-stream";
  mc.u = from_stream(psi.stream());
  mc.p = (x + x * y).scalar_field();
  return mc;
}

ManufacturedCase manufactured_annulus(const DomainSpec& spec) {
  double R0 = spec.inner_radius, R1 = spec.outer_radius;
  Poly2 x = Poly2::monomial(1, 0), y = Poly2::monomial(0, 1);
  Poly2 r2 = x * x + y * y;
  Poly2 w0 = r2 - Poly2::monomial(0, 0, R0 * R0);
  Poly2 w1 = Poly2::monomial(0, 0, R1 * R1) - r2;
  double scale = 1.0 / std::pow(R1, 5);
  Poly2 psi = x * w0 * w1 * scale;
  ManufacturedCase mc;
  mc.id = "annulus-stream";
  mc.u = from_stream(psi.stream());
  mc.p = (x + x * y).scalar_field();
  return mc;
}

VecX<double> manufactured_load(const OperatorSet& ops, const ManufacturedCase& mc,
                               double lambda) {
  VectorField f;
  f.value = [mc, lambda](const Vec2& x) {
    return Vec2(lambda * mc.u.value(x) - mc.u.laplacian(x) + mc.p.gradient(x));
  };
  return assemble_load(ops, f);
}

VecX<double> manufactured_slip_load(const OperatorSet& ops, const ManufacturedCase& mc) {
  if (ops.dirichlet) return VecX<double>::Zero(ops.n_u());
  const SlipCoefficient& alpha = ops.alpha;
  auto g = [&](const FramePoint& fp) {
    Mat2 strain = mc.u.strain(fp.x);
    Vec2 dn = strain * fp.n;
    Vec2 two_dnt = 2.0 * (dn - dn.dot(fp.n) * fp.n);
    Vec2 val = mc.u.value(fp.x);
    Vec2 ut = val - val.dot(fp.n) * fp.n;
    // frame index is unknown here; Samples representation needs it
    double a_here = alpha.rep == SlipCoefficient::Rep::Samples
                        ? 0.0
                        : alpha.eval(fp.chart, fp.s, -1);
    return Vec2(two_dnt + a_here * ut);
  };
  if (alpha.rep == SlipCoefficient::Rep::Samples)
    throw Error("inconsistent-chart", "manufactured slip data needs closed-form alpha");
  return assemble_boundary_load(ops, g);
}

ConvergenceStudy mms_convergence(const DomainSpec& spec, const ManufacturedCase& mc,
                                 const SlipCoefficient& alpha,
                                 const std::vector<double>& hs, double lambda,
                                 bool dirichlet) {
  ConvergenceStudy study;
  for (double h : hs) {
    DiscreteModel model = make_model(spec, h);
    OperatorSet ops = assemble(model, alpha, dirichlet);
    VecX<double> F = manufactured_load(ops, mc, lambda);
    VecX<double> G = manufactured_slip_load(ops, mc);
    SpMat<double> A = ops.K + ops.B;
    if (lambda != 0) A = A + SpMat<double>(lambda * ops.M);
    std::optional<VecX<double>> border;
    auto kernel = rigid_kernel(ops);
    if (kernel && lambda == 0) border = VecX<double>(ops.M * (*kernel));
    SaddleSolver<double> solver(A, ops.D, ops.pressure_mean, border);
    auto sol = solver.solve(VecX<double>(F + G), VecX<double>::Zero(ops.n_p()));
    VecX<double> p = sol.p;
    ops.make_zero_mean(p);
    ErrorNorms err = error_norms(ops, sol.u, p, mc.u, mc.p);
    study.rows.push_back({model.mesh->h, err});
  }
  if (study.rows.size() >= 2) {
    const auto& a = study.rows[study.rows.size() - 2];
    const auto& b = study.rows.back();
    double lh = std::log(a.h / b.h);
    study.order_l2 = std::log(a.err.vel_l2 / b.err.vel_l2) / lh;
    study.order_h1 = std::log(a.err.vel_h1 / b.err.vel_h1) / lh;
    study.order_p = std::log(a.err.pre_l2 / b.err.pre_l2) / lh;
  }
  return study;
}

}  // namespace slipstokes
