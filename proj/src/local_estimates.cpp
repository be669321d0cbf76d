#include "slipstokes/local_estimates.hpp"

#include <cmath>

namespace slipstokes {

namespace {

struct RefTri {
  Vec2 a, b, c;  // reference coordinates within the parent cell
  double area_factor;  // area relative to the parent reference triangle
};

/// quadrature over one (possibly clipped) reference sub-triangle of cell c
double quad_subtri(const OperatorSet& ops, const VecX<Complex>& ufull, int c,
                   const RefTri& tri, const BallIntegrand& integrand) {
  const TriangleRule& rule = triangle_rule(8);
  const FunctionSpace& space = *ops.space;
  Eigen::Matrix<double, 6, 2> X = space.cell_node_coords(c);
  auto nodes = space.cell_nodes(c);
  double acc = 0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    Vec2 l = rule.points[q];
    Vec2 xi = tri.a + l.x() * (tri.b - tri.a) + l.y() * (tri.c - tri.a);
    Eigen::Matrix<double, 6, 1> N;
    Eigen::Matrix<double, 6, 2> dN;
    p2_shape(xi, N, dN);
    Mat2 J = X.transpose() * dN;
    double detJ = J.determinant();
    double w = rule.weights[q] * tri.area_factor * detJ;
    Eigen::Matrix<Complex, 2, 1> uval = Eigen::Matrix<Complex, 2, 1>::Zero();
    Eigen::Matrix<Complex, 2, 2> grad = Eigen::Matrix<Complex, 2, 2>::Zero();
    Eigen::Matrix<double, 6, 2> g;
    if (integrand.needs_gradient) g = dN * J.inverse();
    for (int a = 0; a < 6; ++a)
      for (int i = 0; i < 2; ++i) {
        Complex coef = ufull[2 * nodes[a] + i];
        uval[i] += coef * N[a];
        if (integrand.needs_gradient)
          for (int j = 0; j < 2; ++j) grad(i, j) += coef * g(a, j);
      }
    Vec2 x = X.transpose() * N;
    acc += w * integrand.f(ops.mesh->canonical(x), uval, grad);
  }
  return acc;
}

/// physical position of a reference point in cell c (periodic sheet of the cell)
Vec2 phys(const FunctionSpace& space, int c, const Vec2& xi) {
  Eigen::Matrix<double, 6, 1> N;
  Eigen::Matrix<double, 6, 2> dN;
  p2_shape(xi, N, dN);
  return space.cell_node_coords(c).transpose() * N;
}

/// signed "inside ball" indicator via physical distance
double level(const FunctionSpace& space, int c, const Vec2& xi, const Vec2& center,
             double radius) {
  return (phys(space, c, xi) - center).norm() - radius;
}

/// find the crossing on segment [p,q] (reference coords) by bisection
Vec2 cross_point(const FunctionSpace& space, int c, Vec2 p, double fp, Vec2 q, double fq,
                 const Vec2& center, double radius) {
  (void)fp;
  (void)fq;
  Vec2 lo = p, hi = q;
  double flo = level(space, c, lo, center, radius);
  for (int it = 0; it < 40; ++it) {
    Vec2 mid = 0.5 * (lo + hi);
    double fm = level(space, c, mid, center, radius);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double polygon_area2(const std::vector<Vec2>& poly) {
  double a = 0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return a;  // 2x signed area
}

void recurse(const OperatorSet& ops, const VecX<Complex>& ufull, int c, const RefTri& tri,
             const Vec2& center, double radius, const BallIntegrand& integrand, int depth,
             double& acc) {
  const FunctionSpace& space = *ops.space;
  double fa = level(space, c, tri.a, center, radius);
  double fb = level(space, c, tri.b, center, radius);
  double fc = level(space, c, tri.c, center, radius);
  // every point of the subtriangle is within its diameter of a corner, so
  // corner levels beyond +-diameter decide containment outright
  double diam = std::max({(phys(space, c, tri.a) - phys(space, c, tri.b)).norm(),
                          (phys(space, c, tri.b) - phys(space, c, tri.c)).norm(),
                          (phys(space, c, tri.c) - phys(space, c, tri.a)).norm()});
  if (std::min({fa, fb, fc}) > diam) return;  // fully outside
  if (std::max({fa, fb, fc}) < -diam) {       // fully inside
    acc += quad_subtri(ops, ufull, c, tri, integrand);
    return;
  }
  if (depth > 0) {
    Vec2 mab = 0.5 * (tri.a + tri.b), mbc = 0.5 * (tri.b + tri.c),
         mca = 0.5 * (tri.c + tri.a);
    double f4 = tri.area_factor / 4;
    recurse(ops, ufull, c, {tri.a, mab, mca, f4}, center, radius, integrand, depth - 1, acc);
    recurse(ops, ufull, c, {mab, tri.b, mbc, f4}, center, radius, integrand, depth - 1, acc);
    recurse(ops, ufull, c, {mca, mbc, tri.c, f4}, center, radius, integrand, depth - 1, acc);
    recurse(ops, ufull, c, {mab, mbc, mca, f4}, center, radius, integrand, depth - 1, acc);
    return;
  }
  // leaf: clip against the chord through the circle crossings; a tangent
  // grazing with no corner sign change is a negligible sliver at leaf size
  std::array<Vec2, 3> v = {tri.a, tri.b, tri.c};
  std::array<double, 3> f = {fa, fb, fc};
  if (f[0] >= 0 && f[1] >= 0 && f[2] >= 0) return;
  if (f[0] <= 0 && f[1] <= 0 && f[2] <= 0) {
    acc += quad_subtri(ops, ufull, c, tri, integrand);
    return;
  }
  std::vector<Vec2> poly;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3;
    if (f[i] <= 0) poly.push_back(v[i]);
    if ((f[i] < 0) != (f[j] < 0))
      poly.push_back(cross_point(*ops.space, c, v[i], f[i], v[j], f[j], center, radius));
  }
  if (poly.size() < 3) return;
  double parent2 = polygon_area2({tri.a, tri.b, tri.c});
  for (size_t i = 1; i + 1 < poly.size(); ++i) {
    RefTri sub{poly[0], poly[i], poly[i + 1], 0};
    double a2 = polygon_area2({sub.a, sub.b, sub.c});
    sub.area_factor = tri.area_factor * a2 / parent2;
    if (sub.area_factor <= 0) continue;
    acc += quad_subtri(ops, ufull, c, sub, integrand);
  }
}

}  // namespace

double ball_integrate(const OperatorSet& ops, const VecX<Complex>& ufull,
                      const Vec2& center, double radius, const BallIntegrand& integrand,
                      int subdivision_depth) {
  double acc = 0;
  for (int c = 0; c < ops.mesh->n_cells(); ++c) {
    // cheap reject: cells with all vertices far outside
    Vec2 ref = ops.mesh->vertex_in_cell(c, 0);
    Vec2 ctr = ops.mesh->periodic_x ? ops.mesh->unwrap_near(center, ref) : center;
    double dmin = 1e300, h = 0;
    for (int k = 0; k < 3; ++k) {
      Vec2 p = ops.mesh->vertex_in_cell(c, k);
      dmin = std::min(dmin, (p - ctr).norm());
      h = std::max(h, (p - ops.mesh->vertex_in_cell(c, (k + 1) % 3)).norm());
    }
    if (dmin > radius + 2 * h) continue;
    RefTri root{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), 1.0};
    recurse(ops, ufull, c, root, ctr, radius, integrand, subdivision_depth, acc);
  }
  return acc;
}

double ball_measure(const OperatorSet& ops, const Vec2& center, double radius,
                    int subdivision_depth) {
  BallIntegrand one;
  one.needs_gradient = false;
  one.f = [](const Vec2&, const Eigen::Matrix<Complex, 2, 1>&,
             const Eigen::Matrix<Complex, 2, 2>&) { return 1.0; };
  VecX<Complex> dummy = VecX<Complex>::Zero(2 * ops.space->n_vnodes());
  return ball_integrate(ops, dummy, center, radius, one, subdivision_depth);
}

LocalEstimateRecord caccioppoli_check(const OperatorSet& ops, const VecX<Complex>& u,
                                      Complex lambda, const BallProbe& probe, double s,
                                      double t, double f_support_distance) {
  probe.validate(ops.mesh->domain);
  if (!(probe.r <= s && s < t && t <= 2 * probe.r))
    throw Error("invalid-probe", "need r <= s < t <= 2r");
  if (f_support_distance < t)
    throw Error("support-violation", "forcing support intersects B_t");
  VecX<Complex> ufull = ops.R.cast<Complex>() * u;
  BallIntegrand grad2;
  grad2.f = [](const Vec2&, const Eigen::Matrix<Complex, 2, 1>&,
               const Eigen::Matrix<Complex, 2, 2>& g) {
    Eigen::Matrix<Complex, 2, 2> sym = 0.5 * (g + g.transpose());
    return sym.squaredNorm();
  };
  BallIntegrand val2;
  val2.needs_gradient = false;
  val2.f = [](const Vec2&, const Eigen::Matrix<Complex, 2, 1>& v,
              const Eigen::Matrix<Complex, 2, 2>&) { return v.squaredNorm(); };
  LocalEstimateRecord rec;
  rec.probe = probe;
  rec.lambda = lambda;
  rec.p = 2;
  rec.h = ops.mesh->h;
  rec.lhs = ball_integrate(ops, ufull, probe.center, s, grad2);
  double mass_t = ball_integrate(ops, ufull, probe.center, t, val2);
  rec.rhs = mass_t / ((t - s) * (t - s));
  if (rec.rhs <= 1e-28) {
    rec.degenerate = true;
    rec.ratio = 0;
  } else {
    rec.ratio = rec.lhs / rec.rhs;
  }
  return rec;
}

LocalEstimateRecord reverse_holder_check(const OperatorSet& ops, const VecX<Complex>& u,
                                         Complex lambda, const BallProbe& probe, double p,
                                         double f_support_distance) {
  probe.validate(ops.mesh->domain);
  if (f_support_distance < probe.doubling * probe.r)
    throw Error("support-violation", "forcing support intersects the doubled ball");
  VecX<Complex> ufull = ops.R.cast<Complex>() * u;
  BallIntegrand pw;
  pw.needs_gradient = false;
  pw.f = [p](const Vec2&, const Eigen::Matrix<Complex, 2, 1>& v,
             const Eigen::Matrix<Complex, 2, 2>&) {
    return std::pow(v.norm(), p);
  };
  BallIntegrand v2;
  v2.needs_gradient = false;
  v2.f = [](const Vec2&, const Eigen::Matrix<Complex, 2, 1>& v,
            const Eigen::Matrix<Complex, 2, 2>&) { return v.squaredNorm(); };
  LocalEstimateRecord rec;
  rec.probe = probe;
  rec.lambda = lambda;
  rec.p = p;
  rec.h = ops.mesh->h;
  double R2 = probe.doubling * probe.r;
  double m1 = ball_measure(ops, probe.center, probe.r);
  double m2 = ball_measure(ops, probe.center, R2);
  double ip = ball_integrate(ops, ufull, probe.center, probe.r, pw);
  double i2 = ball_integrate(ops, ufull, probe.center, R2, v2);
  rec.lhs = std::pow(ip / m1, 1.0 / p);
  rec.rhs = std::sqrt(i2 / m2);
  if (rec.rhs <= 1e-14 * std::max(1.0, rec.lhs)) {
    rec.degenerate = true;
    rec.ratio = 0;
  } else {
    rec.ratio = rec.lhs / rec.rhs;
  }
  return rec;
}

VectorField bump_vortex(const Vec2& x_f, double rho, double amplitude) {
  // psi = A (1 - |(x - x_f)/rho|^2)^4 inside the bump, 0 outside; C^3 across
  // the edge so the induced velocity has continuous second derivatives
  VectorField v;
  auto q = [x_f, rho](const Vec2& x) {
    return ((x - x_f) / rho).squaredNorm();
  };
  v.value = [=](const Vec2& x) {
    double s = q(x);
    if (s >= 1) return Vec2(0, 0);
    double c = 1 - s;
    // u = rot(psi): psi'(s) * d s/d(x,y) rotated
    double dpsi = amplitude * 4 * c * c * c * (-1.0);
    Vec2 ds = 2 * (x - x_f) / (rho * rho);
    Vec2 grad = dpsi * ds;
    return Vec2(grad.y(), -grad.x());
  };
  v.jacobian = [=](const Vec2& x) {
    double s = q(x);
    if (s >= 1) return Mat2::Zero().eval();
    double c = 1 - s;
    double d1 = -4 * amplitude * c * c * c;
    double d2 = 12 * amplitude * c * c;
    Vec2 ds = 2 * (x - x_f) / (rho * rho);
    Mat2 hss = (2.0 / (rho * rho)) * Mat2::Identity();
    Mat2 hess = d2 * ds * ds.transpose() + d1 * hss;  // hessian of psi
    Mat2 j;
    j << hess(1, 0), hess(1, 1), -hess(0, 0), -hess(0, 1);
    return j;
  };
  v.laplacian = [=](const Vec2& x) {
    double s = q(x);
    if (s >= 1) return Vec2(0, 0);
    double c = 1 - s;
    // lap psi = 4 psi''(s) |ds|^2/4 ... computed directly:
    // psi(s), s = |y|^2/rho^2, lap psi = psi'' |grad s|^2 + psi' lap s
    double d1 = -4 * amplitude * c * c * c;
    double d2 = 12 * amplitude * c * c;
    double d3 = -24 * amplitude * c;
    Vec2 ds = 2 * (x - x_f) / (rho * rho);
    double lap_s = 4.0 / (rho * rho);
    // grad(lap psi) = [d3 |ds|^2 + d2 lap_s] ds + d2 * grad(|ds|^2)
    Vec2 grad_ds2 = (8.0 / std::pow(rho, 4)) * (x - x_f);
    Vec2 gl = (d3 * ds.squaredNorm() + d2 * lap_s) * ds + d2 * grad_ds2;
    return Vec2(gl.y(), -gl.x());
  };
  return v;
}

}  // namespace slipstokes
