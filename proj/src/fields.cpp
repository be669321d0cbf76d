#include "slipstokes/fields.hpp"

#include <cmath>

namespace slipstokes {

VectorField from_stream(const StreamFunction& psi) {
  VectorField v;
  v.value = [g = psi.grad](const Vec2& x) {
    Vec2 gr = g(x);
    return Vec2(gr.y(), -gr.x());
  };
  v.jacobian = [h = psi.hess](const Vec2& x) {
    Mat2 hh = h(x);
    Mat2 j;
    j << hh(1, 0), hh(1, 1), -hh(0, 0), -hh(0, 1);
    return j;
  };
  if (psi.grad_lap)
    v.laplacian = [gl = psi.grad_lap](const Vec2& x) {
      Vec2 g = gl(x);
      return Vec2(g.y(), -g.x());
    };
  return v;
}

StreamFunction stream_sum(std::vector<StreamFunction> parts, std::vector<double> weights) {
  if (weights.empty()) weights.assign(parts.size(), 1.0);
  StreamFunction s;
  s.value = [parts, weights](const Vec2& x) {
    double v = 0;
    for (size_t i = 0; i < parts.size(); ++i) v += weights[i] * parts[i].value(x);
    return v;
  };
  s.grad = [parts, weights](const Vec2& x) {
    Vec2 v = Vec2::Zero();
    for (size_t i = 0; i < parts.size(); ++i) v += weights[i] * parts[i].grad(x);
    return v;
  };
  s.hess = [parts, weights](const Vec2& x) {
    Mat2 v = Mat2::Zero();
    for (size_t i = 0; i < parts.size(); ++i) v += weights[i] * parts[i].hess(x);
    return v;
  };
  s.grad_lap = [parts, weights](const Vec2& x) {
    Vec2 v = Vec2::Zero();
    for (size_t i = 0; i < parts.size(); ++i) v += weights[i] * parts[i].grad_lap(x);
    return v;
  };
  return s;
}

Poly2 Poly2::monomial(int i, int j, double a) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(i + 1, j + 1);
  c(i, j) = a;
  return Poly2(c);
}

double Poly2::operator()(const Vec2& p) const {
  // Horner in x of Horner-in-y rows
  double acc = 0;
  for (int i = int(c_.rows()) - 1; i >= 0; --i) {
    double row = 0;
    for (int j = int(c_.cols()) - 1; j >= 0; --j) row = row * p.y() + c_(i, j);
    acc = acc * p.x() + row;
  }
  return acc;
}

Poly2 Poly2::dx() const {
  if (c_.rows() <= 1) return Poly2();
  Eigen::MatrixXd d(c_.rows() - 1, c_.cols());
  for (int i = 1; i < c_.rows(); ++i)
    for (int j = 0; j < c_.cols(); ++j) d(i - 1, j) = i * c_(i, j);
  return Poly2(d);
}

Poly2 Poly2::dy() const {
  if (c_.cols() <= 1) return Poly2();
  Eigen::MatrixXd d(c_.rows(), c_.cols() - 1);
  for (int i = 0; i < c_.rows(); ++i)
    for (int j = 1; j < c_.cols(); ++j) d(i, j - 1) = j * c_(i, j);
  return Poly2(d);
}

Poly2 Poly2::operator+(const Poly2& o) const {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(std::max(c_.rows(), o.c_.rows()),
                                            std::max(c_.cols(), o.c_.cols()));
  c.topLeftCorner(c_.rows(), c_.cols()) += c_;
  c.topLeftCorner(o.c_.rows(), o.c_.cols()) += o.c_;
  return Poly2(c);
}

Poly2 Poly2::operator-(const Poly2& o) const { return *this + o * (-1.0); }

Poly2 Poly2::operator*(const Poly2& o) const {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(c_.rows() + o.c_.rows() - 1,
                                            c_.cols() + o.c_.cols() - 1);
  for (int i = 0; i < c_.rows(); ++i)
    for (int j = 0; j < c_.cols(); ++j) {
      if (c_(i, j) == 0) continue;
      for (int k = 0; k < o.c_.rows(); ++k)
        for (int l = 0; l < o.c_.cols(); ++l) c(i + k, j + l) += c_(i, j) * o.c_(k, l);
    }
  return Poly2(c);
}

Poly2 Poly2::operator*(double a) const { return Poly2(Eigen::MatrixXd(c_ * a)); }

ScalarField Poly2::scalar_field() const {
  ScalarField f;
  Poly2 px = dx(), py = dy();
  f.value = [p = *this](const Vec2& x) { return p(x); };
  f.gradient = [px, py](const Vec2& x) { return Vec2(px(x), py(x)); };
  return f;
}

StreamFunction Poly2::stream() const {
  StreamFunction s;
  Poly2 px = dx(), py = dy();
  Poly2 pxx = px.dx(), pxy = px.dy(), pyy = py.dy();
  Poly2 lap = pxx + pyy;
  Poly2 lx = lap.dx(), ly = lap.dy();
  s.value = [p = *this](const Vec2& x) { return p(x); };
  s.grad = [px, py](const Vec2& x) { return Vec2(px(x), py(x)); };
  s.hess = [pxx, pxy, pyy](const Vec2& x) {
    Mat2 h;
    h << pxx(x), pxy(x), pxy(x), pyy(x);
    return h;
  };
  s.grad_lap = [lx, ly](const Vec2& x) { return Vec2(lx(x), ly(x)); };
  return s;
}

VectorField poly_field(const Poly2& vx, const Poly2& vy) {
  VectorField v;
  Poly2 axx = vx.dx(), axy = vx.dy(), ayx = vy.dx(), ayy = vy.dy();
  Poly2 lx = vx.dx().dx() + vx.dy().dy();
  Poly2 ly = vy.dx().dx() + vy.dy().dy();
  v.value = [vx, vy](const Vec2& p) { return Vec2(vx(p), vy(p)); };
  v.jacobian = [axx, axy, ayx, ayy](const Vec2& p) {
    Mat2 j;
    j << axx(p), axy(p), ayx(p), ayy(p);
    return j;
  };
  v.laplacian = [lx, ly](const Vec2& p) { return Vec2(lx(p), ly(p)); };
  return v;
}

Fn1D fn_sin(double k, double phase) {
  Fn1D f;
  f.f = [k, phase](double t) { return std::sin(k * t + phase); };
  f.d1 = [k, phase](double t) { return k * std::cos(k * t + phase); };
  f.d2 = [k, phase](double t) { return -k * k * std::sin(k * t + phase); };
  f.d3 = [k, phase](double t) { return -k * k * k * std::cos(k * t + phase); };
  return f;
}

Fn1D fn_cos(double k, double phase) { return fn_sin(k, phase + M_PI / 2); }

Fn1D fn_poly(std::vector<double> coeffs) {
  auto eval = [](const std::vector<double>& c, double t) {
    double acc = 0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
    return acc;
  };
  auto deriv = [](const std::vector<double>& c) {
    std::vector<double> d;
    for (size_t i = 1; i < c.size(); ++i) d.push_back(double(i) * c[i]);
    if (d.empty()) d.push_back(0);
    return d;
  };
  std::vector<double> c1 = deriv(coeffs), c2 = deriv(c1), c3 = deriv(c2);
  Fn1D f;
  f.f = [coeffs, eval](double t) { return eval(coeffs, t); };
  f.d1 = [c1, eval](double t) { return eval(c1, t); };
  f.d2 = [c2, eval](double t) { return eval(c2, t); };
  f.d3 = [c3, eval](double t) { return eval(c3, t); };
  return f;
}

StreamFunction stream_product(const Fn1D& X, const Fn1D& Y) {
  StreamFunction s;
  s.value = [X, Y](const Vec2& p) { return X.f(p.x()) * Y.f(p.y()); };
  s.grad = [X, Y](const Vec2& p) {
    return Vec2(X.d1(p.x()) * Y.f(p.y()), X.f(p.x()) * Y.d1(p.y()));
  };
  s.hess = [X, Y](const Vec2& p) {
    Mat2 h;
    h << X.d2(p.x()) * Y.f(p.y()), X.d1(p.x()) * Y.d1(p.y()),
        X.d1(p.x()) * Y.d1(p.y()), X.f(p.x()) * Y.d2(p.y());
    return h;
  };
  s.grad_lap = [X, Y](const Vec2& p) {
    double x = p.x(), y = p.y();
    return Vec2(X.d3(x) * Y.f(y) + X.d1(x) * Y.d2(y),
                X.d2(x) * Y.d1(y) + X.f(x) * Y.d3(y));
  };
  return s;
}

VectorField rigid_rotation() {
  return poly_field(Poly2::monomial(0, 1, -1.0), Poly2::monomial(1, 0, 1.0));
}

VectorField constant_field(const Vec2& c) {
  return poly_field(Poly2::monomial(0, 0, c.x()), Poly2::monomial(0, 0, c.y()));
}

double fd_check_field(const VectorField& v, const std::vector<Vec2>& pts, double step) {
  double worst = 0;
  for (const Vec2& p : pts) {
    Mat2 jac = v.jacobian(p);
    double scale = std::max(1.0, jac.norm());
    for (int j = 0; j < 2; ++j) {
      Vec2 e = Vec2::Zero();
      e[j] = step;
      Vec2 d = (v.value(p + e) - v.value(p - e)) / (2 * step);
      worst = std::max(worst, (d - jac.col(j)).norm() / scale);
    }
    if (v.laplacian) {
      // second differences need a wider step to stay above roundoff
      double hl = std::max(step, 1e-4);
      Vec2 lap = Vec2::Zero();
      for (int j = 0; j < 2; ++j) {
        Vec2 e = Vec2::Zero();
        e[j] = hl;
        lap += (v.value(p + e) - 2 * v.value(p) + v.value(p - e)) / (hl * hl);
      }
      worst = std::max(worst, (lap - v.laplacian(p)).norm() /
                                  std::max(1.0, v.laplacian(p).norm()));
    }
  }
  return worst;
}

double fd_check_stream(const StreamFunction& s, const std::vector<Vec2>& pts, double step) {
  double worst = 0;
  for (const Vec2& p : pts) {
    Vec2 g = s.grad(p);
    for (int j = 0; j < 2; ++j) {
      Vec2 e = Vec2::Zero();
      e[j] = step;
      double d = (s.value(p + e) - s.value(p - e)) / (2 * step);
      worst = std::max(worst, std::abs(d - g[j]) / std::max(1.0, std::abs(g[j])));
    }
    Mat2 h = s.hess(p);
    for (int j = 0; j < 2; ++j) {
      Vec2 e = Vec2::Zero();
      e[j] = step;
      Vec2 d = (s.grad(p + e) - s.grad(p - e)) / (2 * step);
      worst = std::max(worst, (d - h.col(j)).norm() / std::max(1.0, h.norm()));
    }
    if (s.grad_lap) {
      Vec2 gl = s.grad_lap(p);
      Vec2 fd;
      for (int j = 0; j < 2; ++j) {
        Vec2 e = Vec2::Zero();
        e[j] = step;
        Mat2 hp = s.hess(p + e), hm = s.hess(p - e);
        fd[j] = ((hp(0, 0) + hp(1, 1)) - (hm(0, 0) + hm(1, 1))) / (2 * step);
      }
      worst = std::max(worst, (fd - gl).norm() / std::max(1.0, gl.norm()));
    }
  }
  return worst;
}

}  // namespace slipstokes
