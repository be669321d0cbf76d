#pragma once

#include <functional>
#include <vector>

#include "slipstokes/core.hpp"

namespace slipstokes {

/// Closed-form vector field with first derivatives (and laplacian when a
/// consumer needs it).  jacobian()(i,j) = d v_i / d x_j.
struct VectorField {
  std::function<Vec2(const Vec2&)> value;
  std::function<Mat2(const Vec2&)> jacobian;
  std::function<Vec2(const Vec2&)> laplacian;  // may be empty

  Mat2 strain(const Vec2& x) const {
    Mat2 j = jacobian(x);
    return 0.5 * (j + j.transpose());
  }
  double divergence(const Vec2& x) const { return jacobian(x).trace(); }
  double curl(const Vec2& x) const {
    Mat2 j = jacobian(x);
    return j(1, 0) - j(0, 1);
  }
};

struct ScalarField {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;
};

/// Scalar stream function carrying enough derivatives to manufacture
/// divergence-free velocity fields u = (psi_y, -psi_x) together with their
/// jacobians and laplacians (grad_lap = grad of laplacian(psi)).
struct StreamFunction {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> grad;
  std::function<Mat2(const Vec2&)> hess;
  std::function<Vec2(const Vec2&)> grad_lap;
};

VectorField from_stream(const StreamFunction& psi);
StreamFunction stream_sum(std::vector<StreamFunction> parts,
                          std::vector<double> weights = {});

/// Dense bivariate polynomial sum_{i,j} c(i,j) x^i y^j with exact
/// derivatives; the workhorse behind the built-in smooth field suites.
class Poly2 {
 public:
  Poly2() : c_(1, 1) { c_.setZero(); }
  explicit Poly2(Eigen::MatrixXd coeffs) : c_(std::move(coeffs)) {}
  static Poly2 monomial(int i, int j, double a = 1.0);

  double operator()(const Vec2& x) const;
  Poly2 dx() const;
  Poly2 dy() const;
  Poly2 operator+(const Poly2& o) const;
  Poly2 operator-(const Poly2& o) const;
  Poly2 operator*(const Poly2& o) const;
  Poly2 operator*(double a) const;

  ScalarField scalar_field() const;
  StreamFunction stream() const;

 private:
  Eigen::MatrixXd c_;  // c_(i,j) multiplies x^i y^j
};

VectorField poly_field(const Poly2& vx, const Poly2& vy);

/// One-dimensional factor with derivatives up to third order; products of
/// these build the separable (trigonometric x polynomial) stream functions
/// used on the periodic channel.
struct Fn1D {
  std::function<double(double)> f, d1, d2, d3;
};
Fn1D fn_sin(double k, double phase = 0);
Fn1D fn_cos(double k, double phase = 0);
Fn1D fn_poly(std::vector<double> coeffs);  // c0 + c1 t + ...
StreamFunction stream_product(const Fn1D& X, const Fn1D& Y);

// Common fields
VectorField rigid_rotation();            // (-y, x)
VectorField constant_field(const Vec2& c);

/// Finite-difference verification used by the test oracles: max relative
/// mismatch of jacobian/laplacian (if present) against central differences
/// at the given points.
double fd_check_field(const VectorField& v, const std::vector<Vec2>& pts,
                      double step = 1e-5);
double fd_check_stream(const StreamFunction& s, const std::vector<Vec2>& pts,
                       double step = 1e-5);

}  // namespace slipstokes
