#pragma once

#include "slipstokes/solve.hpp"

namespace slipstokes {

struct LocalEstimateRecord {
  BallProbe probe;
  Complex lambda{0, 0};
  double p = 2;       // exponent (2 for caccioppoli)
  double lhs = 0, rhs = 0, ratio = 0;
  double h = 0;
  bool degenerate = false;  // 0/0 or rhs at roundoff
};

/// Integral of a pointwise functional of (u, grad u) over Omega intersected
/// with the ball, by cell-wise quadrature; cells cut by the circle are
/// subdivided (depth levels) and leaf triangles are clipped against the
/// chord through the circle crossings.
struct BallIntegrand {
  // w * f(x, u, grad u) accumulated; u evaluated from full Cartesian coeffs
  std::function<double(const Vec2& x, const Eigen::Matrix<Complex, 2, 1>& u,
                       const Eigen::Matrix<Complex, 2, 2>& grad)>
      f;
  bool needs_gradient = true;
};
double ball_integrate(const OperatorSet& ops, const VecX<Complex>& ufull,
                      const Vec2& center, double radius, const BallIntegrand& integrand,
                      int subdivision_depth = 4);
/// measure |Omega ∩ B_r| with the same quadrature (self-check + means)
double ball_measure(const OperatorSet& ops, const Vec2& center, double radius,
                    int subdivision_depth = 4);

/// Caccioppoli quotient: lhs = int_{B_s} |D(u)|^2,
/// rhs = (t - s)^{-2} int_{B_t} |u|^2, for resolvent solutions whose forcing
/// vanishes on B_t (checked against the caller-provided support distance).
LocalEstimateRecord caccioppoli_check(const OperatorSet& ops, const VecX<Complex>& u,
                                      Complex lambda, const BallProbe& probe, double s,
                                      double t, double f_support_distance);

/// Weak reverse Hoelder quotient with mean-normalized integrals:
/// lhs = (avg_{B_r} |u|^p)^{1/p}, rhs = (avg_{B_{2r}} |u|^2)^{1/2}.
LocalEstimateRecord reverse_holder_check(const OperatorSet& ops, const VecX<Complex>& u,
                                         Complex lambda, const BallProbe& probe, double p,
                                         double f_support_distance);

/// Forcing supported away from all probes: a compact rotational bump at
/// x_f with radius rho (zero outside).
VectorField bump_vortex(const Vec2& x_f, double rho, double amplitude = 1.0);

}  // namespace slipstokes
