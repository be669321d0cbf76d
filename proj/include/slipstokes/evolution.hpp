#pragma once

#include <functional>

#include "slipstokes/solve.hpp"

namespace slipstokes {

struct SchemeConfig {
  double theta = 0.5;   // 1 = implicit Euler, 0.5 = trapezoidal
  double dt = 0.01;
  double T = 0.5;
  enum class Convection { None, SemiImplicitSkew };
  Convection convection = Convection::None;
  bool kernel_filter = false;     // drop the rigid-motion component of u0
  bool resume = false;            // restart: skip initial projection/filtering
  std::vector<double> time_grid;  // optional nonuniform grid (t0 = 0 included)
  double t_offset = 0;            // absolute start time for forcing evaluation

  void validate() const;
  std::vector<double> grid() const;  // resolved time grid starting at 0
};

/// Per-time-step energy accounting.  Dissipation/friction increments are the
/// theta-point quadratic forms, which makes the trapezoidal balance an
/// algebraic identity; energy_residual additionally subtracts the cumulative
/// forcing work, so it stays meaningful for f != 0.
struct EvolutionTrace {
  std::vector<double> t, kinetic, cum_dissipation, cum_friction, norm_Du, norm_dudt,
      energy_residual;
};

/// time-dependent load vector (already assembled, constrained layout)
using Forcing = std::function<VecX<double>(double t)>;

struct EvolutionResult {
  EvolutionTrace trace;
  VecX<double> u_final;
  double u0_projection_defect = 0;  // norm removed to make u0 divergence-free
};

using StepCallback = std::function<void(int step, double t, const VecX<double>& u)>;

EvolutionResult evolve_stokes(const OperatorSet& ops, const VecX<double>& u0,
                              const Forcing& f, const SchemeConfig& cfg,
                              const StepCallback& cb = {});

EvolutionResult evolve_navier_stokes(const OperatorSet& ops, const VecX<double>& u0,
                                     const SchemeConfig& cfg, const StepCallback& cb = {});

/// Skew-symmetric convection matrix N(w) with b(w;u,v) = ((w.grad)u, v)/2 -
/// ((w.grad)v, u)/2; u^T N(w) u = 0 for every w, u.
SpMat<double> convection_matrix(const OperatorSet& ops, const VecX<double>& w);

struct SmoothingReport {
  double sup_sqrt_t_Du = 0;  // sup over dyadic t of sqrt(t) ||D u(t)|| / ||u0||
  double sup_t_dudt = 0;     // sup over dyadic t of t ||du/dt(t)|| / ||u0||
  std::vector<double> times;
};
SmoothingReport measure_smoothing(const EvolutionTrace& trace, double norm_u0);

struct DecayFit {
  double delta_hat = 0;
  double fit_residual = 0;
  bool insufficient_decay = false;  // window too short; warning, not an error
};
DecayFit fit_decay(const EvolutionTrace& trace, double t_lo, double t_hi);

struct ForcingMember {
  std::string name;
  Forcing load;
  std::function<double(double)> norm2;  // ||f(t)||_{L2}^2
};
struct MaxRegReport {
  struct Row {
    std::string name;
    double ratio = 0;  // [int ||du/dt||^2 + ||A u||^2] / int ||f||^2
  };
  std::vector<Row> rows;
  double max_ratio = 0;
};
MaxRegReport maximal_regularity_ratio(const OperatorSet& ops,
                                      const std::vector<ForcingMember>& family,
                                      const SchemeConfig& cfg);

}  // namespace slipstokes
