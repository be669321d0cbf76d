#pragma once

#include "slipstokes/evolution.hpp"

namespace slipstokes {

enum class SweepKind { Steady, Resolvent, StokesEvolution, NSEvolution };
const char* sweep_kind_name(SweepKind k);

struct RateFit {
  double slope = 0;
  double constant = 0;      // max over window of alpha * gap
  double fit_residual = 0;
  std::vector<int> excluded;  // indices dropped (floor / mesh-error guard)
  bool floor_detected = false;
};

/// least squares of log(gap) against log(alpha) over the top `window_decades`
/// decades; points with gap <= 10 * floor are excluded first
RateFit fit_rate(const std::vector<double>& alphas, const std::vector<double>& gaps,
                 double floor, double window_decades = 2.0);

struct AlphaSweepReport {
  SweepKind kind = SweepKind::Steady;
  std::vector<double> alpha;
  std::vector<double> boundary_gap;  // int_0^T int_Gamma |u_a - u_inf|^2 (or single solve)
  std::vector<double> energy_gap;    // sup_t ||u_a - u_inf||^2 + int ||D(u_a - u_inf)||^2
  std::vector<double> h1_gap;
  RateFit boundary_fit, energy_fit, h1_fit;
  double mesh_error_floor = 0;
  double u0_projection_defect = 0;
};

struct SweepData {
  /// initial velocity for evolution kinds (closed form, interpolated per BC)
  std::optional<VectorField> u0;
  /// forcing for steady / resolvent kinds
  std::optional<VectorField> f;
  Complex lambda{0, 0};  // resolvent kind
};

AlphaSweepReport alpha_sweep(const DiscreteModel& model, SweepKind kind,
                             const SweepData& data, const std::vector<double>& grid,
                             const SchemeConfig& scheme, double mesh_error_floor = 0,
                             int threads = 1);

/// steady smoke test; T-integrals replaced by single-solve norms
AlphaSweepReport steady_alpha_limit(const DiscreteModel& model, const VectorField& f,
                                    const std::vector<double>& grid,
                                    double mesh_error_floor = 0);

/// divergence-free field vanishing on the boundary: smooth field times a
/// boundary-distance bump, re-projected; the projection defect is reported
/// by the sweep
VectorField boundary_vanishing_field(const DomainSpec& spec);
/// smooth tangential field with nonzero slip trace
VectorField smooth_tangential_field(const DomainSpec& spec);

}  // namespace slipstokes
