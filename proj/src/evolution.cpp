#include "slipstokes/evolution.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <memory>

namespace slipstokes {

void SchemeConfig::validate() const {
  if (theta != 1.0 && theta != 0.5)
    throw Error("invalid-scheme", "theta must be 1 (implicit Euler) or 1/2 (trapezoidal)");
  if (time_grid.empty()) {
    if (!(dt > 0) || !(T > 0) || !(dt < T))
      throw Error("invalid-scheme", "need 0 < dt < T");
  } else {
    if (time_grid.front() != 0)
      throw Error("invalid-scheme", "time grid must start at 0");
    for (size_t i = 1; i < time_grid.size(); ++i)
      if (!(time_grid[i] > time_grid[i - 1]))
        throw Error("invalid-scheme", "time grid must increase strictly");
  }
}

std::vector<double> SchemeConfig::grid() const {
  if (!time_grid.empty()) return time_grid;
  int n = int(std::llround(T / dt));
  if (n < 1) n = 1;
  std::vector<double> g(n + 1);
  for (int i = 0; i <= n; ++i) g[i] = T * double(i) / double(n);
  return g;
}

SpMat<double> convection_matrix(const OperatorSet& ops, const VecX<double>& w) {
  const FunctionSpace& space = *ops.space;
  const Mesh& mesh = *ops.mesh;
  VecX<double> wfull = ops.R * w;
  const int nfull = 2 * space.n_vnodes();
  std::vector<Triplet> trips;
  const TriangleRule& rule = triangle_rule(6);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    Eigen::Matrix<double, 6, 2> X = space.cell_node_coords(c);
    auto nodes = space.cell_nodes(c);
    Eigen::Matrix<double, 6, 6> C = Eigen::Matrix<double, 6, 6>::Zero();
    for (size_t kq = 0; kq < rule.points.size(); ++kq) {
      Eigen::Matrix<double, 6, 1> N;
      Eigen::Matrix<double, 6, 2> dN;
      p2_shape(rule.points[kq], N, dN);
      Mat2 J = X.transpose() * dN;
      double wq = rule.weights[kq] * J.determinant();
      Eigen::Matrix<double, 6, 2> g = dN * J.inverse();
      Vec2 wval = Vec2::Zero();
      for (int a = 0; a < 6; ++a)
        for (int i = 0; i < 2; ++i) wval[i] += wfull[2 * nodes[a] + i] * N[a];
      // scalar advection core: C(a,b) = int N_a (w . grad N_b)
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) C(a, b) += wq * N[a] * g.row(b).dot(wval);
    }
    // vector form ((w.grad)u, v) is block-diagonal in components;
    // entry (test a, trial b) of the skew form is (C(a,b) - C(b,a))/2
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        if (C(a, b) == 0 && C(b, a) == 0) continue;
        double skew = 0.5 * (C(a, b) - C(b, a));
        for (int i = 0; i < 2; ++i)
          trips.emplace_back(2 * nodes[a] + i, 2 * nodes[b] + i, skew);
      }
  }
  SpMat<double> Nf = from_triplets_stable(nfull, nfull, trips);
  SpMat<double> Rt = SpMat<double>(ops.R.transpose());
  return SpMat<double>(Rt * Nf * ops.R);
}

namespace {

struct Stepper {
  const OperatorSet& ops;
  SchemeConfig cfg;
  Forcing forcing;
  bool navier;

  EvolutionResult run(const VecX<double>& u0_in, const StepCallback& cb) {
    cfg.validate();
    std::vector<double> grid = cfg.grid();
    const int nsteps = int(grid.size()) - 1;
    const double theta = cfg.theta;
    // uniform runs step with one exact dt so that stints of a split run use
    // bitwise-identical steps ("identical step sequences")
    const bool uniform = cfg.time_grid.empty();
    const double dt_uniform = uniform ? cfg.T / nsteps : 0.0;

    // project the initial state onto the discretely divergence-free subspace
    // (resumed runs continue an already conditioned state verbatim)
    VecX<double> u0 = u0_in;
    EvolutionResult out;
    if (!cfg.resume) {
      auto proj = helmholtz_project(ops, u0);
      out.u0_projection_defect = ops.norm_L2(VecX<double>(u0 - proj.projected));
      u0 = proj.projected;
      if (cfg.kernel_filter) {
        auto kernel = rigid_kernel(ops);
        if (kernel) {
          double c = kernel->dot(ops.M * u0);
          u0 -= c * (*kernel);
        }
      }
    }

    SpMat<double> A = ops.K + ops.B;
    EvolutionTrace& tr = out.trace;
    auto push = [&](double t, double kinetic, double cum_d, double cum_f, double ndu,
                    double ndudt, double resid) {
      tr.t.push_back(t);
      tr.kinetic.push_back(kinetic);
      tr.cum_dissipation.push_back(cum_d);
      tr.cum_friction.push_back(cum_f);
      tr.norm_Du.push_back(ndu);
      tr.norm_dudt.push_back(ndudt);
      tr.energy_residual.push_back(resid);
    };

    VecX<double> u = u0;
    double kin0 = 0.5 * u.dot(ops.M * u);
    double cum_d = 0, cum_f = 0, cum_work = 0;
    push(0, kin0, 0, 0, ops.norm_Du(u), 0, 0);
    if (cb) cb(0, cfg.t_offset, u);

    std::unique_ptr<SaddleSolver<double>> solver;
    double last_dt = -1;
    bool constant_matrix = !navier;
    VecX<double> F_n;
    if (forcing) F_n = forcing(cfg.t_offset);

    for (int n = 0; n < nsteps; ++n) {
      double dt = uniform ? dt_uniform : grid[n + 1] - grid[n];
      SpMat<double> Aeff = A;
      if (navier) Aeff = A + convection_matrix(ops, u);
      if (!solver || !constant_matrix || dt != last_dt) {
        SpMat<double> lhs = SpMat<double>((1.0 / dt) * ops.M) + SpMat<double>(theta * Aeff);
        solver = std::make_unique<SaddleSolver<double>>(lhs, ops.D, ops.pressure_mean);
        last_dt = dt;
      }
      VecX<double> rhs = (1.0 / dt) * (ops.M * u) - (1 - theta) * (Aeff * u);
      VecX<double> F_np1;
      if (forcing) {
        F_np1 = forcing(cfg.t_offset + grid[n + 1]);
        rhs += theta * F_np1 + (1 - theta) * F_n;
      }
      VecX<double> u_new;
      try {
        u_new = solver->solve_velocity_rhs(rhs).u;
      } catch (const Error& e) {
        throw Error("step-failure",
                    "time step at t = " + std::to_string(grid[n + 1]) + ": " + e.what());
      }
      VecX<double> umid = theta * u_new + (1 - theta) * u;
      double diss = dt * umid.dot(ops.K * umid);
      double fric = dt * umid.dot(ops.B * umid);
      cum_d += diss;
      cum_f += fric;
      if (forcing) {
        VecX<double> Fmid = theta * F_np1 + (1 - theta) * F_n;
        cum_work += dt * Fmid.dot(umid);
        F_n = F_np1;
      }
      double kin = 0.5 * u_new.dot(ops.M * u_new);
      double kin_prev = 0.5 * u.dot(ops.M * u);
      if (navier && !forcing && kin > kin_prev * (1 + 1e-6) + 1e-300)
        throw Error("divergence-alarm",
                    "kinetic energy grew at t = " + std::to_string(grid[n + 1]));
      double ndudt = ops.norm_L2(VecX<double>((u_new - u) / dt));
      push(grid[n + 1], kin, cum_d, cum_f, ops.norm_Du(u_new), ndudt,
           kin + cum_d + cum_f - kin0 - cum_work);
      u = u_new;
      if (cb) cb(n + 1, cfg.t_offset + grid[n + 1], u);
    }
    out.u_final = u;
    return out;
  }
};

}  // namespace

EvolutionResult evolve_stokes(const OperatorSet& ops, const VecX<double>& u0,
                              const Forcing& f, const SchemeConfig& cfg,
                              const StepCallback& cb) {
  if (cfg.convection != SchemeConfig::Convection::None)
    throw Error("invalid-scheme", "evolve_stokes is linear; use evolve_navier_stokes");
  Stepper st{ops, cfg, f, /*navier=*/false};
  return st.run(u0, cb);
}

EvolutionResult evolve_navier_stokes(const OperatorSet& ops, const VecX<double>& u0,
                                     const SchemeConfig& cfg, const StepCallback& cb) {
  if (cfg.convection != SchemeConfig::Convection::SemiImplicitSkew)
    throw Error("invalid-scheme", "navier-stokes evolution requires skew convection");
  Stepper st{ops, cfg, Forcing{}, /*navier=*/true};
  return st.run(u0, cb);
}

SmoothingReport measure_smoothing(const EvolutionTrace& trace, double norm_u0) {
  SmoothingReport rep;
  if (trace.t.size() < 2 || norm_u0 <= 0)
    throw Error("invalid-trace", "smoothing needs a populated f = 0 trace");
  double T = trace.t.back();
  double dt_min = trace.t[1] - trace.t[0];
  for (size_t i = 1; i < trace.t.size(); ++i)
    dt_min = std::min(dt_min, trace.t[i] - trace.t[i - 1]);
  for (double t = T; t >= dt_min * (1 - 1e-9); t /= 2) {
    // nearest trace point
    size_t best = 0;
    double db = 1e300;
    for (size_t i = 1; i < trace.t.size(); ++i) {
      double d = std::abs(trace.t[i] - t);
      if (d < db) {
        db = d;
        best = i;
      }
    }
    double tt = trace.t[best];
    rep.times.push_back(tt);
    rep.sup_sqrt_t_Du =
        std::max(rep.sup_sqrt_t_Du, std::sqrt(tt) * trace.norm_Du[best] / norm_u0);
    rep.sup_t_dudt = std::max(rep.sup_t_dudt, tt * trace.norm_dudt[best] / norm_u0);
  }
  return rep;
}

DecayFit fit_decay(const EvolutionTrace& trace, double t_lo, double t_hi) {
  DecayFit out;
  std::vector<double> x, y;
  for (size_t i = 0; i < trace.t.size(); ++i) {
    if (trace.t[i] < t_lo || trace.t[i] > t_hi) continue;
    double norm_u = std::sqrt(std::max(0.0, 2 * trace.kinetic[i]));
    if (norm_u <= 0) continue;
    x.push_back(trace.t[i]);
    y.push_back(std::log(norm_u));
  }
  if (x.size() < 2) throw Error("degenerate-fit", "decay window holds < 2 samples");
  LineFit f = fit_line(x, y);
  out.delta_hat = -f.slope;
  out.fit_residual = f.residual;
  out.insufficient_decay =
      !(trace.kinetic.back() <= 1e-6 * trace.kinetic.front() + 1e-300);
  return out;
}

MaxRegReport maximal_regularity_ratio(const OperatorSet& ops,
                                      const std::vector<ForcingMember>& family,
                                      const SchemeConfig& cfg) {
  MaxRegReport rep;
  Eigen::SimplicialLLT<SpMat<double>> mass(ops.M);
  if (mass.info() != Eigen::Success) throw Error("singular-operator", "mass llt");
  SpMat<double> KB = ops.K + ops.B;
  for (const auto& member : family) {
    std::vector<double> au2;  // ||A u(t)||^2 at step ends
    SchemeConfig c = cfg;
    VecX<double> u0 = VecX<double>::Zero(ops.n_u());
    auto cb = [&](int, double, const VecX<double>& u) {
      VecX<double> z = KB * u;
      au2.push_back(z.dot(mass.solve(z)));
    };
    EvolutionResult res = evolve_stokes(ops, u0, member.load, c, cb);
    const EvolutionTrace& tr = res.trace;
    double num = 0, den = 0;
    for (size_t i = 1; i < tr.t.size(); ++i) {
      double dt = tr.t[i] - tr.t[i - 1];
      num += dt * (tr.norm_dudt[i] * tr.norm_dudt[i] + au2[i]);
      den += dt * member.norm2(tr.t[i]);
    }
    double ratio = den > 0 ? num / den : 0;
    rep.rows.push_back({member.name, ratio});
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  return rep;
}

}  // namespace slipstokes
