#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "slipstokes/limits.hpp"

using namespace slipstokes;

namespace {
std::vector<double> geometric_time_grid(double t0, double T, int n) {
  std::vector<double> g = {0.0};
  for (int i = 0; i <= n; ++i) g.push_back(t0 * std::pow(T / t0, double(i) / n));
  return g;
}
}  // namespace

TEST_CASE("fit_rate recovers an exact power law") {
  std::vector<double> alphas, gaps;
  for (int i = 0; i <= 8; ++i) {
    double a = std::pow(10.0, i * 0.5);
    alphas.push_back(a);
    gaps.push_back(3.0 / a);
  }
  RateFit fit = fit_rate(alphas, gaps, 0.0);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(fit.constant == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit.excluded.empty());
  CHECK(!fit.floor_detected);
}

TEST_CASE("fit_rate trims points on the solver floor") {
  std::vector<double> alphas, gaps;
  for (int i = 0; i <= 8; ++i) {
    double a = std::pow(10.0, i * 0.5);
    alphas.push_back(a);
    gaps.push_back(std::max(3.0 / (a * a * a), 1e-12));
  }
  // the top of the window saturates at the floor and is excluded
  RateFit fit = fit_rate(alphas, gaps, 1e-12);
  CHECK(fit.floor_detected);
  CHECK(!fit.excluded.empty());
  // the fit uses what remains and still sees the power law
  CHECK(fit.slope <= -2.9);
}

TEST_CASE("fit_rate needs at least four points") {
  CHECK_THROWS_WITH_AS(fit_rate({1, 10, 100}, {1, 0.1, 0.01}, 0.0),
                       doctest::Contains("degenerate-fit"), Error);
}

TEST_CASE("steady channel limit matches the slip poiseuille closed form") {
  DomainSpec spec = DomainSpec::channel(2.0, 1.0);
  DiscreteModel model = make_model(spec, 0.15);
  std::vector<double> grid;
  for (int i = 0; i <= 8; ++i) grid.push_back(std::pow(10.0, i * 0.5));
  AlphaSweepReport rep = steady_alpha_limit(model, constant_field(Vec2(1, 0)), grid);
  double H = spec.height, L = spec.length;
  for (size_t i = 0; i < grid.size(); ++i) {
    double shift = H / (2 * grid[i]);
    // gap field is the constant shift: boundary gap over both walls
    double exact_b = 2 * L * shift * shift;
    CHECK(rep.boundary_gap[i] == doctest::Approx(exact_b).epsilon(1e-8));
    // energy gap = L2 norm^2 of the constant (dissipation gap vanishes)
    double exact_e = L * H * shift * shift;
    CHECK(rep.energy_gap[i] == doctest::Approx(exact_e).epsilon(1e-8));
  }
  CHECK(rep.boundary_fit.slope == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("steady sweep with zero forcing has zero gaps") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.3);
  std::vector<double> grid = {1, 10, 100, 1000, 10000};
  VectorField zero = constant_field(Vec2(0, 0));
  AlphaSweepReport rep = [&] {
    SweepData data;
    data.f = zero;
    SchemeConfig dummy;
    // gaps all zero: the rate fit degenerates by construction
    try {
      return alpha_sweep(model, SweepKind::Steady, data, grid, dummy);
    } catch (const Error& e) {
      CHECK(std::string(e.code()) == "degenerate-fit");
      return AlphaSweepReport{};
    }
  }();
  (void)rep;
}

TEST_CASE("steady disk sweep: boundary gap slope below -0.95") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.25);
  std::vector<double> grid;
  for (int i = 0; i <= 8; ++i) grid.push_back(std::pow(10.0, i * 0.5));
  Poly2 x = Poly2::monomial(1, 0), y = Poly2::monomial(0, 1);
  Poly2 w = Poly2::monomial(0, 0, 1.0) - (x * x + y * y);
  VectorField f = from_stream((x * w * w).stream());
  AlphaSweepReport rep = steady_alpha_limit(model, f, grid);
  CHECK(rep.boundary_fit.slope <= -0.95);
  // gap monotone over the top three decades within 5 percent
  for (size_t i = 3; i < grid.size(); ++i)
    CHECK(rep.boundary_gap[i] <= rep.boundary_gap[i - 1] * 1.05);
}

TEST_CASE("stokes evolution sweep rates on the disk") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.25);
  std::vector<double> grid;
  for (int i = 0; i <= 8; ++i) grid.push_back(std::pow(10.0, i * 0.5));
  SchemeConfig cfg;
  cfg.theta = 1.0;
  cfg.time_grid = geometric_time_grid(1e-7, 0.5, 42);
  SweepData smooth;
  smooth.u0 = smooth_tangential_field(DomainSpec::disk(1.0));
  AlphaSweepReport rep = alpha_sweep(model, SweepKind::StokesEvolution, smooth, grid, cfg);
  CHECK(rep.boundary_fit.slope <= -0.95);
  SweepData vanishing;
  vanishing.u0 = boundary_vanishing_field(DomainSpec::disk(1.0));
  AlphaSweepReport rep2 =
      alpha_sweep(model, SweepKind::StokesEvolution, vanishing, grid, cfg, 0.0, 2);
  CHECK(rep2.boundary_fit.slope <= -0.95);
  CHECK(rep2.energy_fit.slope <= -0.95);
  CHECK(rep2.u0_projection_defect < 1e-2);
  // twin consistency at the top of the grid: the slip trace is tiny
  OperatorSet slip = assemble(model, SlipCoefficient::constant_alpha(grid.back()));
  VecX<double> u0s = model.space->interpolate(*vanishing.u0, false);
  SchemeConfig one = cfg;
  auto res = evolve_stokes(slip, u0s, Forcing{}, one);
  double trace2 = slip.boundary_norm2(VecX<double>(res.u_final));
  double l2 = slip.norm_L2(res.u_final);
  CHECK(std::sqrt(trace2) <= 1e-3 * std::max(l2, 1e-12) + 1e-9);
}

TEST_CASE("navier-stokes evolution sweep rates on the disk") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.3);
  std::vector<double> grid;
  for (int i = 0; i <= 4; ++i) grid.push_back(std::pow(10.0, double(i)));
  SchemeConfig cfg;
  cfg.theta = 1.0;
  cfg.time_grid = geometric_time_grid(1e-6, 0.5, 36);
  SweepData vanishing;
  vanishing.u0 = boundary_vanishing_field(DomainSpec::disk(1.0));
  AlphaSweepReport rep =
      alpha_sweep(model, SweepKind::NSEvolution, vanishing, grid, cfg, 0.0, 2);
  CHECK(rep.boundary_fit.slope <= -0.95);
  CHECK(rep.energy_fit.slope <= -0.95);
}

TEST_CASE("resolvent sweep at real lambda decays in alpha") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.3);
  std::vector<double> grid;
  for (int i = 0; i <= 4; ++i) grid.push_back(std::pow(10.0, double(i)));
  SweepData data;
  Poly2 x = Poly2::monomial(1, 0), y = Poly2::monomial(0, 1);
  Poly2 w = Poly2::monomial(0, 0, 1.0) - (x * x + y * y);
  data.f = from_stream((x * w * w).stream());
  data.lambda = Complex(20.0, 0.0);
  SchemeConfig dummy;
  AlphaSweepReport rep = alpha_sweep(model, SweepKind::Resolvent, data, grid, dummy);
  CHECK(rep.boundary_fit.slope <= -0.95);
}

TEST_CASE("sweep rejects short alpha grids") {
  DiscreteModel model = make_model(DomainSpec::disk(1.0), 0.3);
  SweepData data;
  data.f = constant_field(Vec2(1, 0));
  SchemeConfig dummy;
  CHECK_THROWS_AS(alpha_sweep(model, SweepKind::Steady, data, {1, 10, 100}, dummy), Error);
}
