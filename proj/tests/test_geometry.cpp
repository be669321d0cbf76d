#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "slipstokes/geometry.hpp"
#include "slipstokes/fields.hpp"

using namespace slipstokes;

namespace {

std::vector<VectorField> smooth_suite(const DomainSpec& spec) {
  std::vector<VectorField> fields;
  Poly2 x = Poly2::monomial(1, 0), y = Poly2::monomial(0, 1);
  switch (spec.kind) {
    case DomainKind::Disk:
    case DomainKind::Annulus: {
      fields.push_back(rigid_rotation());
      Poly2 r2 = x * x + y * y;
      fields.push_back(poly_field(y * r2 * (-1.0), x * r2));      // (-y,x) r^2
      fields.push_back(poly_field(y * r2 * r2 * (-1.0), x * r2 * r2));
      break;
    }
    case DomainKind::Channel: {
      double H = spec.height, L = spec.length;
      fields.push_back(poly_field(y * (Poly2::monomial(0, 0, H) - y), Poly2()));
      fields.push_back(constant_field(Vec2(1, 0)));
      StreamFunction s = stream_product(
          fn_sin(2 * M_PI / L), fn_poly({0, 0, H * H, -2 * H, 1}));
      fields.push_back(from_stream(s));
      break;
    }
  }
  return fields;
}

}  // namespace

TEST_CASE("disk mesh boundary vertices on the circle") {
  Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.2);
  CHECK(mesh.h <= 0.2);
  std::set<int> bverts;
  for (const auto& be : mesh.boundary_edges) {
    bverts.insert(mesh.cells(be.cell, be.local_edge));
    bverts.insert(mesh.cells(be.cell, (be.local_edge + 1) % 3));
  }
  CHECK(bverts.size() > 10);
  for (int v : bverts) {
    Vec2 p = mesh.vertices.row(v);
    CHECK(std::abs(p.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("annulus mesh has exactly two boundary loops") {
  Mesh mesh = build_mesh(DomainSpec::annulus(0.5, 1.0), 0.1);
  std::set<int> charts;
  for (const auto& be : mesh.boundary_edges) charts.insert(be.chart);
  CHECK(charts == std::set<int>{0, 1});
  mesh.validate();  // loop closure = full arclength coverage per chart
}

TEST_CASE("channel boundary edges only on the walls") {
  Mesh mesh = build_mesh(DomainSpec::channel(2.0, 1.0), 0.1);
  for (const auto& be : mesh.boundary_edges) {
    int a = mesh.cells(be.cell, be.local_edge);
    int b = mesh.cells(be.cell, (be.local_edge + 1) % 3);
    for (int v : {a, b}) {
      double yv = mesh.vertices(v, 1);
      CHECK((std::abs(yv) < 1e-13 || std::abs(yv - 1.0) < 1e-13));
    }
  }
}

TEST_CASE("cells are counterclockwise with positive area") {
  for (auto spec : {DomainSpec::disk(1.0), DomainSpec::annulus(0.5, 1.0),
                    DomainSpec::channel(2.0, 1.0)}) {
    Mesh mesh = build_mesh(spec, 0.2);
    for (int c = 0; c < mesh.n_cells(); ++c) CHECK(mesh.cell_area(c) > 0);
  }
}

TEST_CASE("refinement halves h within ten percent") {
  for (auto spec : {DomainSpec::disk(1.0), DomainSpec::annulus(0.5, 1.0),
                    DomainSpec::channel(2.0, 1.0)}) {
    double h = 0.2;
    Mesh m0 = build_mesh(spec, h);
    Mesh m1 = build_mesh(spec, h / 2);
    Mesh m2 = build_mesh(spec, h / 4);
    double r1 = m1.h / m0.h, r2 = m2.h / m1.h;
    CHECK(r1 >= 0.45);
    CHECK(r1 <= 0.55);
    CHECK(r2 >= 0.45);
    CHECK(r2 <= 0.55);
  }
}

TEST_CASE("infeasible resolution rejected") {
  CHECK_THROWS_WITH_AS(build_mesh(DomainSpec::annulus(0.5, 1.0), 0.3),
                       doctest::Contains("infeasible-resolution"), Error);
  CHECK_THROWS_AS(build_mesh(DomainSpec::disk(1.0), -0.1), Error);
}

TEST_CASE("frame: curvature exact on all charts") {
  Mesh disk = build_mesh(DomainSpec::disk(2.0), 0.4);
  BoundaryFrame fd = boundary_frame(disk, 6);
  for (const auto& p : fd.points) CHECK(p.kappa == doctest::Approx(0.5).epsilon(1e-14));

  Mesh ann = build_mesh(DomainSpec::annulus(0.5, 1.0), 0.12);
  BoundaryFrame fa = boundary_frame(ann, 6);
  for (const auto& p : fa.points) {
    if (p.chart == 0) CHECK(p.kappa == doctest::Approx(1.0));
    else CHECK(p.kappa == doctest::Approx(-2.0));
  }

  Mesh ch = build_mesh(DomainSpec::channel(2.0, 1.0), 0.2);
  for (const auto& p : boundary_frame(ch, 6).points) CHECK(p.kappa == 0.0);
}

TEST_CASE("frame vectors are unit and orthogonal") {
  for (auto spec : {DomainSpec::disk(1.0), DomainSpec::annulus(0.5, 1.0),
                    DomainSpec::channel(2.0, 1.0)}) {
    Mesh mesh = build_mesh(spec, 0.2);
    for (const auto& p : boundary_frame(mesh, 6).points) {
      CHECK(std::abs(p.n.norm() - 1) < 1e-14);
      CHECK(std::abs(p.tau.norm() - 1) < 1e-14);
      CHECK(std::abs(p.n.dot(p.tau)) < 1e-14);
    }
  }
}

TEST_CASE("dn/ds = kappa tau by finite differences on the chart") {
  for (auto spec : {DomainSpec::disk(1.5), DomainSpec::annulus(0.5, 1.0)}) {
    for (int chart = 0; chart < spec.chart_count(); ++chart) {
      double L = spec.chart_length(chart);
      for (double s : {0.1 * L, 0.37 * L, 0.77 * L}) {
        double ds = 1e-4 * L;
        ChartPoint pm = chart_eval(spec, chart, s - ds);
        ChartPoint p0 = chart_eval(spec, chart, s);
        ChartPoint pp = chart_eval(spec, chart, s + ds);
        Vec2 dn = (pp.n - pm.n) / (2 * ds);
        CHECK((dn - p0.kappa * p0.tau).norm() <= 10.0 * ds * ds + 1e-10);
      }
    }
  }
}

TEST_CASE("shape operator on the flat wall vanishes") {
  Mesh mesh = build_mesh(DomainSpec::channel(2.0, 1.0), 0.2);
  BoundaryFrame frame = boundary_frame(mesh, 6);
  std::vector<Vec2> trace(frame.points.size());
  for (size_t i = 0; i < trace.size(); ++i) trace[i] = 3.0 * frame.points[i].tau;
  auto out = shape_operator_apply(frame, trace);
  for (const auto& v : out) CHECK(v.norm() == 0.0);
}

TEST_CASE("shape operator equals kappa (v.tau) tau on the disk") {
  Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.2);
  BoundaryFrame frame = boundary_frame(mesh, 6);
  std::vector<Vec2> trace(frame.points.size());
  for (size_t i = 0; i < trace.size(); ++i) trace[i] = frame.points[i].tau;
  auto out = shape_operator_apply(frame, trace);
  for (size_t i = 0; i < out.size(); ++i)
    CHECK((out[i] - frame.points[i].tau).norm() < 1e-13);
  for (auto& t : trace) t *= 3.0;
  auto out3 = shape_operator_apply(frame, trace);
  for (size_t i = 0; i < out3.size(); ++i)
    CHECK((out3[i] - 3.0 * frame.points[i].tau).norm() < 1e-12);
}

TEST_CASE("shape operator rejects non-tangential input") {
  Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.2);
  BoundaryFrame frame = boundary_frame(mesh, 6);
  std::vector<Vec2> trace(frame.points.size());
  for (size_t i = 0; i < trace.size(); ++i) trace[i] = frame.points[i].n;
  CHECK_THROWS_WITH_AS(shape_operator_apply(frame, trace),
                       doctest::Contains("non-tangential-input"), Error);
}

TEST_CASE("navier curl identity: rigid rotation is exact") {
  Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.2);
  BoundaryFrame frame = boundary_frame(mesh, 6);
  CHECK(check_navier_curl_identity(mesh, frame, rigid_rotation()) < 1e-10);
}

TEST_CASE("navier curl identity: channel shear is exact") {
  DomainSpec spec = DomainSpec::channel(2.0, 1.0);
  Mesh mesh = build_mesh(spec, 0.2);
  BoundaryFrame frame = boundary_frame(mesh, 6);
  Poly2 y = Poly2::monomial(0, 1);
  VectorField shear = poly_field(y * (Poly2::monomial(0, 0, spec.height) - y), Poly2());
  CHECK(check_navier_curl_identity(mesh, frame, shear) < 1e-10);
}

TEST_CASE("navier curl identity: cubic azimuthal field on the disk") {
  Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.2);
  BoundaryFrame frame = boundary_frame(mesh, 6);
  Poly2 x = Poly2::monomial(1, 0), y = Poly2::monomial(0, 1);
  Poly2 r2 = x * x + y * y;
  VectorField v = poly_field(y * r2 * (-1.0), x * r2);
  CHECK(check_navier_curl_identity(mesh, frame, v) < 1e-8);
}

TEST_CASE("navier curl identity holds across the smooth suite") {
  for (auto spec : {DomainSpec::disk(1.0), DomainSpec::annulus(0.5, 1.0),
                    DomainSpec::channel(2.0, 1.0)}) {
    Mesh mesh = build_mesh(spec, 0.15);
    BoundaryFrame frame = boundary_frame(mesh, 6);
    for (const auto& v : smooth_suite(spec))
      CHECK(check_navier_curl_identity(mesh, frame, v) < 1e-8);
  }
}

TEST_CASE("normal trace violation detected") {
  Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.2);
  BoundaryFrame frame = boundary_frame(mesh, 6);
  VectorField bad = constant_field(Vec2(1, 0));
  CHECK_THROWS_WITH_AS(check_navier_curl_identity(mesh, frame, bad),
                       doctest::Contains("normal-trace-violation"), Error);
}

TEST_CASE("ball probe respects the diameter bound") {
  DomainSpec spec = DomainSpec::disk(1.0);
  BallProbe ok{Vec2(0.1, 0.0), 0.2, 2};
  ok.validate(spec);
  BallProbe bad{Vec2(0, 0), 0.3, 2};
  CHECK_THROWS_AS(bad.validate(spec), Error);
  BallProbe bad2{Vec2(0, 0), 0.1, 4};
  CHECK_THROWS_AS(bad2.validate(spec), Error);
}

TEST_CASE("mesh export format") {
  Mesh mesh = build_mesh(DomainSpec::channel(2.0, 1.0), 0.5);
  std::ostringstream os;
  write_mesh(os, mesh);
  std::istringstream is(os.str());
  std::string kw;
  int nv, nc, nb;
  is >> kw >> nv;
  CHECK(kw == "vertices");
  is >> kw >> nc;
  CHECK(kw == "cells");
  is >> kw >> nb;
  CHECK(kw == "boundary_edges");
  CHECK(nv == mesh.n_vertices());
  CHECK(nc == mesh.n_cells());
  CHECK(nb == int(mesh.boundary_edges.size()));
}
