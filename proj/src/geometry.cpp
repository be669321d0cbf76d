#include "slipstokes/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>

#include "slipstokes/quadrature.hpp"
#include "slipstokes/report.hpp"

namespace slipstokes {

DomainSpec DomainSpec::disk(double R) {
  DomainSpec s;
  s.kind = DomainKind::Disk;
  s.radius = R;
  s.validate();
  return s;
}

DomainSpec DomainSpec::annulus(double R0, double R1) {
  DomainSpec s;
  s.kind = DomainKind::Annulus;
  s.inner_radius = R0;
  s.outer_radius = R1;
  s.validate();
  return s;
}

DomainSpec DomainSpec::channel(double L, double H) {
  DomainSpec s;
  s.kind = DomainKind::Channel;
  s.length = L;
  s.height = H;
  s.validate();
  return s;
}

void DomainSpec::validate() const {
  switch (kind) {
    case DomainKind::Disk:
      if (!(radius > 0)) throw Error("invalid-domain", "disk radius must be positive");
      break;
    case DomainKind::Annulus:
      if (!(inner_radius > 0) || !(outer_radius > inner_radius))
        throw Error("invalid-domain", "annulus requires 0 < R0 < R1");
      break;
    case DomainKind::Channel:
      if (!(length > 0) || !(height > 0))
        throw Error("invalid-domain", "channel requires positive length and height");
      break;
  }
}

int DomainSpec::chart_count() const {
  return kind == DomainKind::Disk ? 1 : 2;
}

double DomainSpec::chart_length(int chart) const {
  switch (kind) {
    case DomainKind::Disk:
      return 2 * M_PI * radius;
    case DomainKind::Annulus:
      return 2 * M_PI * (chart == 0 ? outer_radius : inner_radius);
    case DomainKind::Channel:
      return length;
  }
  return 0;
}

double DomainSpec::diameter() const {
  switch (kind) {
    case DomainKind::Disk:
      return 2 * radius;
    case DomainKind::Annulus:
      return 2 * outer_radius;
    case DomainKind::Channel:
      return std::hypot(length, height);
  }
  return 0;
}

double DomainSpec::min_feature() const {
  switch (kind) {
    case DomainKind::Disk:
      return radius;
    case DomainKind::Annulus:
      return (outer_radius - inner_radius) / 2;
    case DomainKind::Channel:
      return std::min(length / 2, height);
  }
  return 0;
}

const char* DomainSpec::kind_name() const {
  switch (kind) {
    case DomainKind::Disk: return "disk";
    case DomainKind::Annulus: return "annulus";
    case DomainKind::Channel: return "channel";
  }
  return "?";
}

ChartPoint chart_eval(const DomainSpec& spec, int chart, double s) {
  if (chart < 0 || chart >= spec.chart_count())
    throw Error("inconsistent-chart", "chart id out of range");
  ChartPoint p;
  switch (spec.kind) {
    case DomainKind::Disk: {
      double R = spec.radius, th = s / R;
      p.n = Vec2(std::cos(th), std::sin(th));
      p.x = R * p.n;
      p.tau = rot90(p.n);
      p.kappa = 1.0 / R;
      break;
    }
    case DomainKind::Annulus: {
      if (chart == 0) {  // outer circle, ccw
        double R = spec.outer_radius, th = s / R;
        p.n = Vec2(std::cos(th), std::sin(th));
        p.x = R * p.n;
        p.tau = rot90(p.n);
        p.kappa = 1.0 / R;
      } else {  // inner circle, clockwise; outward normal points to the center
        double R = spec.inner_radius, th = -s / R;
        Vec2 e(std::cos(th), std::sin(th));
        p.x = R * e;
        p.n = -e;
        p.tau = rot90(p.n);
        p.kappa = -1.0 / R;
      }
      break;
    }
    case DomainKind::Channel: {
      if (chart == 0) {  // y = 0
        p.x = Vec2(s, 0);
        p.n = Vec2(0, -1);
      } else {  // y = H, tau = (-1, 0)
        p.x = Vec2(spec.length - s, spec.height);
        p.n = Vec2(0, 1);
      }
      p.tau = rot90(p.n);
      p.kappa = 0;
      break;
    }
  }
  return p;
}

Vec2 Mesh::unwrap_near(const Vec2& p, const Vec2& ref) const {
  if (!periodic_x) return p;
  Vec2 q = p;
  if (q.x() - ref.x() > period / 2) q.x() -= period;
  if (ref.x() - q.x() > period / 2) q.x() += period;
  return q;
}

Vec2 Mesh::canonical(const Vec2& p) const {
  if (!periodic_x) return p;
  double x = std::fmod(p.x(), period);
  if (x < 0) x += period;
  return Vec2(x, p.y());
}

Vec2 Mesh::vertex_in_cell(int c, int k) const {
  Vec2 v0 = vertices.row(cells(c, 0));
  Vec2 v = vertices.row(cells(c, k));
  return unwrap_near(v, v0);
}

double Mesh::cell_area(int c) const {
  Vec2 a = vertex_in_cell(c, 0), b = vertex_in_cell(c, 1), d = vertex_in_cell(c, 2);
  return 0.5 * ((b - a).x() * (d - a).y() - (b - a).y() * (d - a).x());
}

namespace {

struct MeshBuilder {
  Mesh mesh;
  std::vector<std::array<double, 2>> verts;
  std::vector<std::array<int, 3>> cells;

  int add_vertex(double x, double y) {
    verts.push_back({x, y});
    return int(verts.size()) - 1;
  }
  void add_quad(int a, int b, int c, int d) {
    // split along the shorter diagonal; deterministic tie-break to (a,c)
    auto p = [&](int i) { return Vec2(verts[i][0], verts[i][1]); };
    Vec2 pa = p(a), pb = p(b), pc = p(c), pd = p(d);
    if (mesh.periodic_x) {
      pb = mesh.unwrap_near(pb, pa);
      pc = mesh.unwrap_near(pc, pa);
      pd = mesh.unwrap_near(pd, pa);
    }
    if ((pc - pa).norm() <= (pd - pb).norm() + 1e-14) {
      cells.push_back({a, b, c});
      cells.push_back({a, c, d});
    } else {
      cells.push_back({a, b, d});
      cells.push_back({b, c, d});
    }
  }
  void finalize() {
    mesh.vertices.resize(int(verts.size()), 2);
    for (size_t i = 0; i < verts.size(); ++i) {
      mesh.vertices(int(i), 0) = verts[i][0];
      mesh.vertices(int(i), 1) = verts[i][1];
    }
    mesh.cells.resize(int(cells.size()), 3);
    for (size_t i = 0; i < cells.size(); ++i)
      for (int k = 0; k < 3; ++k) mesh.cells(int(i), k) = cells[i][k];
    // enforce counterclockwise orientation
    for (int c = 0; c < mesh.n_cells(); ++c) {
      if (mesh.cell_area(c) < 0) std::swap(mesh.cells(c, 1), mesh.cells(c, 2));
      if (!(mesh.cell_area(c) > 0))
        throw Error("meshing-failure", "degenerate cell " + std::to_string(c));
    }
    // maximum edge length
    double h = 0;
    for (int c = 0; c < mesh.n_cells(); ++c)
      for (int k = 0; k < 3; ++k) {
        Vec2 a = mesh.vertex_in_cell(c, k), b = mesh.vertex_in_cell(c, (k + 1) % 3);
        h = std::max(h, (b - a).norm());
      }
    mesh.h = h;
  }

  /// Locate boundary edges (edges owned by exactly one cell) and attach
  /// chart data via the caller-provided classifier.
  void attach_boundary(const std::function<bool(const Vec2&, int&, double&)>& classify) {
    std::map<std::pair<int, int>, std::pair<int, int>> owner;  // sorted edge -> (cell, local)
    std::map<std::pair<int, int>, int> count;
    for (int c = 0; c < mesh.n_cells(); ++c)
      for (int k = 0; k < 3; ++k) {
        int a = mesh.cells(c, k), b = mesh.cells(c, (k + 1) % 3);
        auto key = std::minmax(a, b);
        count[key]++;
        owner[key] = {c, k};
      }
    for (auto& [key, cnt] : count) {
      if (cnt != 1) continue;
      auto [c, k] = owner[key];
      int a = mesh.cells(c, k), b = mesh.cells(c, (k + 1) % 3);
      Vec2 pa = mesh.vertices.row(a), pb = mesh.vertices.row(b);
      int chart_a = -1, chart_b = -1;
      double sa = 0, sb = 0;
      if (!classify(pa, chart_a, sa) || !classify(pb, chart_b, sb) || chart_a != chart_b)
        throw Error("meshing-failure", "boundary edge endpoints not on a common chart");
      double len = mesh.domain.chart_length(chart_a);
      // s must increase along the cell's ccw traversal (domain on the left)
      double s1 = sb;
      while (s1 <= sa) s1 += len;
      if (s1 - sa > len / 2)
        throw Error("meshing-failure", "boundary edge spans an implausible arc");
      mesh.boundary_edges.push_back({c, k, chart_a, sa, s1});
    }
    std::sort(mesh.boundary_edges.begin(), mesh.boundary_edges.end(),
              [](const BoundaryEdge& x, const BoundaryEdge& y) {
                return std::tie(x.chart, x.s0) < std::tie(y.chart, y.s0);
              });
  }
};

double wrap_s(double s, double len) {
  double r = std::fmod(s, len);
  if (r < 0) r += len;
  return r;
}

Mesh build_disk(const DomainSpec& spec, int n) {
  // map the square [-1,1]^2 onto the disk; the square's boundary lands
  // exactly on the circle: u,v on the boundary give u^2(1-v^2/2)+v^2(1-u^2/2)=1
  double R = spec.radius;
  MeshBuilder mb;
  mb.mesh.domain = spec;
  auto map = [&](double u, double v) {
    double x = u * std::sqrt(std::max(0.0, 1.0 - v * v / 2));
    double y = v * std::sqrt(std::max(0.0, 1.0 - u * u / 2));
    return Vec2(R * x, R * y);
  };
  std::vector<std::vector<int>> id(n + 1, std::vector<int>(n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      Vec2 p = map(-1 + 2.0 * i / n, -1 + 2.0 * j / n);
      id[j][i] = mb.add_vertex(p.x(), p.y());
    }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      mb.add_quad(id[j][i], id[j][i + 1], id[j + 1][i + 1], id[j + 1][i]);
  mb.finalize();
  mb.attach_boundary([&](const Vec2& p, int& chart, double& s) {
    if (std::abs(p.norm() - R) > 1e-9 * R) return false;
    chart = 0;
    s = wrap_s(R * std::atan2(p.y(), p.x()), 2 * M_PI * R);
    return true;
  });
  return mb.mesh;
}

Mesh build_annulus(const DomainSpec& spec, int nr, int nt) {
  double R0 = spec.inner_radius, R1 = spec.outer_radius;
  MeshBuilder mb;
  mb.mesh.domain = spec;
  std::vector<std::vector<int>> id(nr + 1, std::vector<int>(nt));
  for (int i = 0; i <= nr; ++i) {
    double r = R0 + (R1 - R0) * i / nr;
    for (int j = 0; j < nt; ++j) {
      double th = 2 * M_PI * j / nt;
      id[i][j] = mb.add_vertex(r * std::cos(th), r * std::sin(th));
    }
  }
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nt; ++j) {
      int j1 = (j + 1) % nt;
      mb.add_quad(id[i][j], id[i][j1], id[i + 1][j1], id[i + 1][j]);
    }
  mb.finalize();
  mb.attach_boundary([&](const Vec2& p, int& chart, double& s) {
    double r = p.norm(), th = std::atan2(p.y(), p.x());
    if (std::abs(r - R1) < 1e-9 * R1) {
      chart = 0;
      s = wrap_s(R1 * th, 2 * M_PI * R1);
      return true;
    }
    if (std::abs(r - R0) < 1e-9 * R1) {
      chart = 1;
      s = wrap_s(-R0 * th, 2 * M_PI * R0);  // inner chart runs clockwise
      return true;
    }
    return false;
  });
  return mb.mesh;
}

Mesh build_channel(const DomainSpec& spec, int nx, int ny) {
  double L = spec.length, H = spec.height;
  MeshBuilder mb;
  mb.mesh.domain = spec;
  mb.mesh.periodic_x = true;
  mb.mesh.period = L;
  std::vector<std::vector<int>> id(ny + 1, std::vector<int>(nx));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i)
      id[j][i] = mb.add_vertex(L * i / nx, H * j / ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int i1 = (i + 1) % nx;
      mb.add_quad(id[j][i], id[j][i1], id[j + 1][i1], id[j + 1][i]);
    }
  mb.finalize();
  mb.attach_boundary([&](const Vec2& p, int& chart, double& s) {
    if (std::abs(p.y()) < 1e-12 * H) {
      chart = 0;
      s = p.x();
      return true;
    }
    if (std::abs(p.y() - H) < 1e-12 * H) {
      chart = 1;
      s = wrap_s(L - p.x(), L);
      return true;
    }
    return false;
  });
  return mb.mesh;
}

}  // namespace

Mesh build_mesh(const DomainSpec& spec, double h_target) {
  spec.validate();
  if (!(h_target > 0) || h_target >= spec.min_feature())
    throw Error("infeasible-resolution",
                std::string("h must satisfy 0 < h < ") + std::to_string(spec.min_feature()) +
                    " for this " + spec.kind_name());
  // Counts grow proportionally to 1/h (any overshoot is corrected by the
  // measured ratio), so halving h halves the produced mesh.h to within a
  // ceil(): refinement levels stay nested in resolution.
  Mesh mesh;
  switch (spec.kind) {
    case DomainKind::Disk: {
      int n = std::max(4, int(std::ceil(2.35 * spec.radius / h_target)));
      mesh = build_disk(spec, n);
      while (mesh.h > h_target) {
        n = std::max(n + 1, int(std::ceil(n * mesh.h / h_target)));
        mesh = build_disk(spec, n);
      }
      break;
    }
    case DomainKind::Annulus: {
      double dr = spec.outer_radius - spec.inner_radius;
      int nr = std::max(2, int(std::ceil(1.45 * dr / h_target)));
      int nt = std::max(8, int(std::ceil(1.45 * 2 * M_PI * spec.outer_radius / h_target)));
      mesh = build_annulus(spec, nr, nt);
      while (mesh.h > h_target) {
        double f = mesh.h / h_target;
        nr = std::max(nr + 1, int(std::ceil(nr * f)));
        nt = std::max(nt + 1, int(std::ceil(nt * f)));
        mesh = build_annulus(spec, nr, nt);
      }
      break;
    }
    case DomainKind::Channel: {
      int nx = std::max(4, int(std::ceil(1.45 * spec.length / h_target)));
      int ny = std::max(2, int(std::ceil(1.45 * spec.height / h_target)));
      mesh = build_channel(spec, nx, ny);
      while (mesh.h > h_target) {
        double f = mesh.h / h_target;
        nx = std::max(nx + 1, int(std::ceil(nx * f)));
        ny = std::max(ny + 1, int(std::ceil(ny * f)));
        mesh = build_channel(spec, nx, ny);
      }
      break;
    }
  }
  mesh.validate();
  return mesh;
}

void Mesh::validate() const {
  for (int c = 0; c < n_cells(); ++c)
    if (!(cell_area(c) > 0))
      throw Error("meshing-failure", "cell " + std::to_string(c) + " is not ccw/positive");
  for (const auto& be : boundary_edges) {
    for (double send : {be.s0, be.s1}) {
      ChartPoint cp = chart_eval(domain, be.chart, send);
      int a = cells(be.cell, be.local_edge);
      int b = cells(be.cell, (be.local_edge + 1) % 3);
      Vec2 pa = vertices.row(a), pb = vertices.row(b);
      double d = std::min((canonical(cp.x) - pa).norm(), (canonical(cp.x) - pb).norm());
      if (d > 1e-12 * std::max(1.0, domain.diameter()))
        throw Error("meshing-failure", "boundary edge endpoint off its chart curve");
      (void)send;
    }
  }
  // boundary edges must close up into one loop per chart
  for (int chart = 0; chart < domain.chart_count(); ++chart) {
    double covered = 0;
    for (const auto& be : boundary_edges)
      if (be.chart == chart) covered += be.s1 - be.s0;
    if (std::abs(covered - domain.chart_length(chart)) > 1e-8 * domain.chart_length(chart))
      throw Error("meshing-failure", "boundary loop on chart " + std::to_string(chart) +
                                         " does not cover the full component");
  }
}

double BoundaryFrame::total_length() const {
  double L = 0;
  for (const auto& p : points) L += p.weight;
  return L;
}

BoundaryFrame boundary_frame(const Mesh& mesh, int quad_order) {
  mesh.validate();
  // Gauss-Legendre nodes on [0,1]; 4 points integrate degree 7 >= order 6
  int npts = std::max(2, (quad_order + 2) / 2);
  std::vector<double> gx, gw;
  gauss_legendre_01(npts, gx, gw);
  BoundaryFrame frame;
  frame.quad_order = quad_order;
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    double len = be.s1 - be.s0;
    for (int q = 0; q < npts; ++q) {
      double s = be.s0 + gx[q] * len;
      ChartPoint cp = chart_eval(mesh.domain, be.chart, s);
      FramePoint fp;
      fp.x = cp.x;
      fp.n = cp.n;
      fp.tau = cp.tau;
      fp.kappa = cp.kappa;
      fp.s = s;
      fp.chart = be.chart;
      fp.weight = gw[q] * len;
      fp.edge = int(e);
      fp.ref_t = gx[q];
      frame.points.push_back(fp);
    }
  }
  return frame;
}

std::vector<Vec2> shape_operator_apply(const BoundaryFrame& frame,
                                       const std::vector<Vec2>& trace) {
  if (trace.size() != frame.points.size())
    throw Error("non-tangential-input", "trace size does not match frame");
  double scale = 1e-300;
  for (const auto& v : trace) scale = std::max(scale, v.norm());
  std::vector<Vec2> out(trace.size());
  for (size_t i = 0; i < trace.size(); ++i) {
    const auto& fp = frame.points[i];
    if (std::abs(trace[i].dot(fp.n)) > 1e-12 * std::max(1.0, scale))
      throw Error("non-tangential-input",
                  "normal component exceeds tolerance at frame point " + std::to_string(i));
    out[i] = fp.kappa * trace[i].dot(fp.tau) * fp.tau;
  }
  return out;
}

double check_navier_curl_identity(const Mesh& mesh, const BoundaryFrame& frame,
                                  const VectorField& v) {
  (void)mesh;
  double scale = 1e-300;
  for (const auto& fp : frame.points) scale = std::max(scale, v.value(fp.x).norm());
  double acc = 0;
  for (const auto& fp : frame.points) {
    Vec2 val = v.value(fp.x);
    if (std::abs(val.dot(fp.n)) > 1e-10 * std::max(1.0, scale))
      throw Error("normal-trace-violation", "v.n exceeds 1e-10 on the boundary");
    Mat2 jac = v.jacobian(fp.x);
    Mat2 strain = 0.5 * (jac + jac.transpose());
    Vec2 dn = strain * fp.n;
    Vec2 lhs = 2.0 * (dn - dn.dot(fp.n) * fp.n);
    double curl = jac(1, 0) - jac(0, 1);
    Vec2 lambda = fp.kappa * val.dot(fp.tau) * fp.tau;
    Vec2 resid = lhs - curl * fp.tau + 2.0 * lambda;
    acc += fp.weight * resid.squaredNorm();
  }
  return std::sqrt(acc);
}

void BallProbe::validate(const DomainSpec& spec) const {
  if (!(r > 0)) throw Error("invalid-probe", "probe radius must be positive");
  if (doubling != 2 && doubling != 3)
    throw Error("invalid-probe", "doubling factor must be 2 or 3");
  if (!(r < spec.diameter() / 8))
    throw Error("invalid-probe", "probe radius must be below diam(Omega)/8");
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "vertices " << mesh.n_vertices() << " cells " << mesh.n_cells()
     << " boundary_edges " << mesh.boundary_edges.size() << "\n";
  for (int v = 0; v < mesh.n_vertices(); ++v)
    os << fmt17(mesh.vertices(v, 0)) << " " << fmt17(mesh.vertices(v, 1)) << "\n";
  for (int c = 0; c < mesh.n_cells(); ++c)
    os << mesh.cells(c, 0) << " " << mesh.cells(c, 1) << " " << mesh.cells(c, 2) << "\n";
  for (const auto& be : mesh.boundary_edges)
    os << be.cell << " " << be.local_edge << " " << be.chart << " " << fmt17(be.s0)
       << " " << fmt17(be.s1) << "\n";
}

}  // namespace slipstokes
