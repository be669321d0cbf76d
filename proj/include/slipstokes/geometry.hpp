#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "slipstokes/core.hpp"
#include "slipstokes/fields.hpp"

namespace slipstokes {

enum class DomainKind { Disk, Annulus, Channel };

/// Curved 2D computational domain with exact boundary parametrizations.
/// Charts are periodic arclength parametrizations, one per boundary
/// component, oriented so that walking along the tangent keeps the domain
/// on the left:
///   disk      chart 0: circle radius R, counterclockwise
///   annulus   chart 0: outer circle (ccw), chart 1: inner circle (cw)
///   channel   chart 0: wall y=0 (+x direction), chart 1: wall y=H (-x);
///             the ends x=0, x=L are identified (periodic)
struct DomainSpec {
  DomainKind kind = DomainKind::Disk;
  double radius = 1.0;                      // disk
  double inner_radius = 0.5, outer_radius = 1.0;  // annulus
  double length = 2.0, height = 1.0;        // channel

  static DomainSpec disk(double R);
  static DomainSpec annulus(double R0, double R1);
  static DomainSpec channel(double L, double H);

  void validate() const;
  int chart_count() const;
  double chart_length(int chart) const;
  double diameter() const;
  /// smallest geometric feature; build_mesh requires h below it
  double min_feature() const;
  const char* kind_name() const;
};

/// Frame of a boundary chart at arclength s: position, outward unit normal,
/// unit tangent with (n, tau) direct (tau = rot90(n)), and curvature kappa
/// defined by dn/ds = kappa * tau.  This puts kappa = +1/R on the outer
/// circle and -1/R0 on the inner circle of the annulus.
struct ChartPoint {
  Vec2 x, n, tau;
  double kappa = 0;
};
ChartPoint chart_eval(const DomainSpec& spec, int chart, double s);

struct BoundaryEdge {
  int cell = -1;
  int local_edge = -1;  // edge k joins cell vertices (k, (k+1)%3)
  int chart = -1;
  double s0 = 0, s1 = 0;  // arclength interval along the chart, s1 > s0 (unwrapped)
};

struct Mesh {
  DomainSpec domain;
  Eigen::Matrix<double, Eigen::Dynamic, 2> vertices;  // canonical coords; channel x in [0,L)
  Eigen::Matrix<int, Eigen::Dynamic, 3> cells;        // counterclockwise
  std::vector<BoundaryEdge> boundary_edges;
  double h = 0;  // maximum edge length
  bool periodic_x = false;
  double period = 0;

  int n_vertices() const { return int(vertices.rows()); }
  int n_cells() const { return int(cells.rows()); }

  /// Coordinates of vertex `v` as seen from cell `c`; unwraps the periodic
  /// seam so cell-local geometry is contiguous.
  Vec2 vertex_in_cell(int c, int k) const;
  /// Unwrap an arbitrary point near reference coordinate ref (same sheet).
  Vec2 unwrap_near(const Vec2& p, const Vec2& ref) const;
  Vec2 canonical(const Vec2& p) const;

  double cell_area(int c) const;  // straight-edged area (positive)
  void validate() const;
};

Mesh build_mesh(const DomainSpec& spec, double h_target);

/// Per boundary quadrature point data, evaluated from the analytic chart.
struct FramePoint {
  Vec2 x, n, tau;
  double kappa = 0;
  double s = 0;       // chart arclength
  int chart = -1;
  double weight = 0;  // quadrature weight including the exact measure ds
  int edge = -1;      // index into mesh.boundary_edges
  double ref_t = 0;   // position along the edge, in (0,1), endpoint order (s0,s1)
};

struct BoundaryFrame {
  std::vector<FramePoint> points;
  int quad_order = 6;
  double total_length() const;
};

BoundaryFrame boundary_frame(const Mesh& mesh, int quad_order = 6);

/// Shape operator on the trace: Lambda v = kappa (v.tau) tau, pointwise at
/// the frame quadrature points.  Input must be tangential.
std::vector<Vec2> shape_operator_apply(const BoundaryFrame& frame,
                                       const std::vector<Vec2>& trace);

/// Boundary L2 norm of  2[(Dv)n]_tau - (curl v) tau + 2 Lambda v  for a
/// closed-form tangential field v; curl v is the scalar d1 v2 - d2 v1.
double check_navier_curl_identity(const Mesh& mesh, const BoundaryFrame& frame,
                                  const VectorField& v);

struct BallProbe {
  Vec2 center;
  double r = 0;
  int doubling = 2;  // 2 or 3
  void validate(const DomainSpec& spec) const;  // enforces r < diam/8
};

/// Plain-text mesh export: header "vertices N cells M boundary_edges K",
/// then one line per entity, coordinates with 17 significant digits.
void write_mesh(std::ostream& os, const Mesh& mesh);

}  // namespace slipstokes
