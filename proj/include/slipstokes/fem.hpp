#pragma once

#include <array>
#include <vector>

#include "slipstokes/geometry.hpp"
#include "slipstokes/quadrature.hpp"

namespace slipstokes {

/// P2 shape functions on the reference triangle; node order: vertices 0..2,
/// then midside nodes 3,4,5 on edges (0,1), (1,2), (2,0).
void p2_shape(const Vec2& xi, Eigen::Matrix<double, 6, 1>& N,
              Eigen::Matrix<double, 6, 2>& dN);
void p1_shape(const Vec2& xi, Eigen::Matrix<double, 3, 1>& N,
              Eigen::Matrix<double, 3, 2>& dN);

/// Reference coordinate of a point on local edge k at parameter t in [0,1].
Vec2 edge_point(int local_edge, double t);

/// Taylor-Hood (P2 velocity / P1 pressure) space on a triangulated curved
/// domain.  Boundary-adjacent cells carry a quadratic geometric map whose
/// boundary midside node lies on the analytic chart, so curved cells are
/// isoparametric; interior cells degenerate to affine maps.
class FunctionSpace {
 public:
  explicit FunctionSpace(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  int n_vertices() const { return mesh_->n_vertices(); }
  int n_edges() const { return int(edges_.size()); }
  int n_vnodes() const { return n_vertices() + n_edges(); }
  int n_pressure() const { return n_vertices(); }

  int edge_node(int edge) const { return n_vertices() + edge; }
  int cell_edge(int c, int k) const { return cell_edges_[c][k]; }
  /// global velocity-node ids of cell c in P2 local order
  std::array<int, 6> cell_nodes(int c) const;
  /// physical coordinates of cell c's six geometric nodes (periodic-unwrapped)
  Eigen::Matrix<double, 6, 2> cell_node_coords(int c) const;

  Vec2 node_position(int node) const { return node_xy_.row(node); }

  bool node_on_boundary(int node) const { return boundary_of_node_[node] >= 0; }
  /// index into boundary_nodes() for a boundary node, -1 otherwise
  int boundary_index(int node) const { return boundary_of_node_[node]; }
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }
  Vec2 boundary_normal(int bindex) const { return boundary_n_[bindex]; }
  Vec2 boundary_tangent(int bindex) const { return boundary_tau_[bindex]; }

  /// Map from constrained velocity coefficients to the full 2*n_vnodes
  /// Cartesian layout (x0,y0,x1,y1,...).  Slip keeps one tangential dof per
  /// boundary node; Dirichlet drops boundary nodes entirely.
  const SpMat<double>& restriction(bool dirichlet) const {
    return dirichlet ? R_dirichlet_ : R_slip_;
  }
  int n_constrained(bool dirichlet) const {
    return int((dirichlet ? R_dirichlet_ : R_slip_).cols());
  }

  /// Nodal interpolation of a closed-form field into the constrained space;
  /// tangential components are the field's projection onto tau.
  VecX<double> interpolate(const VectorField& v, bool dirichlet) const;
  VecX<double> interpolate_pressure(const ScalarField& p) const;

  /// Geometric map of cell c at reference point xi: physical point and
  /// jacobian (d x / d xi).
  void map_cell(int c, const Vec2& xi, Vec2& x, Mat2& jac) const;

 private:
  const Mesh* mesh_;
  std::vector<std::array<int, 2>> edges_;           // sorted vertex pairs
  std::vector<std::array<int, 3>> cell_edges_;      // per cell, local order
  Eigen::Matrix<double, Eigen::Dynamic, 2> node_xy_;
  std::vector<int> boundary_of_node_;
  std::vector<int> boundary_nodes_;
  std::vector<Vec2> boundary_n_, boundary_tau_;
  SpMat<double> R_slip_, R_dirichlet_;
};

}  // namespace slipstokes
