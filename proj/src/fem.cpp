#include "slipstokes/fem.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace slipstokes {

void p2_shape(const Vec2& xi, Eigen::Matrix<double, 6, 1>& N,
              Eigen::Matrix<double, 6, 2>& dN) {
  double l1 = xi.x(), l2 = xi.y(), l0 = 1 - l1 - l2;
  N << l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), 4 * l0 * l1,
      4 * l1 * l2, 4 * l2 * l0;
  // d/dxi, d/deta with dl0 = (-1,-1), dl1 = (1,0), dl2 = (0,1)
  dN(0, 0) = -(4 * l0 - 1);
  dN(0, 1) = -(4 * l0 - 1);
  dN(1, 0) = 4 * l1 - 1;
  dN(1, 1) = 0;
  dN(2, 0) = 0;
  dN(2, 1) = 4 * l2 - 1;
  dN(3, 0) = 4 * (l0 - l1);
  dN(3, 1) = -4 * l1;
  dN(4, 0) = 4 * l2;
  dN(4, 1) = 4 * l1;
  dN(5, 0) = -4 * l2;
  dN(5, 1) = 4 * (l0 - l2);
}

void p1_shape(const Vec2& xi, Eigen::Matrix<double, 3, 1>& N,
              Eigen::Matrix<double, 3, 2>& dN) {
  N << 1 - xi.x() - xi.y(), xi.x(), xi.y();
  dN << -1, -1, 1, 0, 0, 1;
}

Vec2 edge_point(int local_edge, double t) {
  switch (local_edge) {
    case 0: return Vec2(t, 0);          // vertices 0 -> 1
    case 1: return Vec2(1 - t, t);      // vertices 1 -> 2
    default: return Vec2(0, 1 - t);     // vertices 2 -> 0
  }
}

FunctionSpace::FunctionSpace(const Mesh& mesh) : mesh_(&mesh) {
  // edge table
  std::map<std::pair<int, int>, int> edge_id;
  cell_edges_.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int k = 0; k < 3; ++k) {
      int a = mesh.cells(c, k), b = mesh.cells(c, (k + 1) % 3);
      auto key = std::minmax(a, b);
      auto it = edge_id.find(key);
      int id;
      if (it == edge_id.end()) {
        id = int(edges_.size());
        edge_id[key] = id;
        edges_.push_back({key.first, key.second});
      } else {
        id = it->second;
      }
      cell_edges_[c][k] = id;
    }

  // node coordinates: vertices, then edge midpoints (boundary edges take the
  // chart arc midpoint so boundary cells are curved)
  node_xy_.resize(n_vnodes(), 2);
  node_xy_.topRows(n_vertices()) = mesh.vertices;
  for (int e = 0; e < n_edges(); ++e) {
    Vec2 a = mesh.vertices.row(edges_[e][0]);
    Vec2 b = mesh.unwrap_near(mesh.vertices.row(edges_[e][1]), a);
    node_xy_.row(n_vertices() + e) = mesh.canonical(0.5 * (a + b));
  }

  // boundary classification: chart arclength of each boundary node
  boundary_of_node_.assign(n_vnodes(), -1);
  std::vector<std::pair<int, double>> node_chart(n_vnodes(), {-1, 0.0});
  for (const auto& be : mesh.boundary_edges) {
    int a = mesh.cells(be.cell, be.local_edge);
    int b = mesh.cells(be.cell, (be.local_edge + 1) % 3);
    node_chart[a] = {be.chart, be.s0};
    node_chart[b] = {be.chart, be.s1};
    auto key = std::minmax(a, b);
    int e = edge_id.at(key);
    double smid = 0.5 * (be.s0 + be.s1);
    node_chart[n_vertices() + e] = {be.chart, smid};
    node_xy_.row(n_vertices() + e) =
        mesh.canonical(chart_eval(mesh.domain, be.chart, smid).x);
  }
  for (int v = 0; v < n_vnodes(); ++v) {
    if (node_chart[v].first < 0) continue;
    boundary_of_node_[v] = int(boundary_nodes_.size());
    boundary_nodes_.push_back(v);
    ChartPoint cp = chart_eval(mesh.domain, node_chart[v].first, node_chart[v].second);
    boundary_n_.push_back(cp.n);
    boundary_tau_.push_back(cp.tau);
  }

  // constraint maps
  {
    std::vector<Triplet> ts, td;
    int cs = 0, cd = 0;
    for (int v = 0; v < n_vnodes(); ++v) {
      if (boundary_of_node_[v] < 0) {
        ts.emplace_back(2 * v, cs++, 1.0);
        ts.emplace_back(2 * v + 1, cs++, 1.0);
        td.emplace_back(2 * v, cd++, 1.0);
        td.emplace_back(2 * v + 1, cd++, 1.0);
      } else {
        Vec2 tau = boundary_tau_[boundary_of_node_[v]];
        ts.emplace_back(2 * v, cs, tau.x());
        ts.emplace_back(2 * v + 1, cs, tau.y());
        ++cs;
      }
    }
    R_slip_.resize(2 * n_vnodes(), cs);
    R_slip_.setFromTriplets(ts.begin(), ts.end());
    R_slip_.makeCompressed();
    R_dirichlet_.resize(2 * n_vnodes(), cd);
    R_dirichlet_.setFromTriplets(td.begin(), td.end());
    R_dirichlet_.makeCompressed();
  }
}

std::array<int, 6> FunctionSpace::cell_nodes(int c) const {
  std::array<int, 6> n;
  for (int k = 0; k < 3; ++k) n[k] = mesh_->cells(c, k);
  for (int k = 0; k < 3; ++k) n[3 + k] = edge_node(cell_edges_[c][k]);
  return n;
}

Eigen::Matrix<double, 6, 2> FunctionSpace::cell_node_coords(int c) const {
  Eigen::Matrix<double, 6, 2> X;
  Vec2 ref = mesh_->vertex_in_cell(c, 0);
  auto nodes = cell_nodes(c);
  for (int k = 0; k < 6; ++k) {
    Vec2 p = mesh_->unwrap_near(node_xy_.row(nodes[k]), ref);
    X.row(k) = p;
  }
  return X;
}

void FunctionSpace::map_cell(int c, const Vec2& xi, Vec2& x, Mat2& jac) const {
  Eigen::Matrix<double, 6, 1> N;
  Eigen::Matrix<double, 6, 2> dN;
  p2_shape(xi, N, dN);
  Eigen::Matrix<double, 6, 2> X = cell_node_coords(c);
  x = (X.transpose() * N);
  jac = (X.transpose() * dN);
}

VecX<double> FunctionSpace::interpolate(const VectorField& v, bool dirichlet) const {
  const SpMat<double>& R = restriction(dirichlet);
  VecX<double> out = VecX<double>::Zero(R.cols());
  int cs = 0;
  for (int nd = 0; nd < n_vnodes(); ++nd) {
    Vec2 val = v.value(node_position(nd));
    if (boundary_of_node_[nd] < 0) {
      out[cs++] = val.x();
      out[cs++] = val.y();
    } else if (!dirichlet) {
      out[cs++] = val.dot(boundary_tau_[boundary_of_node_[nd]]);
    }
  }
  return out;
}

VecX<double> FunctionSpace::interpolate_pressure(const ScalarField& p) const {
  VecX<double> out(n_pressure());
  for (int v = 0; v < n_pressure(); ++v) out[v] = p.value(mesh_->vertices.row(v));
  return out;
}

}  // namespace slipstokes
