#pragma once

#include <vector>

#include "slipstokes/core.hpp"

namespace slipstokes {

/// Quadrature rule on the reference triangle {(0,0),(1,0),(0,1)};
/// weights sum to the reference area 1/2.
struct TriangleRule {
  std::vector<Vec2> points;   // (xi, eta)
  std::vector<double> weights;
  int degree = 0;
};

/// Symmetric rules exact to the given polynomial degree (4, 6 or 8).
const TriangleRule& triangle_rule(int degree);

/// Gauss-Legendre nodes/weights on [0, 1]; n points integrate degree 2n-1.
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace slipstokes
