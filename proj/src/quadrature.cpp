#include "slipstokes/quadrature.hpp"

#include <cmath>
#include <map>

namespace slipstokes {

namespace {

void push_perm3(TriangleRule& r, double a, double b, double c, double w) {
  // barycentric (a,b,c) -> reference coords (xi,eta) = (b,c) with l0 = a
  auto add = [&](double l1, double l2, double wt) {
    r.points.emplace_back(l1, l2);
    r.weights.push_back(wt * 0.5);  // weights normalized to sum 1 in source tables
  };
  auto close = [](double x, double y) { return std::abs(x - y) < 1e-12; };
  if (close(a, b) && close(b, c)) {
    add(b, c, w);
    return;
  }
  if (close(b, c)) {  // 3 permutations of (a,b,b)
    add(b, b, w);
    add(a, b, w);
    add(b, a, w);
    return;
  }
  // 6 permutations
  add(b, c, w);
  add(c, a, w);
  add(a, b, w);
  add(c, b, w);
  add(a, c, w);
  add(b, a, w);
}

TriangleRule make_rule(int degree) {
  TriangleRule r;
  r.degree = degree;
  if (degree <= 4) {
    r.degree = 4;
    push_perm3(r, 0.108103018168070, 0.445948490915965, 0.445948490915965,
               0.223381589678011);
    push_perm3(r, 0.816847572980459, 0.091576213509771, 0.091576213509771,
               0.109951743655322);
  } else if (degree <= 6) {
    r.degree = 6;
    push_perm3(r, 0.501426509658179, 0.249286745170910, 0.249286745170910,
               0.116786275726379);
    push_perm3(r, 0.873821971016996, 0.063089014491502, 0.063089014491502,
               0.050844906370207);
    push_perm3(r, 0.053145049844817, 0.310352451033784, 0.636502499121399,
               0.082851075618374);
  } else {
    r.degree = 8;
    push_perm3(r, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.144315607677787);
    push_perm3(r, 0.081414823414554, 0.459292588292723, 0.459292588292723,
               0.095091634413075);
    push_perm3(r, 0.658861384496480, 0.170569307751760, 0.170569307751760,
               0.103217370534718);
    push_perm3(r, 0.898905543365938, 0.050547228317031, 0.050547228317031,
               0.032458497623198);
    push_perm3(r, 0.008394777409958, 0.263112829634638, 0.728492392955404,
               0.027230314174435);
  }
  return r;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  static const TriangleRule r4 = make_rule(4);
  static const TriangleRule r6 = make_rule(6);
  static const TriangleRule r8 = make_rule(8);
  if (degree <= 4) return r4;
  if (degree <= 6) return r6;
  return r8;
}

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  // Newton iteration on Legendre polynomials; nodes on [-1,1] then shifted.
  x.assign(n, 0);
  w.assign(n, 0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
      }
      pp = n * (z * p0 - p1) / (z * z - 1);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    double wi = 2.0 / ((1 - z * z) * pp * pp);
    x[i] = 0.5 * (1 - z);
    x[n - 1 - i] = 0.5 * (1 + z);
    w[i] = 0.5 * wi;
    w[n - 1 - i] = 0.5 * wi;
  }
}

}  // namespace slipstokes
