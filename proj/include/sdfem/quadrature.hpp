#pragma once

#include <array>
#include <vector>

#include "sdfem/mesh.hpp"

namespace sdfem {

/// A quadrature rule on a generic triangle, stored in barycentric
/// coordinates. Weights are fractions of the triangle area (they sum to 1).
struct TriangleRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
  int level = 0;

  std::size_t size() const { return weights.size(); }
};

/// Degree-5 symmetric 7-point rule applied on each of the 4^level congruent
/// sub-triangles from repeated midpoint subdivision.
const TriangleRule& quad_rule(int level);

/// Integrates f over the triangle with vertices p using `rule`.
template <class F>
double integrate(const std::array<Point, 3>& p, double area, const TriangleRule& rule, F&& f) {
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& l = rule.bary[q];
    const Point x{l[0] * p[0].x + l[1] * p[1].x + l[2] * p[2].x,
                  l[0] * p[0].y + l[1] * p[1].y + l[2] * p[2].y};
    sum += rule.weights[q] * f(x);
  }
  return sum * area;
}

}  // namespace sdfem
