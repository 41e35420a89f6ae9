#pragma once

#include "polyls/polytopic_mesh.hpp"

#include <vector>

namespace polyls {

struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  double measure() const;
  void append(const QuadratureRule& other);
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Rule on the reference triangle (0,0),(1,0),(0,1) exact for total degree <= order.
/// Orders up to 4 use symmetric rules with positive weights; higher orders use a
/// collapsed (Duffy) Gauss product rule.
const QuadratureRule& reference_triangle_rule(int order);

QuadratureRule triangle_rule(const Point& a, const Point& b, const Point& c, int order);
QuadratureRule triangle_rule(const SimplicialMesh& mesh, int t, int order);

/// Union of the mapped triangle rules over the element's fine triangles.
QuadratureRule quadrature_on_element(const PolytopicMesh& mesh, int element, int order = 4);

/// Gauss rule on the segment [a, b] exact for degree <= order in arclength.
QuadratureRule face_quadrature(const Point& a, const Point& b, int order = 4);
QuadratureRule face_quadrature(const PolytopicFace& face, int order = 4);

}  // namespace polyls
