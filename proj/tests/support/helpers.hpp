#pragma once

#include "polyls/dg_space.hpp"
#include "polyls/polytopic_mesh.hpp"

#include <cmath>
#include <functional>
#include <memory>

namespace testing_helpers {

using namespace polyls;

inline MeshPtr make(SimplicialMesh m) { return std::make_shared<const SimplicialMesh>(std::move(m)); }

/// Square mesh of [-1,1]^2 agglomerated into its n x n cells (two triangles each).
inline PolytopicMeshPtr cell_mesh(int n) {
  auto mesh = make(square_mesh(n));
  std::vector<int> part(mesh->num_triangles());
  const double h = 2.0 / n;
  for (int t = 0; t < mesh->num_triangles(); ++t) {
    const Point b = mesh->barycenter(t);
    const int i = std::min(n - 1, static_cast<int>((b.x() + 1.0) / h));
    const int j = std::min(n - 1, static_cast<int>((b.y() + 1.0) / h));
    part[t] = j * n + i;
  }
  return std::make_shared<const PolytopicMesh>(mesh, part);
}

inline double l2_error(const DgField& u, const std::function<double(const Point&)>& exact, int order = 8) {
  double s = 0.0;
  for (int e = 0; e < u.space.num_elements(); ++e) {
    const QuadratureRule rule = u.space.element_rule(e, order);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double d = u.eval(e, rule.points[q]) - exact(rule.points[q]);
      s += rule.weights[q] * d * d;
    }
  }
  return std::sqrt(s);
}

}  // namespace testing_helpers
