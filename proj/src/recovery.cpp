#include "polyls/recovery.hpp"

#include <cmath>

namespace polyls {

DgField inject_polytopic_to_simplicial(const DgField& field, int degree) {
  if (!field.space.is_polytopic()) throw Error("injection expects a field on a polytopic mesh");
  const DgSpace& src = field.space;
  if (degree < 0) degree = src.basis_kind() == PolyBasisKind::Tensor ? 2 * src.degree() : src.degree();
  const DgSpace target = DgSpace::simplicial(src.fine_ptr(), degree, 2 * degree);
  DgField out(target);
  const int n = target.local_dim();
  double v[kMaxLocalDim];
  // The triangle basis is orthonormal, so the projection is a weighted sum; the rule is
  // exact for the product, so the re-expansion reproduces the parent polynomial.
  for (int t = 0; t < target.num_elements(); ++t) {
    const int e = src.element_of_triangle(t);
    if (e < 0) continue;
    const QuadratureRule rule = target.element_rule(t);
    const int off = target.offset(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      target.eval(t, rule.points[q], v);
      const double f = rule.weights[q] * field.eval(e, rule.points[q]);
      for (int i = 0; i < n; ++i) out.coeffs[off + i] += f * v[i];
    }
  }
  return out;
}

ContinuousField average_local_values(const MeshPtr& mesh, int degree, const Matrix& local_values, BoundaryRule rule,
                                     std::span<const char> active) {
  ContinuousField out(mesh, degree);
  const int npt = out.nodes_per_triangle();
  if (local_values.rows() != mesh->num_triangles() || local_values.cols() != npt) {
    throw Error("local node values do not match the mesh");
  }
  if (!active.empty() && static_cast<int>(active.size()) != mesh->num_triangles()) {
    throw Error("activity flags do not match the mesh");
  }
  Vector sum = Vector::Zero(out.num_nodes());
  Eigen::VectorXi count = Eigen::VectorXi::Zero(out.num_nodes());
  for (int t = 0; t < mesh->num_triangles(); ++t) {
    if (!active.empty() && !active[t]) continue;
    const auto nodes = out.triangle_nodes(t);
    for (int k = 0; k < npt; ++k) {
      sum[nodes[k]] += local_values(t, k);
      ++count[nodes[k]];
    }
  }
  for (int j = 0; j < out.num_nodes(); ++j) {
    if (rule == BoundaryRule::Zero && out.is_boundary_node(j)) {
      out.values()[j] = 0.0;
    } else {
      out.values()[j] = count[j] > 0 ? sum[j] / count[j] : 0.0;
    }
  }
  return out;
}

ContinuousField recover_nodal_average(const DgField& field, int degree, BoundaryRule rule) {
  if (degree < 0) degree = field.space.degree();
  if (degree < 1 || degree > 2) throw Error("recovery supports Lagrange degree 1 or 2");
  const MeshPtr& mesh = field.space.fine_ptr();
  const auto nodes_bary = lagrange_nodes_barycentric(degree);
  const int npt = static_cast<int>(nodes_bary.size());
  Matrix local = Matrix::Zero(mesh->num_triangles(), npt);
  std::vector<char> active(mesh->num_triangles(), 1);
  for (int t = 0; t < mesh->num_triangles(); ++t) {
    const int e = field.space.element_of_triangle(t);
    if (e < 0) {
      active[t] = 0;
      continue;
    }
    const auto& tri = mesh->triangle(t);
    for (int k = 0; k < npt; ++k) {
      const auto& l = nodes_bary[k];
      const Point x = l[0] * mesh->vertex(tri[0]) + l[1] * mesh->vertex(tri[1]) + l[2] * mesh->vertex(tri[2]);
      local(t, k) = field.eval(e, x);
    }
  }
  return average_local_values(mesh, degree, local, rule, active);
}

ContinuousField restrict_to_base(const ContinuousField& fitted_field, const FittedMesh& fitted, const MeshPtr& base) {
  if (fitted_field.mesh_ptr() != fitted.mesh) throw Error("field does not live on the fitted mesh");
  const SimplicialMesh& fine = *fitted.mesh;
  std::vector<std::vector<int>> children(base->num_triangles());
  for (int t = 0; t < fine.num_triangles(); ++t) children[fitted.parent[t]].push_back(t);

  ContinuousField out(base, fitted_field.degree());
  std::vector<char> done(out.num_nodes(), 0);
  const auto nodes_bary = lagrange_nodes_barycentric(out.degree());
  for (int t = 0; t < base->num_triangles(); ++t) {
    const auto nodes = out.triangle_nodes(t);
    const auto& tri = base->triangle(t);
    for (int k = 0; k < out.nodes_per_triangle(); ++k) {
      if (done[nodes[k]]) continue;
      const auto& l = nodes_bary[k];
      const Point x = l[0] * base->vertex(tri[0]) + l[1] * base->vertex(tri[1]) + l[2] * base->vertex(tri[2]);
      int best = -1;
      double best_min = -1e300;
      for (int c : children[t]) {
        const double m = barycentric(fine, c, x).minCoeff();
        if (m > best_min) {
          best_min = m;
          best = c;
        }
      }
      out.values()[nodes[k]] = fitted_field.eval(best, x);
      done[nodes[k]] = 1;
    }
  }
  return out;
}

}  // namespace polyls
