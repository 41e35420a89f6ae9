#pragma once

#include "polyls/mesh.hpp"

#include <functional>
#include <span>

namespace polyls {

/// Barycentric coordinates of x with respect to triangle t.
Eigen::Vector3d barycentric(const SimplicialMesh& mesh, int t, const Point& x);
/// Constant gradients of the three barycentric coordinates of triangle t.
std::array<Point, 3> barycentric_gradients(const SimplicialMesh& mesh, int t);

/// Globally continuous Lagrange field of degree 1 or 2 on a triangulation.
///
/// Node numbering: vertices first, then (degree 2) one midpoint node per edge, at
/// index num_vertices() + edge id. Local node order on a triangle is v0, v1, v2
/// followed by the midpoints of the edges opposite v0, v1, v2.
class ContinuousField {
public:
  ContinuousField() = default;
  ContinuousField(MeshPtr mesh, int degree);
  ContinuousField(MeshPtr mesh, int degree, Vector values);

  static ContinuousField interpolate(MeshPtr mesh, int degree, const std::function<double(const Point&)>& fn);

  int degree() const { return degree_; }
  const SimplicialMesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int num_nodes() const { return static_cast<int>(values_.size()); }
  Point node(int j) const;
  bool is_boundary_node(int j) const;
  std::array<int, 6> triangle_nodes(int t) const;
  int nodes_per_triangle() const { return degree_ == 1 ? 3 : 6; }

  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  std::span<const double> vertex_values() const { return {values_.data(), static_cast<std::size_t>(mesh_->num_vertices())}; }

  double eval(int t, const Point& x) const;
  Point gradient(int t, const Point& x) const;

private:
  MeshPtr mesh_;
  int degree_{1};
  Vector values_;
};

struct ContinuousVectorField {
  ContinuousField x;
  ContinuousField y;

  Point eval(int t, const Point& p) const { return {x.eval(t, p), y.eval(t, p)}; }
};

/// Lagrange shape values at barycentric point `lambda` for degree 1 or 2 (3 or 6 entries).
void lagrange_shape(int degree, const Eigen::Vector3d& lambda, std::span<double> out);
/// Barycentric coordinates of the local Lagrange nodes.
std::vector<Eigen::Vector3d> lagrange_nodes_barycentric(int degree);

}  // namespace polyls
