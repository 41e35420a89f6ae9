#include "polyls/continuous_field.hpp"

namespace polyls {

Eigen::Vector3d barycentric(const SimplicialMesh& mesh, int t, const Point& x) {
  const auto& tri = mesh.triangle(t);
  const Point& a = mesh.vertex(tri[0]);
  const Point& b = mesh.vertex(tri[1]);
  const Point& c = mesh.vertex(tri[2]);
  const double twice = 2.0 * mesh.area(t);
  const double l1 = cross(c - x, a - x) / twice;  // weight of b
  const double l2 = cross(a - x, b - x) / twice;  // weight of c
  return {1.0 - l1 - l2, l1, l2};
}

std::array<Point, 3> barycentric_gradients(const SimplicialMesh& mesh, int t) {
  const auto& tri = mesh.triangle(t);
  const double twice = 2.0 * mesh.area(t);
  std::array<Point, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Point& p = mesh.vertex(tri[(i + 1) % 3]);
    const Point& q = mesh.vertex(tri[(i + 2) % 3]);
    // Gradient of the coordinate that is 1 at vertex i: rotate the opposite edge.
    g[i] = Point(p.y() - q.y(), q.x() - p.x()) / twice;
  }
  return g;
}

void lagrange_shape(int degree, const Eigen::Vector3d& l, std::span<double> out) {
  if (degree == 1) {
    out[0] = l[0];
    out[1] = l[1];
    out[2] = l[2];
    return;
  }
  out[0] = l[0] * (2 * l[0] - 1);
  out[1] = l[1] * (2 * l[1] - 1);
  out[2] = l[2] * (2 * l[2] - 1);
  out[3] = 4 * l[1] * l[2];
  out[4] = 4 * l[2] * l[0];
  out[5] = 4 * l[0] * l[1];
}

std::vector<Eigen::Vector3d> lagrange_nodes_barycentric(int degree) {
  std::vector<Eigen::Vector3d> nodes{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  if (degree == 2) {
    nodes.emplace_back(0, 0.5, 0.5);
    nodes.emplace_back(0.5, 0, 0.5);
    nodes.emplace_back(0.5, 0.5, 0);
  }
  return nodes;
}

ContinuousField::ContinuousField(MeshPtr mesh, int degree) : mesh_(std::move(mesh)), degree_(degree) {
  if (degree_ != 1 && degree_ != 2) throw Error("continuous fields support degree 1 or 2");
  const int n = mesh_->num_vertices() + (degree_ == 2 ? mesh_->num_edges() : 0);
  values_ = Vector::Zero(n);
}

ContinuousField::ContinuousField(MeshPtr mesh, int degree, Vector values) : ContinuousField(std::move(mesh), degree) {
  if (values.size() != values_.size()) throw Error("continuous field value count does not match node count");
  values_ = std::move(values);
}

ContinuousField ContinuousField::interpolate(MeshPtr mesh, int degree, const std::function<double(const Point&)>& fn) {
  ContinuousField out(std::move(mesh), degree);
  for (int j = 0; j < out.num_nodes(); ++j) out.values_[j] = fn(out.node(j));
  return out;
}

Point ContinuousField::node(int j) const {
  const int nv = mesh_->num_vertices();
  if (j < nv) return mesh_->vertex(j);
  const auto& e = mesh_->edge(j - nv);
  return 0.5 * (mesh_->vertex(e.v[0]) + mesh_->vertex(e.v[1]));
}

bool ContinuousField::is_boundary_node(int j) const {
  const int nv = mesh_->num_vertices();
  return j < nv ? mesh_->is_boundary_vertex(j) : mesh_->is_boundary_edge(j - nv);
}

std::array<int, 6> ContinuousField::triangle_nodes(int t) const {
  const auto& tri = mesh_->triangle(t);
  std::array<int, 6> ids{tri[0], tri[1], tri[2], -1, -1, -1};
  if (degree_ == 2) {
    const auto& te = mesh_->triangle_edges(t);
    const int nv = mesh_->num_vertices();
    ids[3] = nv + te[0];
    ids[4] = nv + te[1];
    ids[5] = nv + te[2];
  }
  return ids;
}

double ContinuousField::eval(int t, const Point& x) const {
  const auto ids = triangle_nodes(t);
  std::array<double, 6> shape{};
  lagrange_shape(degree_, barycentric(*mesh_, t, x), shape);
  double v = 0.0;
  for (int i = 0; i < nodes_per_triangle(); ++i) v += shape[i] * values_[ids[i]];
  return v;
}

Point ContinuousField::gradient(int t, const Point& x) const {
  const auto ids = triangle_nodes(t);
  const auto g = barycentric_gradients(*mesh_, t);
  if (degree_ == 1) return values_[ids[0]] * g[0] + values_[ids[1]] * g[1] + values_[ids[2]] * g[2];
  const auto l = barycentric(*mesh_, t, x);
  Point out = Point::Zero();
  for (int i = 0; i < 3; ++i) out += values_[ids[i]] * (4 * l[i] - 1) * g[i];
  out += values_[ids[3]] * 4 * (l[1] * g[2] + l[2] * g[1]);
  out += values_[ids[4]] * 4 * (l[2] * g[0] + l[0] * g[2]);
  out += values_[ids[5]] * 4 * (l[0] * g[1] + l[1] * g[0]);
  return out;
}

}  // namespace polyls
