#include "polyls/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace polyls {

std::vector<double> perturb_zero_values(const SimplicialMesh& mesh, std::span<const double> phi_vertex) {
  if (static_cast<int>(phi_vertex.size()) < mesh.num_vertices()) throw Error("level-set data missing vertex values");
  std::vector<double> out(phi_vertex.begin(), phi_vertex.begin() + mesh.num_vertices());
  std::vector<double> scale(out.size(), 0.0);
  bool any_zero = false;
  for (double v : out) any_zero |= (v == 0.0);
  if (!any_zero) return out;
  for (const auto& e : mesh.edges()) {
    const double s = std::max(std::abs(out[e.v[0]]), std::abs(out[e.v[1]]));
    scale[e.v[0]] = std::max(scale[e.v[0]], s);
    scale[e.v[1]] = std::max(scale[e.v[1]], s);
  }
  for (std::size_t v = 0; v < out.size(); ++v) {
    if (out[v] == 0.0) out[v] = 1e-12 * (scale[v] > 0 ? scale[v] : 1.0);
  }
  return out;
}

std::vector<int> mark_cut_triangles(const SimplicialMesh& mesh, std::span<const double> phi_vertex) {
  const auto values = perturb_zero_values(mesh, phi_vertex);
  std::vector<int> marked;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    int sum = 0;
    for (int v : mesh.triangle(t)) sum += values[v] > 0 ? 1 : -1;
    if (std::abs(sum) < 3) marked.push_back(t);
  }
  return marked;
}

std::vector<int> FittedMesh::interface_vertices() const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(vertex_phi.size()); ++v) {
    if (vertex_phi[v] == 0.0) out.push_back(v);
  }
  return out;
}

int FittedMesh::count(Sign s) const { return static_cast<int>(std::count(sign.begin(), sign.end(), s)); }

double FittedMesh::area(Sign s) const {
  double a = 0.0;
  for (int t = 0; t < mesh->num_triangles(); ++t) {
    if (sign[t] == s) a += mesh->area(t);
  }
  return a;
}

FittedMesh refine_to_fit(const MeshPtr& base, std::span<const double> phi_vertex, const FitOptions& options) {
  const SimplicialMesh& mesh = *base;
  std::vector<double> w = perturb_zero_values(mesh, phi_vertex);
  for (double v : w) {
    if (!std::isfinite(v)) throw Error("level-set data is not finite");
  }

  // Roots next to an endpoint snap onto it; the endpoint becomes an interface vertex.
  std::vector<char> snapped(w.size(), 0);
  for (const auto& e : mesh.edges()) {
    const double a = w[e.v[0]];
    const double b = w[e.v[1]];
    if (a * b >= 0) continue;
    const double t = a / (a - b);
    if (t < options.snap_tolerance) snapped[e.v[0]] = 1;
    else if (1.0 - t < options.snap_tolerance) snapped[e.v[1]] = 1;
  }
  for (std::size_t v = 0; v < w.size(); ++v) {
    if (snapped[v]) w[v] = 0.0;
  }

  std::vector<Point> vertices = mesh.vertices();
  std::vector<double> vertex_phi = w;
  std::vector<int> edge_vertex(mesh.num_edges(), -1);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& edge = mesh.edge(e);
    const double a = w[edge.v[0]];
    const double b = w[edge.v[1]];
    if (a * b >= 0) continue;
    const double t = a / (a - b);
    edge_vertex[e] = static_cast<int>(vertices.size());
    vertices.push_back((1.0 - t) * mesh.vertex(edge.v[0]) + t * mesh.vertex(edge.v[1]));
    vertex_phi.push_back(0.0);
  }

  std::vector<Triangle> triangles;
  std::vector<int> parent;
  std::vector<Sign> sign;
  triangles.reserve(mesh.num_triangles() + 64);
  auto sign_of = [&](int v) { return vertex_phi[v] < 0 ? -1 : 1; };
  auto emit = [&](Triangle tri, Sign s, int t) {
    triangles.push_back(tri);
    parent.push_back(t);
    sign.push_back(s);
  };

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    const auto& te = mesh.triangle_edges(t);
    int splits = 0;
    for (int i = 0; i < 3; ++i) splits += edge_vertex[te[i]] >= 0;
    if (splits == 0) {
      Sign s = 1;
      for (int v : tri) {
        if (vertex_phi[v] < 0) s = -1;
      }
      emit(tri, s, t);
    } else if (splits == 1) {
      int i = 0;
      while (edge_vertex[te[i]] < 0) ++i;
      const int vi = tri[i], vj = tri[(i + 1) % 3], vk = tri[(i + 2) % 3];
      const int m = edge_vertex[te[i]];
      emit({vi, vj, m}, sign_of(vj), t);
      emit({vi, m, vk}, sign_of(vk), t);
    } else if (splits == 2) {
      int i = 0;
      while (edge_vertex[te[i]] >= 0) ++i;
      const int vi = tri[i], vj = tri[(i + 1) % 3], vk = tri[(i + 2) % 3];
      const int mk = edge_vertex[te[(i + 2) % 3]];  // on edge vi-vj
      const int mj = edge_vertex[te[(i + 1) % 3]];  // on edge vk-vi
      emit({vi, mk, mj}, sign_of(vi), t);
      const Sign quad = sign_of(vj);
      const double d1 = (vertices[mk] - vertices[vk]).squaredNorm();
      const double d2 = (vertices[vj] - vertices[mj]).squaredNorm();
      if (d1 <= d2) {
        emit({mk, vj, vk}, quad, t);
        emit({mk, vk, mj}, quad, t);
      } else {
        emit({mk, vj, mj}, quad, t);
        emit({vj, vk, mj}, quad, t);
      }
    } else {
      throw Error("triangle " + std::to_string(t) + " has three sign-changing edges");
    }
  }

  FittedMesh out;
  out.mesh = std::make_shared<const SimplicialMesh>(std::move(vertices), std::move(triangles));
  out.vertex_phi = std::move(vertex_phi);
  out.parent = std::move(parent);
  out.sign = std::move(sign);
  return out;
}

FittedMesh refine_to_fit(const ContinuousField& phi, const FitOptions& options) {
  const SimplicialMesh& mesh = phi.mesh();
  if (phi.degree() == 2 && options.reject_double_crossings) {
    const int nv = mesh.num_vertices();
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const auto& edge = mesh.edge(e);
      const double a = phi.values()[edge.v[0]];
      const double b = phi.values()[edge.v[1]];
      const double m = phi.values()[nv + e];
      if (a * b > 0 && a * m < 0) {
        throw Error("level set changes sign twice along edge " + std::to_string(e) + "; refine the base mesh");
      }
    }
  }
  return refine_to_fit(phi.mesh_ptr(), phi.vertex_values(), options);
}

int count_components(const FittedMesh& fitted, Sign s) {
  const SimplicialMesh& mesh = *fitted.mesh;
  std::vector<char> seen(mesh.num_triangles(), 0);
  int components = 0;
  std::queue<int> queue;
  for (int start = 0; start < mesh.num_triangles(); ++start) {
    if (seen[start] || fitted.sign[start] != s) continue;
    ++components;
    seen[start] = 1;
    queue.push(start);
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop();
      for (int i = 0; i < 3; ++i) {
        const int n = mesh.neighbor(t, i);
        if (n >= 0 && !seen[n] && fitted.sign[n] == s) {
          seen[n] = 1;
          queue.push(n);
        }
      }
    }
  }
  return components;
}

}  // namespace polyls
