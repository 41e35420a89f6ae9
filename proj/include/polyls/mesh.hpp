#pragma once

#include "polyls/common.hpp"

#include <array>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace polyls {

using Triangle = std::array<int, 3>;

/// Edge of a triangulation. `tri[1] == -1` marks a boundary edge.
struct MeshEdge {
  std::array<int, 2> v{};
  std::array<int, 2> tri{-1, -1};

  bool boundary() const { return tri[1] < 0; }
};

struct BoundingBox {
  Point min{Point::Zero()};
  Point max{Point::Zero()};

  Point center() const { return 0.5 * (min + max); }
  Point extent() const { return max - min; }
  bool contains(const Point& p, double tol = 1e-12) const;
};

/// Counter-clockwise triangulation of a planar hold-all domain.
///
/// Construction derives edges, triangle-edge incidence and boundary flags. Triangles
/// given clockwise are reoriented; zero-area triangles are rejected. Immutable after
/// construction.
class SimplicialMesh {
public:
  SimplicialMesh() = default;
  SimplicialMesh(std::vector<Point> vertices, std::vector<Triangle> triangles);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<MeshEdge>& edges() const { return edges_; }
  const Point& vertex(int v) const { return vertices_[v]; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  const MeshEdge& edge(int e) const { return edges_[e]; }

  /// Edge opposite local vertex i of triangle t.
  const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }

  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
  bool is_boundary_edge(int e) const { return edges_[e].boundary(); }

  double area(int t) const { return areas_[t]; }
  double total_area() const;
  Point barycenter(int t) const;
  double diameter(int t) const;
  double edge_length(int e) const { return (vertices_[edges_[e].v[1]] - vertices_[edges_[e].v[0]]).norm(); }
  /// Unit normal of edge e pointing out of triangle `side` (0 or 1 in edge.tri).
  Point edge_normal(int e, int side) const;
  /// Neighbor across the edge opposite local vertex i, or -1.
  int neighbor(int t, int i) const;
  BoundingBox bounding_box() const;

  /// Triangles incident to each vertex.
  std::vector<std::vector<int>> vertex_triangles() const;

private:
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<MeshEdge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<char> boundary_vertex_;
  std::vector<double> areas_;
};

using MeshPtr = std::shared_ptr<const SimplicialMesh>;

// Structured generators for the two hold-all domains.

/// Square [-half, half]^2 split into n x n cells, two triangles per cell, diagonals
/// alternating so the mesh is symmetric about both axes for even n.
SimplicialMesh square_mesh(int n, double half_width = 1.0);

/// Unit-disc style mesh of concentric rings: ring k carries 6k vertices, 6 rings^2 triangles.
SimplicialMesh disc_mesh(int rings, double radius = 1.0);

/// Square mesh with n chosen so that 2 n^2 is as close as possible to `triangles`.
SimplicialMesh square_mesh_with_about(int triangles, double half_width = 1.0);
/// Disc mesh with the ring count giving a triangle count closest to `triangles`.
SimplicialMesh disc_mesh_with_about(int triangles, double radius = 1.0);

/// Red refinement: every triangle split into four. Geometry is unchanged.
SimplicialMesh uniform_refine(const SimplicialMesh& mesh);

// Plain-text format:
//   polyls-mesh 1
//   vertices <N>
//   <x> <y>            (N lines)
//   triangles <M>
//   <a> <b> <c>        (M lines, zero-based)
void write_mesh_text(const SimplicialMesh& mesh, std::ostream& out);
SimplicialMesh read_mesh_text(std::istream& in);
void save_mesh_text(const SimplicialMesh& mesh, const std::string& path);
SimplicialMesh load_mesh_text(const std::string& path);

}  // namespace polyls
