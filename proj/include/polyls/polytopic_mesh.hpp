#pragma once

#include "polyls/refinement.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace polyls {

enum class FaceKind {
  Interior,        ///< shared by two elements
  DomainBoundary,  ///< on the boundary of the hold-all domain (the fixed boundary)
  FreeBoundary,    ///< on the boundary of a meshed sub-region, inside the hold-all domain
};

/// Maximal straight segment shared by two elements, or by one element and a boundary.
struct PolytopicFace {
  std::array<int, 2> element{-1, -1};
  Point a{Point::Zero()};
  Point b{Point::Zero()};
  /// Unit normal pointing out of element[0].
  Point normal{Point::Zero()};
  double length{0.0};
  FaceKind kind{FaceKind::Interior};
  std::vector<int> fine_edges;

  bool boundary() const { return element[1] < 0; }
};

/// Agglomerates of fine triangles. Fine triangles with element id -1 are outside the
/// meshed region (used for sub-meshes); faces towards them become free boundary faces.
class PolytopicMesh {
public:
  PolytopicMesh() = default;
  PolytopicMesh(MeshPtr fine, std::vector<int> element_of_triangle);

  const SimplicialMesh& fine() const { return *fine_; }
  const MeshPtr& fine_ptr() const { return fine_; }

  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  const std::vector<int>& triangles(int element) const { return elements_.at(element); }
  const std::vector<int>& element_of_triangle() const { return element_of_triangle_; }
  int element_of(int triangle) const { return element_of_triangle_[triangle]; }
  const std::vector<PolytopicFace>& faces() const { return faces_; }
  const PolytopicFace& face(int f) const { return faces_[f]; }
  const std::vector<int>& element_faces(int element) const { return element_faces_[element]; }

  double area(int element) const { return areas_[element]; }
  double diameter(int element) const { return diameters_[element]; }
  const BoundingBox& bounding_box(int element) const { return boxes_.at(element); }
  double total_area() const;
  double perimeter(int element) const;

  /// Sign of the level set on each element, when built from a fitted mesh.
  const std::vector<Sign>& element_sign() const { return element_sign_; }
  void set_element_sign(std::vector<Sign> sign);
  /// For sub-meshes: id of each element in the mesh it was extracted from.
  const std::vector<int>& parent_element() const { return parent_element_; }
  void set_parent_element(std::vector<int> parent) { parent_element_ = std::move(parent); }

private:
  MeshPtr fine_;
  std::vector<int> element_of_triangle_;
  std::vector<std::vector<int>> elements_;
  std::vector<PolytopicFace> faces_;
  std::vector<std::vector<int>> element_faces_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  std::vector<BoundingBox> boxes_;
  std::vector<Sign> element_sign_;
  std::vector<int> parent_element_;
};

BoundingBox bounding_box(const PolytopicMesh& mesh, int element);

struct KMeansResult {
  std::vector<int> labels;
  std::vector<Point> centers;
  int iterations{0};
  double inertia{0.0};
};

/// Lloyd iteration with k-means++ seeding. Nearest-center ties go to the lowest index.
KMeansResult kmeans(std::span<const Point> points, int k, std::uint64_t seed, int max_iterations = 100);

/// Splits an element budget between the two sign classes proportionally to their
/// triangle counts, with at least one element per non-empty class.
std::pair<int, int> split_element_budget(int total, int triangles_plus, int triangles_minus);

struct AgglomerationOptions {
  int max_iterations{100};
  /// Connected pieces with fewer triangles are merged into a same-sign neighbor when one exists.
  int min_component_triangles{2};
};

/// Clusters fitted-triangle barycenters per sign class and agglomerates each cluster;
/// disconnected clusters are split into their connected components.
PolytopicMesh agglomerate(const FittedMesh& fitted, int k_plus, int k_minus, std::uint64_t seed,
                          const AgglomerationOptions& options = {});

/// Rebuilds the agglomeration of `source` (same triangle partition) over another
/// fine mesh with identical connectivity, e.g. after moving vertices.
PolytopicMesh with_fine_mesh(const PolytopicMesh& source, MeshPtr fine);

/// Elements with negative sign, as a mesh of their own. Faces towards positive
/// elements become free boundary faces; faces on the hold-all boundary stay fixed.
PolytopicMesh extract_interior_submesh(const PolytopicMesh& mesh);

}  // namespace polyls
