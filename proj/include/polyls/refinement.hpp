#pragma once

#include "polyls/continuous_field.hpp"

#include <span>
#include <vector>

namespace polyls {

/// Sign convention: -1 inside the shape ({phi < 0}), +1 outside.
using Sign = int;

/// Vertex values with exact zeros replaced by +1e-12 times the local value scale.
std::vector<double> perturb_zero_values(const SimplicialMesh& mesh, std::span<const double> phi_vertex);

/// Triangles whose three vertex signs do not all agree: |s1 + s2 + s3| < 3.
std::vector<int> mark_cut_triangles(const SimplicialMesh& mesh, std::span<const double> phi_vertex);

/// Triangulation resolving the zero level set of the piecewise-linear vertex data.
struct FittedMesh {
  MeshPtr mesh;
  /// Linear level-set data on the fitted vertices; exactly 0 on interface vertices.
  std::vector<double> vertex_phi;
  /// Base-mesh triangle that contains each fitted triangle.
  std::vector<int> parent;
  /// Sign of the fitted data on each triangle (never mixed).
  std::vector<Sign> sign;

  bool on_interface(int v) const { return vertex_phi[v] == 0.0; }
  std::vector<int> interface_vertices() const;
  int count(Sign s) const;
  double area(Sign s) const;
};

struct FitOptions {
  /// Reject a quadratic field whose restriction to an uncut edge changes sign twice.
  bool reject_double_crossings = true;
  /// Roots closer than this fraction of the edge length to an endpoint snap onto it.
  double snap_tolerance = 1e-8;
};

/// Inserts vertices at the roots of the per-edge linear interpolant of the vertex
/// values and splits every cut triangle into two or three children. Neighbors that
/// share a cut edge are themselves cut and split with the same new vertex, so the
/// output stays conforming. Triangles with no sign change are copied verbatim.
FittedMesh refine_to_fit(const MeshPtr& base, std::span<const double> phi_vertex, const FitOptions& options = {});
FittedMesh refine_to_fit(const ContinuousField& phi, const FitOptions& options = {});

/// Number of edge-connected components of the triangles carrying sign `s`.
int count_components(const FittedMesh& fitted, Sign s);

}  // namespace polyls
