#pragma once

#include "polyls/continuous_field.hpp"
#include "polyls/dg_space.hpp"
#include "polyls/refinement.hpp"

#include <span>

namespace polyls {

/// What recovery writes at nodes on the hold-all boundary.
enum class BoundaryRule {
  Zero,     ///< 0 at every boundary node (shape-gradient fields)
  Average,  ///< same patch average as interior nodes
};

/// Restriction of a polytopic field to each fine triangle, re-expanded in the triangle
/// basis of the given degree (default 2p, which holds Q_p restrictions exactly).
DgField inject_polytopic_to_simplicial(const DgField& field, int degree = -1);

/// Evaluates the element polynomials at the degree-`degree` Lagrange nodes of each fine
/// triangle and averages the one-sided values over each node patch. Works for both
/// polytopic and simplicial fields; default degree is the field degree. Triangles
/// outside the meshed region of a sub-mesh do not take part.
ContinuousField recover_nodal_average(const DgField& field, int degree = -1, BoundaryRule rule = BoundaryRule::Zero);

/// Nodal average of per-triangle values listed by local Lagrange node (rows: triangles).
/// Triangles with `active[t] == 0` are left out of the patches; nodes with an empty
/// patch get 0.
ContinuousField average_local_values(const MeshPtr& mesh, int degree, const Matrix& local_values, BoundaryRule rule,
                                     std::span<const char> active = {});

/// Interpolates a continuous field given on a fitted mesh back onto its base mesh
/// (degree-`degree` Lagrange nodes of the base triangles).
ContinuousField restrict_to_base(const ContinuousField& fitted_field, const FittedMesh& fitted, const MeshPtr& base);

}  // namespace polyls
