#pragma once

#include "polyls/continuous_field.hpp"
#include "polyls/dg_space.hpp"
#include "polyls/refinement.hpp"
#include "polyls/shape_calc.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace polyls {

/// Shape-gradient validation: the disc {|x| < radius} fitted into a square mesh, the
/// polytopic dG gradient at several agglomerations of the fitted mesh, and a conforming
/// P2 reference on the fitted mesh after `reference_refinements` red refinements
/// (which keep the polygon Omega unchanged).
struct ConvergenceStudy {
  double half_width{1.0};
  double radius{0.52};
  /// square_mesh(base_cells); 120 cells give 29808 fitted triangles for radius 0.52,
  /// so that the finest level still has about 13 triangles per polytope.
  int base_cells{120};
  int reference_refinements{0};
  /// Requested polytope counts; the table reports the counts actually produced.
  std::vector<int> elements{36, 144, 576, 2304};
  std::vector<int> degrees{1, 2};
  std::uint64_t seed{1};
  double c_sigma{10.0};
  int quadrature_order{4};
  double solver_tol{1e-12};
  UnconstrainedProblem problem{UnconstrainedProblem::two_foci()};

  void validate() const;
};

struct ConvergenceRow {
  int level{0};  ///< 1-based
  int elements{0};
  /// One entry per degree, in the order of ConvergenceStudy::degrees.
  std::vector<double> errors;
  /// NaN on the first level.
  std::vector<double> rates;
};

struct ConvergenceTable {
  int fine_triangles{0};
  int reference_triangles{0};
  std::vector<int> degrees;
  std::vector<ConvergenceRow> rows;
};

/// log(e1 / e0) / log(n1 / n0).
double convergence_rate(double e0, double e1, double n0, double n1);

/// Conforming P2 solution g in H^1_0(D)^2 of (grad g, grad w) + (g, w) = dJ(w) for the
/// unconstrained functional, with Omega the triangles of sign -1.
ContinuousVectorField conforming_shape_gradient(const MeshPtr& mesh, std::span<const Sign> sign,
                                                const UnconstrainedProblem& problem, int quadrature_order = 4);

/// L2(D) distance between a dG field and `ref`, whose mesh is the dG field's fine mesh
/// after `refinements` uniform_refine passes.
double l2_distance(const DgField& field, const ContinuousField& ref, int refinements = 0, int quadrature_order = 8);

ConvergenceTable shape_gradient_convergence(const ConvergenceStudy& study);

}  // namespace polyls
