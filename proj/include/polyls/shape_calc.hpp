#pragma once

#include "polyls/continuous_field.hpp"
#include "polyls/dg_space.hpp"
#include "polyls/refinement.hpp"

#include <functional>
#include <optional>

namespace polyls {

/// J(Omega) = int_Omega f.
struct UnconstrainedProblem {
  std::function<double(const Point&)> f;
  std::function<Point(const Point&)> grad_f;

  /// f(x, y) = ((x-0.7)^2 + y^2)^(1/4) ((x+0.7)^2 + y^2)^(1/4) - 0.6.
  static UnconstrainedProblem two_foci();
};

/// J(Omega) = int_Omega |grad u|^2 + eta^2 with -Laplace u = 0 in Omega,
/// u = fixed_value on the hold-all boundary and u = free_value on the free boundary.
struct BernoulliProblem {
  double eta{1.0 / (-0.55 * std::log(0.55))};
  double fixed_value{-1.0};
  double free_value{0.0};
};

struct SolverSettings {
  int degree{2};
  double c_sigma{10.0};
  int quadrature_order{4};
  double rel_tol{1e-10};
};

/// Composite quadrature of f over the negative fitted triangles.
double objective_unconstrained(const FittedMesh& fitted, const UnconstrainedProblem& problem, int order = 4);
/// Same, over the negative elements of an agglomerated mesh.
double objective_unconstrained(const PolytopicMesh& mesh, const UnconstrainedProblem& problem, int order = 4);

/// Shape-derivative right-hand sides (size x 2) on the hold-all space:
///   int_Omega (grad f . E_i) w + f d_i w - int_{faces in closure(Omega)} [w] . {Pi f E_i}
/// with Pi f the L2 projection of f on the negative elements extended by zero, so that
/// faces on the zero level set see half of the interior trace.
Matrix dJ_rhs_unconstrained(const DgSpace& space, const UnconstrainedProblem& problem);
/// Same with a precomputed projection `pi_f` (zero outside Omega).
Matrix dJ_rhs_unconstrained(const DgSpace& space, const UnconstrainedProblem& problem, const DgField& pi_f);

/// The negative elements of an agglomerated hold-all mesh, with the state solved on them.
struct BernoulliState {
  PolytopicMeshPtr submesh;
  DgField u;
  /// element id in the submesh of each hold-all element, or -1
  std::vector<int> sub_element;
};

BernoulliState solve_bernoulli_state(const PolytopicMeshPtr& mesh, const BernoulliProblem& problem,
                                     const SolverSettings& settings);

/// int_Omega |grad_h u|^2 + eta^2 over the submesh of `u`.
double objective_bernoulli(const DgField& u, double eta);

/// sum_T int_{T in Omega} [(eta^2 + |grad u|^2) E_i . grad w - 2 (grad u . E_i) grad u . grad w]
///   - int_{interior faces in closure(Omega)} [w] . {A_i},
///   A_i = (eta^2 + |grad u|^2) E_i - 2 (grad u . E_i) grad u, extended by zero outside Omega.
Matrix dJ_rhs_bernoulli(const DgSpace& space, const BernoulliState& state, double eta);

/// Moves every vertex by t V(x); throws if a triangle flips or collapses.
MeshPtr move_vertices(const SimplicialMesh& mesh, const std::function<Point(const Point&)>& velocity, double t);

/// (J(Omega_t) - J(Omega)) / t with Omega_t obtained by moving the fitted vertices by t V.
double fd_shape_derivative_unconstrained(const PolytopicMesh& mesh, const UnconstrainedProblem& problem,
                                         const std::function<Point(const Point&)>& velocity, double t = 1e-4,
                                         int order = 4);
/// Same for the Bernoulli functional; the state is re-solved on the moved mesh with the
/// same agglomeration.
double fd_shape_derivative_bernoulli(const PolytopicMesh& mesh, const BernoulliProblem& problem,
                                     const SolverSettings& settings,
                                     const std::function<Point(const Point&)>& velocity, double t = 1e-4);

/// Closed parametric curves, parameter in [0, 1).
struct ReferenceCurve {
  std::vector<std::function<Point(double)>> branches;

  static ReferenceCurve circle(double radius, const Point& center = Point::Zero());
  /// Zero set of the two-foci function: the two ovals r1 r2 = 0.36 with foci (+-0.7, 0).
  static ReferenceCurve two_foci_ovals();
  /// Cassini ovals |x - (a,0)| |x + (a,0)| = b^2 with b < a (two components).
  static ReferenceCurve cassini(double a, double b);

  /// Distance from x to the curve: dense sampling plus golden-section refinement.
  double distance(const Point& x, int samples = 4096) const;
};

/// max over the fitted zero-level-set vertices of phi of the distance to `reference`.
double zero_level_set_distance(const ContinuousField& phi, const ReferenceCurve& reference);
double zero_level_set_distance(std::span<const Point> points, const ReferenceCurve& reference);

}  // namespace polyls
