#pragma once

#include "polyls/dg_space.hpp"
#include "polyls/linear_solver.hpp"

#include <array>
#include <functional>
#include <span>

namespace polyls {

/// Symmetric interior penalty operator
///   B(u, w) = sum_T int_T grad u . grad w [+ u w]
///           + sum_F int_F sigma [u].[w] - [w].{grad u} - [u].{grad w}
/// where F runs over interior faces and the Dirichlet boundary faces.
struct IpdgOperator {
  DgSpace space;
  SparseMatrix matrix;
  std::vector<double> sigma;    ///< penalty per face (0 on faces without a penalty term)
  std::vector<char> dirichlet;  ///< per face: boundary face with weakly imposed Dirichlet data
  double c_sigma{10.0};
  /// Faces whose penalty was raised by the coercivity guard.
  int guarded_faces{0};
  bool include_mass{true};
};

/// `dirichlet_faces` flags boundary faces (indexed like space.faces()); empty means every
/// boundary face. Throws for p = 0.
///
/// With `guard_coercivity` each penalized face gets
///   sigma_F = max(C_sigma p^2 |F| / h_T^2, 1.05 sum_{T at F} Lambda_T),
///   Lambda_T = max_v sum_{F in dT} w_F^2 |grad v . n|^2_F / |grad v|^2_T,
/// w_F = 1/2 on interior faces and 1 on boundary faces. Young's inequality then gives
/// B(v, v) >= sum_F (sigma_F - sum Lambda_T) |[v]|^2_F, and B(v, v) = |grad v|^2 once the
/// jumps vanish, so B is definite whenever some boundary face is penalized. The first
/// term alone scales with |F| and is too weak on the short faces of agglomerates.
IpdgOperator assemble_ipdg(const DgSpace& space, double c_sigma, bool include_mass,
                           std::span<const char> dirichlet_faces = {}, bool guard_coercivity = true);

/// int_D f w for every basis function w.
Vector assemble_load(const DgSpace& space, const std::function<double(const Point&)>& f);

/// Solves B(g_i, w) = rhs_i(w) for both columns of `rhs` (size x 2).
std::array<DgField, 2> solve_shape_gradient(const IpdgOperator& op, const Matrix& rhs, double rel_tol = 1e-10);

/// B(g, g).
double energy_norm_sq(const IpdgOperator& op, const DgField& g);

/// Dirichlet data evaluated on a boundary face point, by face family.
using DirichletData = std::function<double(const Point&, FaceKind)>;

/// Nitsche terms int_F (sigma g w - g grad w . n) over the Dirichlet faces of `op`.
Vector assemble_dirichlet_rhs(const IpdgOperator& op, const DirichletData& data);

/// -Laplace u = 0 with u = data on every boundary face, imposed weakly. No mass term.
DgField solve_state_laplace(const DgSpace& space, const DirichletData& data, double c_sigma, double rel_tol = 1e-10);
/// Constant data per family: `fixed_value` on the hold-all boundary, `free_value` on free faces.
DgField solve_state_laplace(const DgSpace& space, double fixed_value, double free_value, double c_sigma,
                            double rel_tol = 1e-10);

}  // namespace polyls
