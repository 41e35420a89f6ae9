#pragma once

#include "polyls/continuous_field.hpp"
#include "polyls/dg_space.hpp"
#include "polyls/linear_solver.hpp"

#include <vector>

namespace polyls {

/// Upwind dG discretization of  d_t phi + V . grad phi = 0  on a simplicial space:
///   M dPhi/dt = -K Phi,
///   k_ij = int_tau (V . grad psi_j) psi_i - int_{inflow} (V . n) (psi_j^in - psi_j^out) psi_i.
/// Inflow is decided pointwise from the sign of V . n at each face quadrature point.
struct TransportOperator {
  DgSpace space;
  ContinuousVectorField velocity;
  SparseMatrix stiffness;  ///< K
  Vector mass_diagonal;    ///< diagonal of M (orthonormal basis)
  SparseMatrix rate;       ///< L = -M^{-1} K
  double max_speed{0.0};
};

enum class TimeScheme { Heun, SspRk3 };

struct LevelSetState {
  DgField phi;
  double time{0.0};
  int steps{0};
};

/// Rejects velocities whose trace on the hold-all boundary exceeds 1e-10.
TransportOperator build_transport(const DgSpace& space, const ContinuousVectorField& velocity);

struct CflStep {
  double dt{0.0};
  bool stationary{false};
};

/// dt = cfl * min_tau h_tau / ((2p + 1) max_{quadrature points of tau} |V|).
CflStep cfl_dt(const TransportOperator& op, double cfl);

/// One explicit step of the semi-discrete system. Throws on non-finite coefficients.
LevelSetState rkdg_step(const TransportOperator& op, const LevelSetState& state, double dt,
                        TimeScheme scheme = TimeScheme::Heun);

/// Runs `steps` steps and returns snapshots after 0, every, 2 every, ... steps (and after
/// the last step if it is not a multiple of `every`).
std::vector<LevelSetState> advect(const TransportOperator& op, const DgField& phi0, double dt, int steps,
                                  int every = 5, TimeScheme scheme = TimeScheme::Heun);

}  // namespace polyls
