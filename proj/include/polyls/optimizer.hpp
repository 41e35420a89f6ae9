#pragma once

#include "polyls/elliptic.hpp"
#include "polyls/recovery.hpp"
#include "polyls/shape_calc.hpp"
#include "polyls/transport.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace polyls {

enum class ProblemKind { Unconstrained, Bernoulli };

/// Steepest-descent level-set optimization. The shape is Omega = {phi < 0}; for the
/// Bernoulli problem the holes are {phi > 0}.
struct OptimizerConfig {
  ProblemKind problem{ProblemKind::Unconstrained};
  MeshPtr base_mesh;
  std::function<double(const Point&)> phi0;
  UnconstrainedProblem unconstrained{UnconstrainedProblem::two_foci()};
  BernoulliProblem bernoulli{};
  /// Target zero level set for the distance column of the history.
  std::optional<ReferenceCurve> reference;

  int degree{2};
  /// Fixed pseudo-time step; used when `cfl` is 0.
  double dt{1.0 / 2600.0};
  /// CFL number for cfl_dt; 0 selects the fixed step.
  double cfl{0.0};
  TimeScheme scheme{TimeScheme::Heun};
  /// M: at most this many time steps per iteration.
  int max_steps{150};
  double armijo_c{0.01};
  int max_iterations{80};
  /// k-means budget for the agglomerated mesh (split between the sign classes).
  int elements{200};
  std::uint64_t seed{1};
  double c_sigma{10.0};
  int quadrature_order{4};
  double solver_tol{1e-10};

  /// Throws Error on c outside (0, 1), M < 5, p outside {1, 2} and similar.
  void validate() const;
};

/// Square of edge 2 in 1800 triangles, p = 2, M = 150, 200 polytopes, start disc of
/// radius 0.51, target the ovals {f = 0}. The step follows the CFL rule with number
/// 0.05; `dt` keeps 1/2600 for runs that set `cfl` back to 0.
OptimizerConfig unconstrained_setup();

enum class BernoulliStart { TwoHoles, Smiley };

/// Unit disc in about 2085 triangles, p = 2, dt = 1/1000, M = 100,
/// 200 polytopes, target the circle of radius 0.55.
OptimizerConfig bernoulli_setup(BernoulliStart start = BernoulliStart::TwoHoles);

/// 0.55 - sqrt(|x - (0.6,0)| |x + (0.6,0)|): positive inside two holes.
double two_hole_level_set(const Point& x);
/// Positive inside two eyes and a mouth.
double smiley_level_set(const Point& x);

struct ArmijoChoice {
  bool accepted{false};
  /// Accepted number of time steps (a multiple of 5, or 1 for the single-step fallback).
  int steps{0};
};

/// Largest m = 5, 10, ... with J(m) <= J0 - c m dt |grad J|^2, where `j_at_multiples[k]`
/// holds J(5 (k+1)). If no multiple passes, one step is tried with `j_single` (J(1)).
/// Non-finite values never pass.
ArmijoChoice armijo_select(double j0, double grad_norm_sq, double dt, double c, std::span<const double> j_at_multiples,
                           std::optional<double> j_single = std::nullopt);

/// Same rule with J evaluated on demand, largest multiple first, so that only the
/// values needed for the decision are computed. `j_of(steps)` returns J after that
/// many steps.
ArmijoChoice armijo_select(double j0, double grad_norm_sq, double dt, double c, int multiples,
                           const std::function<double(int)>& j_of);

struct IterationRecord {
  /// 1-based outer iteration; also the number of gradient evaluations so far.
  int iteration{0};
  /// Pseudo-time of the iterate at which the gradient was evaluated.
  double time{0.0};
  double objective{0.0};
  double grad_norm_sq{0.0};
  /// Time step of this iteration (fixed, or from the CFL rule).
  double dt{0.0};
  /// Accepted number of time steps; 0 when the step was rejected.
  int accepted_steps{0};
  double zls_distance{0.0};
  int components_inside{0};   ///< edge-connected pieces of {phi < 0}
  int components_outside{0};  ///< edge-connected pieces of {phi > 0}
  /// Median of |grad E(phi)| at the zero level set (reinitialization monitor).
  double grad_phi_median{0.0};
  int elements{0};
  double wall_seconds{0.0};
};

enum class StopReason { ArmijoRejected, ZeroGradient, MaxIterations, Degenerate };

const char* to_string(StopReason reason);

/// Everything computed for one iterate, handed to the observer after the gradient solve.
struct IterationArtifacts {
  const IterationRecord& record;
  const FittedMesh& fitted;
  const PolytopicMesh& agglomerated;
  const DgField& phi;                  ///< on the base mesh
  const ContinuousField& phi_recovered;  ///< on the base mesh
  /// Recovered grad J components on the fitted mesh.
  const ContinuousVectorField& gradient;
  /// Bernoulli only.
  const BernoulliState* state{nullptr};
};

using IterationObserver = std::function<void(const IterationArtifacts&)>;

struct OptimizationResult {
  std::vector<IterationRecord> history;
  StopReason reason{StopReason::MaxIterations};
  std::string message;
  DgField phi;
  double time{0.0};
  /// Shape after the last accepted step.
  double final_objective{0.0};
  double final_zls_distance{0.0};
  int final_components_inside{0};
  int final_components_outside{0};
  /// Audit: phi is only ever replaced by a transport snapshot.
  int phi_updates{0};
  int reinitializations{0};
};

OptimizationResult optimize(const OptimizerConfig& config, const IterationObserver& observer = {});

/// The lightweight objective used for backtracking: fit the zero level set of the
/// recovered phi, then integrate (unconstrained) or solve the state on the fitted
/// triangles (Bernoulli). Returns +inf when the shape is empty or fills the hold-all.
double evaluate_objective(const OptimizerConfig& config, const DgField& phi);

/// True when every recorded grad_phi_median stays within [1e-3, 1e3] times the first.
bool level_set_gradient_bounded(std::span<const IterationRecord> history);

}  // namespace polyls
