#include "polyls/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace polyls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ShapeView {
  ContinuousField phi;
  FittedMesh fitted;
  std::string degenerate;  // empty when the shape is usable
};

ShapeView view_shape(const DgField& phi) {
  ShapeView v;
  v.phi = recover_nodal_average(phi, -1, BoundaryRule::Average);
  FitOptions options;
  // The fit only uses vertex values; a quadratic that dips across an uncut edge
  // describes a feature below the mesh size and is dropped.
  options.reject_double_crossings = false;
  v.fitted = refine_to_fit(v.phi, options);
  if (v.fitted.count(-1) == 0) {
    v.degenerate = "the shape {phi < 0} is empty";
  } else if (v.fitted.count(1) == 0) {
    v.degenerate = "the shape {phi < 0} fills the hold-all domain";
  }
  return v;
}

SolverSettings solver_settings(const OptimizerConfig& cfg) {
  SolverSettings s;
  s.degree = cfg.degree;
  s.c_sigma = cfg.c_sigma;
  s.quadrature_order = cfg.quadrature_order;
  s.rel_tol = cfg.solver_tol;
  return s;
}

double shape_objective(const OptimizerConfig& cfg, const FittedMesh& fitted) {
  if (cfg.problem == ProblemKind::Unconstrained) {
    return objective_unconstrained(fitted, cfg.unconstrained, cfg.quadrature_order);
  }
  // One element per fitted triangle: no clustering during backtracking.
  std::vector<int> part(fitted.mesh->num_triangles());
  for (std::size_t t = 0; t < part.size(); ++t) part[t] = static_cast<int>(t);
  auto mesh = std::make_shared<PolytopicMesh>(fitted.mesh, std::move(part));
  mesh->set_element_sign(fitted.sign);
  const BernoulliState state = solve_bernoulli_state(mesh, cfg.bernoulli, solver_settings(cfg));
  return objective_bernoulli(state.u, cfg.bernoulli.eta);
}

std::vector<Point> interface_points(const FittedMesh& fitted) {
  std::vector<Point> pts;
  for (int v : fitted.interface_vertices()) pts.push_back(fitted.mesh->vertex(v));
  return pts;
}

double grad_phi_median(const ShapeView& view) {
  const SimplicialMesh& m = *view.fitted.mesh;
  std::vector<double> g;
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ed = m.edge(e);
    if (!view.fitted.on_interface(ed.v[0]) || !view.fitted.on_interface(ed.v[1])) continue;
    const Point mid = 0.5 * (m.vertex(ed.v[0]) + m.vertex(ed.v[1]));
    g.push_back(view.phi.gradient(view.fitted.parent[ed.tri[0]], mid).norm());
  }
  if (g.empty()) return 0.0;
  const auto mid = g.begin() + static_cast<std::ptrdiff_t>(g.size() / 2);
  std::nth_element(g.begin(), mid, g.end());
  return *mid;
}

ContinuousField recover_component(const DgField& g) {
  return recover_nodal_average(inject_polytopic_to_simplicial(g), 2, BoundaryRule::Zero);
}

}  // namespace

void OptimizerConfig::validate() const {
  if (!base_mesh) throw Error("optimizer: base mesh is missing");
  if (!phi0) throw Error("optimizer: initial level set is missing");
  if (degree != 1 && degree != 2) throw Error("optimizer: degree must be 1 or 2");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw Error("optimizer: Armijo constant must lie in (0, 1)");
  if (max_steps < 5) throw Error("optimizer: at least 5 time steps per iteration are needed");
  if (!(cfl >= 0.0 && cfl <= 1.0)) throw Error("optimizer: CFL number must lie in [0, 1]");
  if (cfl == 0.0 && !(dt > 0.0)) throw Error("optimizer: time step must be positive");
  if (max_iterations < 1) throw Error("optimizer: max_iterations must be positive");
  if (elements < 2) throw Error("optimizer: at least two polytopic elements are needed");
  if (!(c_sigma > 0.0)) throw Error("optimizer: penalty constant must be positive");
  if (quadrature_order < 1) throw Error("optimizer: quadrature order must be positive");
  if (!(solver_tol > 0.0)) throw Error("optimizer: solver tolerance must be positive");
}

double two_hole_level_set(const Point& x) {
  const double r1 = (x - Point(0.6, 0.0)).norm(), r2 = (x + Point(0.6, 0.0)).norm();
  return 0.55 - std::sqrt(r1 * r2);
}

double smiley_level_set(const Point& x) {
  const double left_eye = 0.12 - (x - Point(-0.3, 0.25)).norm();
  const double right_eye = 0.12 - (x - Point(0.3, 0.25)).norm();
  const double rho = (x - Point(0.0, 0.15)).norm();
  const double mouth = std::min(0.07 - std::abs(rho - 0.45), -x.y());
  return std::max({left_eye, right_eye, mouth});
}

OptimizerConfig unconstrained_setup() {
  OptimizerConfig c;
  c.problem = ProblemKind::Unconstrained;
  c.base_mesh = std::make_shared<const SimplicialMesh>(square_mesh(30));
  c.phi0 = [](const Point& x) { return x.norm() - 0.51; };
  c.reference = ReferenceCurve::two_foci_ovals();
  c.degree = 2;
  c.dt = 1.0 / 2600.0;
  // The fixed step moves the front about 0.04 per unit pseudo-time; see README.
  c.cfl = 0.05;
  c.max_steps = 150;
  c.elements = 200;
  return c;
}

OptimizerConfig bernoulli_setup(BernoulliStart start) {
  OptimizerConfig c;
  c.problem = ProblemKind::Bernoulli;
  c.base_mesh = std::make_shared<const SimplicialMesh>(disc_mesh_with_about(2085));
  c.phi0 = start == BernoulliStart::TwoHoles ? two_hole_level_set : smiley_level_set;
  c.reference = ReferenceCurve::circle(0.55);
  c.degree = 2;
  c.dt = 1.0 / 1000.0;
  c.max_steps = 100;
  c.elements = 200;
  return c;
}

ArmijoChoice armijo_select(double j0, double grad_norm_sq, double dt, double c, int multiples,
                           const std::function<double(int)>& j_of) {
  auto passes = [&](int steps) {
    const double j = j_of(steps);
    return std::isfinite(j) && j <= j0 - c * steps * dt * grad_norm_sq;
  };
  for (int k = multiples; k >= 1; --k) {
    if (passes(5 * k)) return {true, 5 * k};
  }
  if (passes(1)) return {true, 1};
  return {};
}

ArmijoChoice armijo_select(double j0, double grad_norm_sq, double dt, double c, std::span<const double> j_at_multiples,
                           std::optional<double> j_single) {
  return armijo_select(j0, grad_norm_sq, dt, c, static_cast<int>(j_at_multiples.size()), [&](int steps) {
    if (steps == 1) return j_single.value_or(kInf);
    return j_at_multiples[static_cast<std::size_t>(steps / 5 - 1)];
  });
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::ArmijoRejected: return "armijo_rejected";
    case StopReason::ZeroGradient: return "zero_gradient";
    case StopReason::MaxIterations: return "max_iterations";
    case StopReason::Degenerate: return "degenerate";
  }
  return "unknown";
}

double evaluate_objective(const OptimizerConfig& config, const DgField& phi) {
  const ShapeView view = view_shape(phi);
  if (!view.degenerate.empty()) return kInf;
  return shape_objective(config, view.fitted);
}

bool level_set_gradient_bounded(std::span<const IterationRecord> history) {
  if (history.empty()) return true;
  const double ref = history.front().grad_phi_median;
  if (!(ref > 0.0)) return false;
  return std::all_of(history.begin(), history.end(), [&](const IterationRecord& r) {
    return r.grad_phi_median >= 1e-3 * ref && r.grad_phi_median <= 1e3 * ref;
  });
}

OptimizationResult optimize(const OptimizerConfig& cfg, const IterationObserver& observer) {
  cfg.validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const MeshPtr& base = cfg.base_mesh;
  const DgSpace transport_space = DgSpace::simplicial(base, cfg.degree, cfg.quadrature_order);

  OptimizationResult result;
  result.phi = l2_project(cfg.phi0, transport_space);
  ShapeView view = view_shape(result.phi);
  double j_current = 0.0;

  auto describe = [&](const ShapeView& v) {
    result.final_components_inside = count_components(v.fitted, -1);
    result.final_components_outside = count_components(v.fitted, 1);
    const std::vector<Point> zls = interface_points(v.fitted);
    result.final_zls_distance = cfg.reference && !zls.empty() ? zero_level_set_distance(zls, *cfg.reference)
                                                              : std::numeric_limits<double>::quiet_NaN();
  };
  describe(view);
  if (!view.degenerate.empty()) {
    result.reason = StopReason::Degenerate;
    result.message = "initial iterate: " + view.degenerate;
    result.final_objective = kInf;
    return result;
  }
  j_current = shape_objective(cfg, view.fitted);
  result.final_objective = j_current;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    try {
      IterationRecord rec;
      rec.iteration = it;
      rec.time = result.time;
      rec.objective = j_current;
      rec.components_inside = result.final_components_inside;
      rec.components_outside = result.final_components_outside;
      rec.zls_distance = result.final_zls_distance;
      rec.grad_phi_median = grad_phi_median(view);

      // Shape gradient on the agglomerated mesh.
      const auto [k_plus, k_minus] =
          split_element_budget(cfg.elements, view.fitted.count(1), view.fitted.count(-1));
      auto poly = std::make_shared<const PolytopicMesh>(agglomerate(view.fitted, k_plus, k_minus, cfg.seed));
      rec.elements = poly->num_elements();
      const DgSpace space = DgSpace::polytopic(poly, cfg.degree, PolyBasisKind::Tensor, cfg.quadrature_order);
      const IpdgOperator op = assemble_ipdg(space, cfg.c_sigma, true);
      std::optional<BernoulliState> state;
      Matrix rhs;
      if (cfg.problem == ProblemKind::Unconstrained) {
        rhs = dJ_rhs_unconstrained(space, cfg.unconstrained);
      } else {
        state = solve_bernoulli_state(poly, cfg.bernoulli, solver_settings(cfg));
        rhs = dJ_rhs_bernoulli(space, *state, cfg.bernoulli.eta);
      }
      const std::array<DgField, 2> g = solve_shape_gradient(op, rhs, cfg.solver_tol);
      rec.grad_norm_sq = energy_norm_sq(op, g[0]) + energy_norm_sq(op, g[1]);

      const ContinuousVectorField grad_fitted{recover_component(g[0]), recover_component(g[1])};
      auto finish_record = [&](int steps) {
        rec.accepted_steps = steps;
        rec.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
        result.history.push_back(rec);
        if (observer) {
          observer(IterationArtifacts{result.history.back(), view.fitted, *poly, result.phi, view.phi, grad_fitted,
                                      state ? &*state : nullptr});
        }
      };

      if (std::sqrt(rec.grad_norm_sq) < 1e-12) {
        finish_record(0);
        result.reason = StopReason::ZeroGradient;
        result.message = "shape gradient vanishes";
        return result;
      }

      // V = -grad J on the base mesh.
      ContinuousVectorField velocity{restrict_to_base(grad_fitted.x, view.fitted, base),
                                     restrict_to_base(grad_fitted.y, view.fitted, base)};
      velocity.x.values() *= -1.0;
      velocity.y.values() *= -1.0;
      const TransportOperator transport = build_transport(transport_space, velocity);
      const double dt = cfg.cfl > 0.0 ? cfl_dt(transport, cfg.cfl).dt : cfg.dt;
      rec.dt = dt;
      if (!std::isfinite(dt)) {
        finish_record(0);
        result.reason = StopReason::ZeroGradient;
        result.message = "transport velocity vanishes";
        return result;
      }

      const std::vector<LevelSetState> snaps = advect(transport, result.phi, dt, cfg.max_steps, 5, cfg.scheme);
      std::optional<LevelSetState> single;
      auto snapshot = [&](int steps) -> const LevelSetState& {
        if (steps == 1) {
          if (!single) single = rkdg_step(transport, snaps.front(), dt, cfg.scheme);
          return *single;
        }
        return snaps[static_cast<std::size_t>(steps / 5)];
      };
      std::vector<double> j_cache(static_cast<std::size_t>(cfg.max_steps + 1), std::numeric_limits<double>::quiet_NaN());
      auto j_of = [&](int steps) {
        double& j = j_cache[static_cast<std::size_t>(steps)];
        if (std::isnan(j)) j = evaluate_objective(cfg, snapshot(steps).phi);
        return j;
      };
      const ArmijoChoice choice =
          armijo_select(j_current, rec.grad_norm_sq, dt, cfg.armijo_c, cfg.max_steps / 5, j_of);
      finish_record(choice.accepted ? choice.steps : 0);
      if (!choice.accepted) {
        result.reason = StopReason::ArmijoRejected;
        result.message = "Armijo condition fails after one time step";
        return result;
      }

      result.phi = snapshot(choice.steps).phi;
      ++result.phi_updates;
      result.time += choice.steps * dt;
      j_current = j_cache[static_cast<std::size_t>(choice.steps)];
      view = view_shape(result.phi);
      result.final_objective = j_current;
      describe(view);
      if (!view.degenerate.empty()) {
        // Accepted snapshots have a finite objective, so this is unreachable in practice.
        result.reason = StopReason::Degenerate;
        result.message = "iteration " + std::to_string(it) + ": " + view.degenerate;
        return result;
      }
    } catch (const DegenerateIterate&) {
      throw;
    } catch (const Error& e) {
      throw Error("iteration " + std::to_string(it) + ": " + e.what());
    }
  }
  result.reason = StopReason::MaxIterations;
  result.message = "iteration limit reached";
  return result;
}

}  // namespace polyls
