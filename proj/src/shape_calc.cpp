#include "polyls/shape_calc.hpp"

#include "polyls/elliptic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace polyls {

UnconstrainedProblem UnconstrainedProblem::two_foci() {
  UnconstrainedProblem p;
  p.f = [](const Point& x) {
    const double a = (x.x() - 0.7) * (x.x() - 0.7) + x.y() * x.y();
    const double b = (x.x() + 0.7) * (x.x() + 0.7) + x.y() * x.y();
    return std::pow(a, 0.25) * std::pow(b, 0.25) - 0.6;
  };
  p.grad_f = [](const Point& x) -> Point {
    const Point da(2 * (x.x() - 0.7), 2 * x.y());
    const Point db(2 * (x.x() + 0.7), 2 * x.y());
    const double a = 0.25 * da.squaredNorm();
    const double b = 0.25 * db.squaredNorm();
    if (a == 0.0 || b == 0.0) return Point::Zero();
    const double qa = std::pow(a, 0.25), qb = std::pow(b, 0.25);
    return 0.25 * qb * qa / a * da + 0.25 * qa * qb / b * db;
  };
  return p;
}

double objective_unconstrained(const FittedMesh& fitted, const UnconstrainedProblem& problem, int order) {
  const SimplicialMesh& mesh = *fitted.mesh;
  double j = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (fitted.sign[t] >= 0) continue;
    const QuadratureRule rule = triangle_rule(mesh, t, order);
    for (std::size_t q = 0; q < rule.size(); ++q) j += rule.weights[q] * problem.f(rule.points[q]);
  }
  return j;
}

double objective_unconstrained(const PolytopicMesh& mesh, const UnconstrainedProblem& problem, int order) {
  const auto& sign = mesh.element_sign();
  if (sign.empty()) throw Error("polytopic mesh carries no element signs");
  double j = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (sign[e] >= 0) continue;
    const QuadratureRule rule = quadrature_on_element(mesh, e, order);
    for (std::size_t q = 0; q < rule.size(); ++q) j += rule.weights[q] * problem.f(rule.points[q]);
  }
  return j;
}

namespace {

std::vector<char> negative_elements(const DgSpace& space) {
  const auto& sign = space.polytopic_mesh().element_sign();
  if (sign.empty()) throw Error("polytopic mesh carries no element signs");
  std::vector<char> active(sign.size());
  for (std::size_t e = 0; e < sign.size(); ++e) active[e] = sign[e] < 0;
  return active;
}

}  // namespace

Matrix dJ_rhs_unconstrained(const DgSpace& space, const UnconstrainedProblem& problem) {
  const auto active = negative_elements(space);
  const DgField pi_f = l2_project(problem.f, space, active);
  return dJ_rhs_unconstrained(space, problem, pi_f);
}

Matrix dJ_rhs_unconstrained(const DgSpace& space, const UnconstrainedProblem& problem, const DgField& pi_f) {
  if (pi_f.space.size() != space.size() || pi_f.space.fine_ptr() != space.fine_ptr()) {
    throw Error("projected data does not live in the test space");
  }
  const auto active = negative_elements(space);
  const int n = space.local_dim();
  Matrix rhs = Matrix::Zero(space.size(), 2);
  double v[kMaxLocalDim], v1[kMaxLocalDim];
  Point g[kMaxLocalDim];

  for (int e = 0; e < space.num_elements(); ++e) {
    if (!active[e]) continue;
    const QuadratureRule rule = space.element_rule(e);
    const int off = space.offset(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      space.eval(e, x, v, g);
      const double w = rule.weights[q];
      const double f = problem.f(x);
      const Point df = problem.grad_f(x);
      for (int k = 0; k < n; ++k) {
        rhs(off + k, 0) += w * (df.x() * v[k] + f * g[k].x());
        rhs(off + k, 1) += w * (df.y() * v[k] + f * g[k].y());
      }
    }
  }

  for (const PolytopicFace& face : space.faces()) {
    const int e0 = face.element[0], e1 = face.element[1];
    const bool in0 = active[e0];
    const bool in1 = e1 >= 0 && active[e1];
    if (!in0 && !in1) continue;
    const QuadratureRule rule = space.face_rule(face);
    const Point& nrm = face.normal;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      const double w = rule.weights[q];
      space.eval(e0, x, v);
      const double f0 = in0 ? pi_f.eval(e0, x) : 0.0;
      if (e1 < 0) {
        // [w] = w n, {q} = q on the hold-all boundary
        for (int k = 0; k < n; ++k) {
          rhs(space.offset(e0) + k, 0) -= w * v[k] * nrm.x() * f0;
          rhs(space.offset(e0) + k, 1) -= w * v[k] * nrm.y() * f0;
        }
        continue;
      }
      space.eval(e1, x, v1);
      const double f1 = in1 ? pi_f.eval(e1, x) : 0.0;
      const double avg = 0.5 * (f0 + f1);
      for (int k = 0; k < n; ++k) {
        rhs(space.offset(e0) + k, 0) -= w * v[k] * nrm.x() * avg;
        rhs(space.offset(e0) + k, 1) -= w * v[k] * nrm.y() * avg;
        rhs(space.offset(e1) + k, 0) += w * v1[k] * nrm.x() * avg;
        rhs(space.offset(e1) + k, 1) += w * v1[k] * nrm.y() * avg;
      }
    }
  }
  return rhs;
}

BernoulliState solve_bernoulli_state(const PolytopicMeshPtr& mesh, const BernoulliProblem& problem,
                                     const SolverSettings& settings) {
  BernoulliState state;
  state.submesh = std::make_shared<const PolytopicMesh>(extract_interior_submesh(*mesh));
  const DgSpace space =
      DgSpace::polytopic(state.submesh, settings.degree, PolyBasisKind::Tensor, settings.quadrature_order);
  state.u = solve_state_laplace(space, problem.fixed_value, problem.free_value, settings.c_sigma, settings.rel_tol);
  state.sub_element.assign(mesh->num_elements(), -1);
  const auto& parent = state.submesh->parent_element();
  for (std::size_t s = 0; s < parent.size(); ++s) state.sub_element[parent[s]] = static_cast<int>(s);
  return state;
}

double objective_bernoulli(const DgField& u, double eta) {
  const DgSpace& space = u.space;
  double j = 0.0;
  for (int e = 0; e < space.num_elements(); ++e) {
    const QuadratureRule rule = space.element_rule(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      j += rule.weights[q] * (u.gradient(e, rule.points[q]).squaredNorm() + eta * eta);
    }
  }
  return j;
}

Matrix dJ_rhs_bernoulli(const DgSpace& space, const BernoulliState& state, double eta) {
  if (static_cast<int>(state.sub_element.size()) != space.num_elements()) {
    throw Error("state does not match the hold-all mesh");
  }
  if (state.u.space.fine_ptr() != space.fine_ptr()) throw Error("state lives on a different fine mesh");
  const int n = space.local_dim();
  const double eta2 = eta * eta;
  Matrix rhs = Matrix::Zero(space.size(), 2);
  double v[kMaxLocalDim], v1[kMaxLocalDim];
  Point g[kMaxLocalDim];

  for (int e = 0; e < space.num_elements(); ++e) {
    const int s = state.sub_element[e];
    if (s < 0) continue;
    const QuadratureRule rule = space.element_rule(e);
    const int off = space.offset(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      space.eval(e, x, v, g);
      const Point du = state.u.gradient(s, x);
      const double c = eta2 + du.squaredNorm();
      const double w = rule.weights[q];
      for (int k = 0; k < n; ++k) {
        const double dudw = du.dot(g[k]);
        rhs(off + k, 0) += w * (c * g[k].x() - 2 * du.x() * dudw);
        rhs(off + k, 1) += w * (c * g[k].y() - 2 * du.y() * dudw);
      }
    }
  }

  // A_i . n on one side, zero outside Omega.
  auto flux = [&](int e, const Point& x, const Point& nrm) -> Point {
    if (e < 0 || state.sub_element[e] < 0) return Point::Zero();
    const Point du = state.u.gradient(state.sub_element[e], x);
    const double c = eta2 + du.squaredNorm();
    const double dn = du.dot(nrm);
    return {c * nrm.x() - 2 * du.x() * dn, c * nrm.y() - 2 * du.y() * dn};
  };

  for (const PolytopicFace& face : space.faces()) {
    if (face.boundary()) continue;
    const int e0 = face.element[0], e1 = face.element[1];
    if (state.sub_element[e0] < 0 && state.sub_element[e1] < 0) continue;
    const QuadratureRule rule = space.face_rule(face);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      const double w = rule.weights[q];
      const Point avg = 0.5 * (flux(e0, x, face.normal) + flux(e1, x, face.normal));
      space.eval(e0, x, v);
      space.eval(e1, x, v1);
      for (int k = 0; k < n; ++k) {
        rhs(space.offset(e0) + k, 0) -= w * v[k] * avg.x();
        rhs(space.offset(e0) + k, 1) -= w * v[k] * avg.y();
        rhs(space.offset(e1) + k, 0) += w * v1[k] * avg.x();
        rhs(space.offset(e1) + k, 1) += w * v1[k] * avg.y();
      }
    }
  }
  return rhs;
}

MeshPtr move_vertices(const SimplicialMesh& mesh, const std::function<Point(const Point&)>& velocity, double t) {
  std::vector<Point> moved(mesh.vertices());
  for (auto& x : moved) x += t * velocity(x);
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto& tri = mesh.triangle(k);
    const double a = signed_area(moved[tri[0]], moved[tri[1]], moved[tri[2]]);
    if (!(a > 1e-3 * mesh.area(k))) {
      throw Error("moved mesh is tangled at triangle " + std::to_string(k) + "; use a smaller step");
    }
  }
  return std::make_shared<const SimplicialMesh>(std::move(moved), mesh.triangles());
}

double fd_shape_derivative_unconstrained(const PolytopicMesh& mesh, const UnconstrainedProblem& problem,
                                         const std::function<Point(const Point&)>& velocity, double t, int order) {
  const double j0 = objective_unconstrained(mesh, problem, order);
  const PolytopicMesh moved = with_fine_mesh(mesh, move_vertices(mesh.fine(), velocity, t));
  return (objective_unconstrained(moved, problem, order) - j0) / t;
}

double fd_shape_derivative_bernoulli(const PolytopicMesh& mesh, const BernoulliProblem& problem,
                                     const SolverSettings& settings,
                                     const std::function<Point(const Point&)>& velocity, double t) {
  auto base = std::make_shared<const PolytopicMesh>(mesh);
  auto moved = std::make_shared<const PolytopicMesh>(with_fine_mesh(mesh, move_vertices(mesh.fine(), velocity, t)));
  const double j0 = objective_bernoulli(solve_bernoulli_state(base, problem, settings).u, problem.eta);
  const double j1 = objective_bernoulli(solve_bernoulli_state(moved, problem, settings).u, problem.eta);
  return (j1 - j0) / t;
}

ReferenceCurve ReferenceCurve::circle(double radius, const Point& center) {
  ReferenceCurve c;
  c.branches.push_back([=](double s) {
    const double a = 2 * std::numbers::pi * s;
    return Point(center.x() + radius * std::cos(a), center.y() + radius * std::sin(a));
  });
  return c;
}

ReferenceCurve ReferenceCurve::cassini(double a, double b) {
  if (!(b < a)) throw Error("Cassini ovals split into two components only for b < a");
  const double a2 = a * a, a4 = a2 * a2, b4 = b * b * b * b;
  const double theta_max = 0.5 * std::asin(b * b / a2);
  ReferenceCurve c;
  for (double mirror : {1.0, -1.0}) {
    c.branches.push_back([=](double s) {
      const double sigma = 2 * std::numbers::pi * s;
      const double theta = theta_max * std::sin(sigma);
      const double s2 = std::sin(2 * theta);
      const double disc = std::sqrt(std::max(0.0, b4 - a4 * s2 * s2));
      const double r2 = a2 * std::cos(2 * theta) + (std::cos(sigma) >= 0 ? disc : -disc);
      const double r = std::sqrt(std::max(0.0, r2));
      return Point(mirror * r * std::cos(theta), r * std::sin(theta));
    });
  }
  return c;
}

ReferenceCurve ReferenceCurve::two_foci_ovals() { return cassini(0.7, 0.6); }

double ReferenceCurve::distance(const Point& x, int samples) const {
  double best = std::numeric_limits<double>::infinity();
  const double h = 1.0 / samples;
  for (const auto& curve : branches) {
    int arg = 0;
    double d_arg = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
      const double d = (curve(i * h) - x).squaredNorm();
      if (d < d_arg) {
        d_arg = d;
        arg = i;
      }
    }
    // Golden-section search on the bracketing parameter interval.
    double lo = (arg - 1) * h, hi = (arg + 1) * h;
    auto dist2 = [&](double s) { return (curve(s - std::floor(s)) - x).squaredNorm(); };
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = hi - ratio * (hi - lo), c2 = lo + ratio * (hi - lo);
    double f1 = dist2(c1), f2 = dist2(c2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        hi = c2;
        c2 = c1;
        f2 = f1;
        c1 = hi - ratio * (hi - lo);
        f1 = dist2(c1);
      } else {
        lo = c1;
        c1 = c2;
        f1 = f2;
        c2 = lo + ratio * (hi - lo);
        f2 = dist2(c2);
      }
    }
    best = std::min({best, d_arg, f1, f2});
  }
  return std::sqrt(best);
}

double zero_level_set_distance(std::span<const Point> points, const ReferenceCurve& reference) {
  if (points.empty()) throw Error("zero level set is empty");
  double d = 0.0;
  for (const Point& x : points) d = std::max(d, reference.distance(x));
  return d;
}

double zero_level_set_distance(const ContinuousField& phi, const ReferenceCurve& reference) {
  FitOptions opts;
  opts.reject_double_crossings = false;
  const FittedMesh fit = refine_to_fit(phi, opts);
  std::vector<Point> pts;
  for (int v : fit.interface_vertices()) pts.push_back(fit.mesh->vertex(v));
  return zero_level_set_distance(pts, reference);
}

}  // namespace polyls
