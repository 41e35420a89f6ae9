#include "polyls/transport.hpp"

#include <cmath>

namespace polyls {

TransportOperator build_transport(const DgSpace& space, const ContinuousVectorField& velocity) {
  if (space.is_polytopic()) throw Error("transport is solved on the simplicial mesh");
  const SimplicialMesh& mesh = space.fine();
  if (velocity.x.mesh_ptr() != space.fine_ptr() || velocity.y.mesh_ptr() != space.fine_ptr()) {
    throw Error("velocity field lives on a different mesh");
  }
  double boundary_speed = 0.0;
  for (int j = 0; j < velocity.x.num_nodes(); ++j) {
    if (velocity.x.is_boundary_node(j)) {
      boundary_speed = std::max(boundary_speed, std::hypot(velocity.x.values()[j], velocity.y.values()[j]));
    }
  }
  if (boundary_speed > 1e-10) {
    throw Error("velocity does not vanish on the hold-all boundary (max |V| = " + std::to_string(boundary_speed) + ")");
  }

  TransportOperator op;
  op.space = space;
  op.velocity = velocity;
  const int n = space.local_dim();
  std::vector<Eigen::Triplet<double>> trip;
  op.mass_diagonal = Vector::Zero(space.size());
  double v[kMaxLocalDim], vn[kMaxLocalDim];
  Point g[kMaxLocalDim];

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Matrix k = Matrix::Zero(n, n);
    const QuadratureRule rule = space.element_rule(t);
    const int off = space.offset(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      space.eval(t, x, v, g);
      const Point vel = velocity.eval(t, x);
      op.max_speed = std::max(op.max_speed, vel.norm());
      const double w = rule.weights[q];
      for (int i = 0; i < n; ++i) {
        op.mass_diagonal[off + i] += w * v[i] * v[i];
        for (int j = 0; j < n; ++j) k(i, j) += w * vel.dot(g[j]) * v[i];
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) trip.emplace_back(off + i, off + j, k(i, j));
    }
  }

  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& edge = mesh.edge(e);
    if (edge.boundary()) continue;  // V vanishes there
    const Point n0 = mesh.edge_normal(e, 0);
    const QuadratureRule rule = face_quadrature(mesh.vertex(edge.v[0]), mesh.vertex(edge.v[1]), space.quadrature_order());
    const int t0 = edge.tri[0], t1 = edge.tri[1];
    Matrix blocks[2][2] = {{Matrix::Zero(n, n), Matrix::Zero(n, n)}, {Matrix::Zero(n, n), Matrix::Zero(n, n)}};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      const double vdotn = velocity.eval(t0, x).dot(n0);
      if (vdotn == 0.0) continue;
      space.eval(t0, x, v);
      space.eval(t1, x, vn);
      // Inflow side: t0 if V.n0 < 0, otherwise t1 (whose outward normal is -n0).
      const int in = vdotn < 0 ? 0 : 1;
      const double flux = in == 0 ? vdotn : -vdotn;  // V . n_in < 0
      const double* val_in = in == 0 ? v : vn;
      const double* val_out = in == 0 ? vn : v;
      const double w = rule.weights[q];
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          blocks[in][in](i, j) -= w * flux * val_in[j] * val_in[i];
          blocks[in][1 - in](i, j) += w * flux * val_out[j] * val_in[i];
        }
      }
    }
    const int off[2] = {space.offset(t0), space.offset(t1)};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            if (blocks[a][b](i, j) != 0.0) trip.emplace_back(off[a] + i, off[b] + j, blocks[a][b](i, j));
          }
        }
      }
    }
  }
  op.stiffness.resize(space.size(), space.size());
  op.stiffness.setFromTriplets(trip.begin(), trip.end());
  op.stiffness.makeCompressed();
  if (op.mass_diagonal.minCoeff() <= 0) throw Error("transport mass matrix is not positive");
  op.rate = -(op.mass_diagonal.cwiseInverse().asDiagonal() * op.stiffness);
  op.rate.makeCompressed();
  return op;
}

CflStep cfl_dt(const TransportOperator& op, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw Error("CFL number must lie in (0, 1]");
  const DgSpace& space = op.space;
  const SimplicialMesh& mesh = space.fine();
  double dt = std::numeric_limits<double>::infinity();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double speed = 0.0;
    for (const Point& x : space.element_rule(t).points) speed = std::max(speed, op.velocity.eval(t, x).norm());
    if (speed < 1e-14) continue;
    dt = std::min(dt, cfl * mesh.diameter(t) / ((2 * space.degree() + 1) * speed));
  }
  CflStep out;
  out.dt = dt;
  out.stationary = !std::isfinite(dt);
  return out;
}

LevelSetState rkdg_step(const TransportOperator& op, const LevelSetState& state, double dt, TimeScheme scheme) {
  if (!(dt > 0)) throw Error("time step must be positive");
  const Vector& u = state.phi.coeffs;
  Vector next;
  if (scheme == TimeScheme::Heun) {
    const Vector k1 = op.rate * u;
    const Vector k2 = op.rate * (u + dt * k1);
    next = u + 0.5 * dt * (k1 + k2);
  } else {
    const Vector u1 = u + dt * (op.rate * u);
    const Vector u2 = 0.75 * u + 0.25 * (u1 + dt * (op.rate * u1));
    next = u / 3.0 + (2.0 / 3.0) * (u2 + dt * (op.rate * u2));
  }
  if (!next.allFinite()) throw Error("level-set transport blew up; reduce the time step");
  LevelSetState out{DgField(state.phi.space, std::move(next)), state.time + dt, state.steps + 1};
  return out;
}

std::vector<LevelSetState> advect(const TransportOperator& op, const DgField& phi0, double dt, int steps, int every,
                                  TimeScheme scheme) {
  if (steps < 0) throw Error("step count must be non-negative");
  if (every < 1) throw Error("snapshot interval must be positive");
  if (phi0.space.size() != op.space.size() || phi0.space.fine_ptr() != op.space.fine_ptr() ||
      phi0.space.degree() != op.space.degree()) {
    throw Error("initial level set does not live in the transport space");
  }
  std::vector<LevelSetState> snaps;
  LevelSetState state{phi0, 0.0, 0};
  snaps.push_back(state);
  for (int s = 1; s <= steps; ++s) {
    state = rkdg_step(op, state, dt, scheme);
    if (s % every == 0 || s == steps) snaps.push_back(state);
  }
  return snaps;
}

}  // namespace polyls
