#include <doctest.h>

#include "oracles.hpp"
#include "polyls/quadrature.hpp"
#include "polyls/transport.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace polyls;
using namespace testing_helpers;

namespace {

/// 1/2 sum over interior edges of int |V.n| [u]^2 minus 1/2 int div(V) u^2, which is
/// u^T K u for the upwind form when V vanishes on the boundary.
double energy_oracle(const TransportOperator& op, const DgField& u) {
  const SimplicialMesh& m = op.space.fine();
  double s = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const QuadratureRule rule = triangle_rule(m, t, 10);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      const double div = op.velocity.x.gradient(t, x).x() + op.velocity.y.gradient(t, x).y();
      const double v = u.eval(t, x);
      s -= 0.5 * rule.weights[q] * div * v * v;
    }
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ed = m.edge(e);
    if (ed.boundary()) continue;
    const Point n = m.edge_normal(e, 0);
    const QuadratureRule rule = face_quadrature(m.vertex(ed.v[0]), m.vertex(ed.v[1]), 12);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      const double jump = u.eval(ed.tri[0], x) - u.eval(ed.tri[1], x);
      s += 0.5 * rule.weights[q] * std::abs(op.velocity.eval(ed.tri[0], x).dot(n)) * jump * jump;
    }
  }
  return s;
}

std::vector<std::vector<int>> edge_neighbors(const SimplicialMesh& m) {
  std::vector<std::vector<int>> nb(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      const int o = m.neighbor(t, i);
      if (o >= 0) nb[t].push_back(o);
    }
  }
  return nb;
}

}  // namespace

TEST_CASE("transport mass matrix is diagonal") {
  auto mesh = make(disc_mesh_with_about(300));
  for (int p : {0, 1, 2}) {
    const DgSpace space = DgSpace::simplicial(mesh, p);
    for (int t = 0; t < space.num_elements(); ++t) {
      const Matrix mt = local_mass(space, t);
      for (int i = 0; i < mt.rows(); ++i) {
        for (int j = 0; j < mt.cols(); ++j) {
          if (i != j) CHECK(std::abs(mt(i, j)) <= 1e-12 * mt(i, i));
        }
      }
    }
    const TransportOperator op = build_transport(space, vector_field(mesh, swirl));
    CHECK(op.mass_diagonal.minCoeff() > 0.0);
  }
}

TEST_CASE("zero velocity leaves the level set unchanged") {
  auto mesh = make(disc_mesh_with_about(300));
  const DgSpace space = DgSpace::simplicial(mesh, 2);
  const TransportOperator op = build_transport(space, vector_field(mesh, [](const Point&) { return Point::Zero(); }));
  CHECK(op.stiffness.norm() == 0.0);
  const CflStep c = cfl_dt(op, 0.3);
  CHECK(c.stationary);
  CHECK(std::isinf(c.dt));
  const DgField phi = l2_project([](const Point& x) { return x.squaredNorm() - 0.3; }, space);
  const auto snaps = advect(op, phi, 0.01, 12);
  CHECK(snaps.size() == 4);
  CHECK(snaps.back().steps == 12);
  CHECK(snaps.back().time == doctest::Approx(0.12));
  CHECK((snaps.back().phi.coeffs - phi.coeffs).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("advect with no steps returns the initial condition") {
  auto mesh = make(disc_mesh_with_about(200));
  const DgSpace space = DgSpace::simplicial(mesh, 1);
  const TransportOperator op = build_transport(space, vector_field(mesh, swirl));
  const DgField phi = l2_project([](const Point& x) { return x.x(); }, space);
  const auto snaps = advect(op, phi, 0.01, 0);
  REQUIRE(snaps.size() == 1);
  CHECK(snaps[0].phi.coeffs == phi.coeffs);
  CHECK(snaps[0].steps == 0);
  CHECK_THROWS_AS(advect(op, phi, 0.01, -1), Error);
  CHECK_THROWS_AS(advect(op, phi, 0.01, 3, 0), Error);
  const DgField other = l2_project([](const Point& x) { return x.x(); }, DgSpace::simplicial(mesh, 2));
  CHECK_THROWS_AS(advect(op, other, 0.01, 1), Error);
}

TEST_CASE("snapshots are taken every five steps and after the last") {
  auto mesh = make(disc_mesh_with_about(200));
  const DgSpace space = DgSpace::simplicial(mesh, 1);
  const TransportOperator op = build_transport(space, vector_field(mesh, swirl));
  const DgField phi = l2_project([](const Point& x) { return x.x(); }, space);
  const auto snaps = advect(op, phi, 1e-3, 12);
  REQUIRE(snaps.size() == 4);
  CHECK(snaps[1].steps == 5);
  CHECK(snaps[2].steps == 10);
  CHECK(snaps[3].steps == 12);
  // Same as stepping by hand.
  LevelSetState s{phi, 0.0, 0};
  for (int i = 0; i < 10; ++i) s = rkdg_step(op, s, 1e-3);
  CHECK((s.phi.coeffs - snaps[2].phi.coeffs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Runge-Kutta amplification on a scalar surrogate") {
  auto mesh = make(disc_mesh_with_about(100));
  const DgSpace space = DgSpace::simplicial(mesh, 1);
  const double lambda = -3.0, dt = 0.1, z = lambda * dt;
  TransportOperator op{space, {}, {}, {}, {}, 0.0};
  op.rate.resize(space.size(), space.size());
  op.rate.setIdentity();
  op.rate *= lambda;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  DgField phi(space);
  for (int i = 0; i < space.size(); ++i) phi.coeffs[i] = u(rng);
  const LevelSetState s0{phi, 0.0, 0};
  const LevelSetState heun = rkdg_step(op, s0, dt);
  CHECK((heun.phi.coeffs - (1 + z + z * z / 2) * phi.coeffs).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(heun.time == doctest::Approx(dt));
  CHECK(heun.steps == 1);
  const LevelSetState rk3 = rkdg_step(op, s0, dt, TimeScheme::SspRk3);
  CHECK((rk3.phi.coeffs - (1 + z + z * z / 2 + z * z * z / 6) * phi.coeffs).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(rkdg_step(op, s0, 0.0), Error);
  // A wildly unstable step reports blow-up.
  op.rate *= 1e200;
  CHECK_THROWS_AS(rkdg_step(op, s0, 1e200), Error);
}

TEST_CASE("CFL step follows the formula") {
  // Square mesh scaled so that every triangle has diameter 0.1.
  const SimplicialMesh sq = square_mesh(20);
  std::vector<Point> v = sq.vertices();
  for (Point& x : v) x /= std::sqrt(2.0);
  auto mesh = make(SimplicialMesh(v, sq.triangles()));
  const DgSpace space = DgSpace::simplicial(mesh, 2);
  // Built by hand: a uniform field does not vanish on the boundary.
  const TransportOperator op{space,
                             {ContinuousField::interpolate(mesh, 2, [](const Point&) { return 0.6; }),
                              ContinuousField::interpolate(mesh, 2, [](const Point&) { return -0.8; })},
                             {},
                             {},
                             {},
                             1.0};
  const CflStep c = cfl_dt(op, 0.5);
  CHECK_FALSE(c.stationary);
  CHECK(c.dt == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS_AS(cfl_dt(op, 0.0), Error);
  CHECK_THROWS_AS(cfl_dt(op, 1.5), Error);
  CHECK_THROWS_AS(build_transport(space, op.velocity), Error);
  CHECK_THROWS_AS(build_transport(DgSpace::polytopic(cell_mesh(4), 1), op.velocity), Error);
}

TEST_CASE("energy production equals face dissipation minus the divergence term") {
  auto mesh = make(square_mesh(10));
  for (int p : {0, 1, 2}) {
    const DgSpace space = DgSpace::simplicial(mesh, p);
    const TransportOperator op = build_transport(space, vector_field(mesh, [](const Point& x) {
      return cutoff(x, 0.3) * Point(-x.y(), x.x());
    }));
    std::mt19937_64 rng(17 + p);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 5; ++trial) {
      DgField w(space);
      for (int i = 0; i < space.size(); ++i) w.coeffs[i] = u(rng);
      const double energy = w.coeffs.dot(op.stiffness * w.coeffs);
      CHECK(energy == doctest::Approx(energy_oracle(op, w)).epsilon(1e-11));
    }
  }
}

TEST_CASE("piecewise constant transport keeps the maximum principle") {
  auto mesh = make(disc_mesh_with_about(1500));
  const DgSpace space = DgSpace::simplicial(mesh, 0);
  const TransportOperator op = build_transport(space, vector_field(mesh, [](const Point& x) {
    return cutoff(x, 0.4) * Point(1.0 - x.y(), 0.5 + x.x());
  }));
  const auto nb = edge_neighbors(space.fine());
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  DgField phi(space);
  for (int i = 0; i < space.size(); ++i) phi.coeffs[i] = u(rng);
  // Forward Euler with p = 0 is monotone when L has non-negative off-diagonals and
  // dt |L_tt| <= 1; Heun is a convex combination of two such steps.
  double diag = 0.0;
  for (int k = 0; k < op.rate.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(op.rate, k); it; ++it) {
      if (it.row() == it.col()) {
        diag = std::max(diag, -it.value());
      } else {
        CHECK(it.value() >= -1e-14);
      }
    }
  }
  const double dt_cfl = cfl_dt(op, 0.5).dt, dt = std::min(dt_cfl, 1.0 / diag);
  MESSAGE("monotone step limit is " << (1.0 / diag) / dt_cfl << " times the cfl 0.5 step");
  LevelSetState s{phi, 0.0, 0};
  const SimplicialMesh& m = space.fine();
  auto cell_values = [&](const DgField& f) {
    Vector v(m.num_triangles());
    for (int t = 0; t < m.num_triangles(); ++t) v[t] = f.eval(t, m.barycenter(t));
    return v;
  };
  for (int step = 0; step < 20; ++step) {
    const LevelSetState next = rkdg_step(op, s, dt);
    const Vector before = cell_values(s.phi), after = cell_values(next.phi);
    // Both Heun stages look one neighbor further.
    int bad = 0;
    for (int t = 0; t < m.num_triangles(); ++t) {
      std::set<int> ring{t};
      for (int a : nb[t]) {
        ring.insert(a);
        for (int b : nb[a]) ring.insert(b);
      }
      double lo = before[t], hi = lo;
      for (int k : ring) {
        lo = std::min(lo, before[k]);
        hi = std::max(hi, before[k]);
      }
      if (after[t] < lo - 1e-12 || after[t] > hi + 1e-12) ++bad;
    }
    CHECK(bad == 0);
    s = next;
  }
}

TEST_CASE("interior translation moves the level set and keeps its mass") {
  auto mesh = make(disc_mesh_with_about(4000));
  const Point vel(0.3, 0.1);
  auto bump = [](const Point& x) {
    const double r2 = (x - Point(-0.15, -0.05)).squaredNorm() / 0.09;
    return r2 < 1 ? std::pow(1 - r2, 4) : 0.0;
  };
  for (int p : {1, 2}) {
    const DgSpace space = DgSpace::simplicial(mesh, p);
    const TransportOperator op =
        build_transport(space, vector_field(mesh, [&](const Point& x) { return cutoff(x, 0.75) * vel; }));
    const DgField phi0 = l2_project(bump, space);
    const double T = 0.5;
    const int steps = static_cast<int>(std::ceil(T / cfl_dt(op, 0.3).dt));
    const auto snaps = advect(op, phi0, T / steps, steps);
    const DgField& phi = snaps.back().phi;
    auto mass = [](const DgField& f) {
      double m = 0.0;
      for (int t = 0; t < f.space.num_elements(); ++t) {
        const QuadratureRule r = f.space.element_rule(t, 6);
        for (std::size_t q = 0; q < r.size(); ++q) m += r.weights[q] * f.eval(t, r.points[q]);
      }
      return m;
    };
    const double exact_mass = std::numbers::pi * 0.09 / 5.0;
    CHECK(mass(phi0) == doctest::Approx(exact_mass).epsilon(1e-3));
    CHECK(mass(phi) == doctest::Approx(mass(phi0)).epsilon(p == 1 ? 1e-2 : 2e-3));
    const double err = l2_error(phi, [&](const Point& x) { return bump(x - T * vel); });
    MESSAGE("p = " << p << " translation L2 error " << err);
    CHECK(err <= (p == 1 ? 1e-2 : 2e-3));
  }
}

TEST_CASE("rigid rotation converges at order p + 1/2 or better") {
  const double T = 2 * std::numbers::pi;
  for (int p : {1, 2}) {
    double prev_err = 0.0, prev_h = 0.0;
    for (int n : {500, 2000, 8000}) {
      auto mesh = make(disc_mesh_with_about(n));
      const DgSpace space = DgSpace::simplicial(mesh, p);
      const TransportOperator op = build_transport(space, vector_field(mesh, swirl));
      const int steps = static_cast<int>(std::ceil(T / cfl_dt(op, 0.3).dt));
      const DgField phi0 = l2_project([](const Point& x) { return x.x(); }, space);
      const auto snaps = advect(op, phi0, T / steps, steps, steps);
      // Points at radius r turn by cutoff(r) T; the inner disc makes full turns.
      const double err = l2_error(snaps.back().phi, [&](const Point& x) {
        const double a = -cutoff(x) * T;
        return std::cos(a) * x.x() - std::sin(a) * x.y();
      });
      double h = 0.0;
      for (int t = 0; t < mesh->num_triangles(); ++t) h = std::max(h, mesh->diameter(t));
      if (prev_err > 0.0) {
        const double rate = std::log(prev_err / err) / std::log(prev_h / h);
        MESSAGE("p = " << p << " triangles " << mesh->num_triangles() << " rate " << rate);
        CHECK(rate >= p + 0.5);
      }
      prev_err = err;
      prev_h = h;
    }
  }
}
