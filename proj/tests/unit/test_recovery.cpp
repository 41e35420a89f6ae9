#include <doctest.h>

#include "oracles.hpp"
#include "polyls/recovery.hpp"

#include <cmath>
#include <random>

using namespace polyls;
using namespace testing_helpers;

TEST_CASE("injection reproduces polytopic polynomials on every triangle") {
  auto mesh = make(square_mesh(8));
  std::vector<int> part(mesh->num_triangles());
  for (int t = 0; t < mesh->num_triangles(); ++t) part[t] = t / 7;
  auto pm = std::make_shared<const PolytopicMesh>(mesh, part);
  const DgSpace space = DgSpace::polytopic(pm, 2);

  const DgField c = l2_project([](const Point&) { return 2.5; }, space);
  const DgField ci = inject_polytopic_to_simplicial(c);
  CHECK(ci.space.degree() == 4);
  const DgField a = l2_project([](const Point& x) { return 1 - x.x() + 3 * x.y(); }, space);
  const DgField ai = inject_polytopic_to_simplicial(a, 1);
  const DgField r = random_field(space, 3);
  const DgField ri = inject_polytopic_to_simplicial(r);

  // Seven interior sample points per triangle, in barycentric coordinates.
  const std::array<Eigen::Vector3d, 7> bary = {
      Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3), Eigen::Vector3d(0.6, 0.2, 0.2), Eigen::Vector3d(0.2, 0.6, 0.2),
      Eigen::Vector3d(0.2, 0.2, 0.6),             Eigen::Vector3d(0.1, 0.45, 0.45), Eigen::Vector3d(0.45, 0.1, 0.45),
      Eigen::Vector3d(0.05, 0.15, 0.8)};
  double worst_c = 0.0, worst_a = 0.0, worst_r = 0.0;
  for (int t = 0; t < mesh->num_triangles(); ++t) {
    const auto& tri = mesh->triangle(t);
    const int e = pm->element_of(t);
    for (const auto& l : bary) {
      const Point x = l[0] * mesh->vertex(tri[0]) + l[1] * mesh->vertex(tri[1]) + l[2] * mesh->vertex(tri[2]);
      worst_c = std::max(worst_c, std::abs(ci.eval(t, x) - 2.5));
      worst_a = std::max(worst_a, std::abs(ai.eval(t, x) - a.eval(e, x)));
      worst_r = std::max(worst_r, std::abs(ri.eval(t, x) - r.eval(e, x)));
    }
  }
  CHECK(worst_c <= 1e-12);
  CHECK(worst_a <= 1e-12);
  CHECK(worst_r <= 1e-12);
  CHECK_THROWS_AS(inject_polytopic_to_simplicial(ri), Error);
}

TEST_CASE("nodal averaging examples") {
  // Triangle 0 lies below the diagonal y = x, triangle 1 above it.
  auto two = make(SimplicialMesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}}));
  const DgSpace p0 = DgSpace::simplicial(two, 0);
  const DgField f = l2_project([](const Point& x) { return x.y() < x.x() ? 1.0 : 3.0; }, p0);
  const ContinuousField avg = recover_nodal_average(f, 1, BoundaryRule::Average);
  CHECK(avg.values()[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(avg.values()[2] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(avg.values()[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(avg.values()[3] == doctest::Approx(3.0).epsilon(1e-14));
  // Every node of this mesh is on the boundary.
  const ContinuousField zero = recover_nodal_average(f, 1);
  CHECK(zero.values().cwiseAbs().maxCoeff() == 0.0);

  // Shared node between two triangles in the interior of a larger mesh.
  Matrix local(2, 3);
  local << 1, 1, 1, 3, 3, 3;
  const ContinuousField a2 = average_local_values(two, 1, local, BoundaryRule::Average);
  CHECK(a2.values()[0] == doctest::Approx(2.0));
  const std::vector<char> only_first = {1, 0};
  const ContinuousField a1 = average_local_values(two, 1, local, BoundaryRule::Average, only_first);
  CHECK(a1.values()[0] == doctest::Approx(1.0));
  CHECK(a1.values()[3] == 0.0);
  CHECK_THROWS_AS(average_local_values(two, 1, Matrix::Zero(3, 3), BoundaryRule::Zero), Error);
}

TEST_CASE("recovery of continuous input leaves interior nodes unchanged") {
  auto mesh = make(square_mesh(6));
  const std::function<double(const Point&)> fns[2] = {
      [](const Point& x) { return 1 + x.x() - 2 * x.y(); },
      [](const Point& x) { return 0.5 + x.x() * x.y() - x.y() * x.y(); }};
  for (int p : {1, 2}) {
    const DgSpace space = DgSpace::simplicial(mesh, p);
    const ContinuousField lin = ContinuousField::interpolate(mesh, p, fns[p - 1]);
    const DgField f = to_dg(lin, space);
    const ContinuousField rec = recover_nodal_average(f);
    for (int j = 0; j < rec.num_nodes(); ++j) {
      if (rec.is_boundary_node(j)) {
        CHECK(rec.values()[j] == 0.0);
      } else {
        CHECK(rec.values()[j] == doctest::Approx(lin.values()[j]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("recovery is linear, continuous, zero on the boundary and idempotent") {
  auto mesh = make(disc_mesh_with_about(600));
  for (int p : {1, 2}) {
    const DgSpace space = DgSpace::simplicial(mesh, p);
    const DgField u = random_field(space, 11 + p), v = random_field(space, 23 + p);
    const double alpha = 0.7, beta = -1.3;
    const DgField w(space, alpha * u.coeffs + beta * v.coeffs);
    const ContinuousField eu = recover_nodal_average(u), ev = recover_nodal_average(v), ew = recover_nodal_average(w);
    CHECK((ew.values() - (alpha * eu.values() + beta * ev.values())).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(max_edge_jump(ew) <= 1e-12);
    for (int j = 0; j < ew.num_nodes(); ++j) {
      if (ew.is_boundary_node(j)) CHECK(ew.values()[j] == 0.0);
    }
    const ContinuousField twice = recover_nodal_average(to_dg(eu, space));
    double diff = 0.0;
    for (int j = 0; j < eu.num_nodes(); ++j) {
      if (!eu.is_boundary_node(j)) diff = std::max(diff, std::abs(twice.values()[j] - eu.values()[j]));
    }
    CHECK(diff <= 1e-12);
  }
}

TEST_CASE("recovery of polytopic fields and sub-meshes") {
  auto base = make(square_mesh(12));
  const FittedMesh fit =
      refine_to_fit(ContinuousField::interpolate(base, 1, [](const Point& x) { return x.norm() - 0.5; }));
  const auto [kp, km] = split_element_budget(40, fit.count(1), fit.count(-1));
  const PolytopicMesh pm = agglomerate(fit, kp, km, 2);
  auto full = std::make_shared<const PolytopicMesh>(pm);
  auto sub = std::make_shared<const PolytopicMesh>(extract_interior_submesh(pm));

  const DgSpace fs = DgSpace::polytopic(full, 2);
  const DgField r = random_field(fs, 5);
  const ContinuousField rec = recover_nodal_average(r);
  CHECK(max_edge_jump(rec) <= 1e-12);
  // Recovery through the injected field gives the same nodal values.
  const ContinuousField via = recover_nodal_average(inject_polytopic_to_simplicial(r), 2);
  CHECK((via.values() - rec.values()).cwiseAbs().maxCoeff() <= 1e-11);

  // Constant on the sub-mesh: nodes on the free boundary see only inside triangles.
  const DgSpace ss = DgSpace::polytopic(sub, 2);
  const DgField one = l2_project([](const Point&) { return 1.0; }, ss);
  const ContinuousField c = recover_nodal_average(one, 2, BoundaryRule::Average);
  for (int v : fit.interface_vertices()) CHECK(c.values()[v] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("restriction from the fitted mesh to the base mesh") {
  auto base = make(square_mesh(10));
  const FittedMesh fit =
      refine_to_fit(ContinuousField::interpolate(base, 2, [](const Point& x) { return x.norm() - 0.63; }));
  auto q = [](const Point& x) { return 0.3 - x.x() + 2 * x.x() * x.y() + x.y() * x.y(); };
  const ContinuousField on_fit = ContinuousField::interpolate(fit.mesh, 2, q);
  const ContinuousField back = restrict_to_base(on_fit, fit, base);
  const ContinuousField expected = ContinuousField::interpolate(base, 2, q);
  CHECK((back.values() - expected.values()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(restrict_to_base(expected, fit, base), Error);
}
