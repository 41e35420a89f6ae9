#include <doctest.h>

#include "polyls/convergence.hpp"
#include "polyls/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace polyls;

namespace {

constexpr double kPi = std::numbers::pi;

Point bubble(const Point& x) {
  const double s = std::sin(kPi * x.x()) * std::sin(kPi * x.y());
  return {s, 0.5 * s * x.x()};
}

/// -Laplace g + g for the bubble above, computed by hand.
Point bubble_load(const Point& x) {
  const double sx = std::sin(kPi * x.x()), cx = std::cos(kPi * x.x());
  const double sy = std::sin(kPi * x.y());
  const double s = sx * sy;
  const double gy_lap = 0.5 * (-2.0 * kPi * kPi * x.x() * s + 2.0 * kPi * cx * sy);
  return {(2.0 * kPi * kPi + 1.0) * s, -gy_lap + 0.5 * x.x() * s};
}

double bubble_error(int n) {
  auto mesh = std::make_shared<const SimplicialMesh>(square_mesh(n));
  UnconstrainedProblem data;
  data.f = [](const Point&) { return 0.0; };
  data.grad_f = bubble_load;
  const std::vector<Sign> inside(static_cast<std::size_t>(mesh->num_triangles()), -1);
  const ContinuousVectorField g = conforming_shape_gradient(mesh, inside, data, 6);
  double sum = 0.0;
  for (int t = 0; t < mesh->num_triangles(); ++t) {
    const QuadratureRule rule = triangle_rule(*mesh, t, 8);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      sum += rule.weights[q] * (g.eval(t, rule.points[q]) - bubble(rule.points[q])).squaredNorm();
    }
  }
  return std::sqrt(sum);
}

}  // namespace

TEST_CASE("convergence_rate") {
  CHECK(convergence_rate(1.0, 0.5, 10.0, 40.0) == doctest::Approx(-0.5));
  CHECK(convergence_rate(1e-3, 1e-3 / 8.0, 36.0, 144.0) == doctest::Approx(-1.5));
}

TEST_CASE("conforming reference: manufactured solution") {
  // f = 0 and Omega = D turn the load into (grad_f . E_i, w), so g solves -Laplace g + g = F.
  const double e8 = bubble_error(8);
  const double e16 = bubble_error(16);
  MESSAGE("P2 errors " << e8 << " " << e16);
  CHECK(e16 < 2e-3);
  CHECK(std::log2(e8 / e16) > 2.7);
}

TEST_CASE("conforming reference: sign selects Omega") {
  auto mesh = std::make_shared<const SimplicialMesh>(square_mesh(6));
  const std::vector<Sign> outside(static_cast<std::size_t>(mesh->num_triangles()), 1);
  const ContinuousVectorField g = conforming_shape_gradient(mesh, outside, UnconstrainedProblem::two_foci());
  CHECK(g.x.values().cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.y.values().cwiseAbs().maxCoeff() == 0.0);
  const std::vector<Sign> wrong(3, -1);
  CHECK_THROWS_AS(conforming_shape_gradient(mesh, wrong, UnconstrainedProblem::two_foci()), Error);
}

TEST_CASE("l2_distance") {
  auto mesh = std::make_shared<const SimplicialMesh>(square_mesh(4));
  const DgSpace space = DgSpace::simplicial(mesh, 2);
  const auto quad = [](const Point& x) { return 1.0 + x.x() - 2.0 * x.x() * x.y() + 0.5 * x.y() * x.y(); };
  const DgField u = l2_project(quad, space);

  const ContinuousField zero(mesh, 2);
  const DgField one = l2_project([](const Point&) { return 1.0; }, space);
  CHECK(l2_distance(one, zero) == doctest::Approx(2.0).epsilon(1e-12));

  // A quadratic is exact in both spaces, also after a red refinement of the reference.
  CHECK(l2_distance(u, ContinuousField::interpolate(mesh, 2, quad)) < 1e-12);
  auto fine = std::make_shared<const SimplicialMesh>(uniform_refine(*mesh));
  CHECK(l2_distance(u, ContinuousField::interpolate(fine, 2, quad), 1) < 1e-12);
  CHECK_THROWS_AS(l2_distance(u, ContinuousField::interpolate(fine, 2, quad), 0), Error);
}

TEST_CASE("shape_gradient_convergence: small study") {
  ConvergenceStudy s;
  s.base_cells = 24;
  s.elements = {16, 64};
  s.degrees = {1};
  const ConvergenceTable t = shape_gradient_convergence(s);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.reference_triangles == t.fine_triangles);
  CHECK(t.rows[0].level == 1);
  CHECK(std::isnan(t.rows[0].rates[0]));
  CHECK(t.rows[1].errors[0] < t.rows[0].errors[0]);
  CHECK(t.rows[1].rates[0] == doctest::Approx(convergence_rate(t.rows[0].errors[0], t.rows[1].errors[0],
                                                               t.rows[0].elements, t.rows[1].elements)));
  s.elements.clear();
  CHECK_THROWS_AS(shape_gradient_convergence(s), Error);
}
