#include "polyls/convergence.hpp"

#include "polyls/elliptic.hpp"
#include "polyls/polytopic_mesh.hpp"
#include "polyls/quadrature.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>

namespace polyls {

namespace {

/// P2 Lagrange shape gradients at barycentric point `l` (local order of ContinuousField).
std::array<Point, 6> p2_gradients(const Eigen::Vector3d& l, const std::array<Point, 3>& dl) {
  return {(4 * l[0] - 1) * dl[0],
          (4 * l[1] - 1) * dl[1],
          (4 * l[2] - 1) * dl[2],
          4 * (l[1] * dl[2] + l[2] * dl[1]),
          4 * (l[2] * dl[0] + l[0] * dl[2]),
          4 * (l[0] * dl[1] + l[1] * dl[0])};
}

}  // namespace

void ConvergenceStudy::validate() const {
  if (!(half_width > 0.0)) throw Error("convergence study: half width must be positive");
  if (!(radius > 0.0 && radius < half_width)) throw Error("convergence study: the disc must lie inside the square");
  if (base_cells < 2) throw Error("convergence study: base_cells must be at least 2");
  if (reference_refinements < 0 || reference_refinements > 3) {
    throw Error("convergence study: reference_refinements must lie in 0..3");
  }
  if (elements.empty()) throw Error("convergence study: no refinement levels");
  for (int n : elements) {
    if (n < 2) throw Error("convergence study: every level needs at least two elements");
  }
  if (degrees.empty()) throw Error("convergence study: no degrees");
  for (int p : degrees) {
    if (p < 1 || p > 3) throw Error("convergence study: degrees must lie in 1..3");
  }
  if (!(c_sigma > 0.0)) throw Error("convergence study: penalty constant must be positive");
  if (!(solver_tol > 0.0)) throw Error("convergence study: solver tolerance must be positive");
}

double convergence_rate(double e0, double e1, double n0, double n1) { return std::log(e1 / e0) / std::log(n1 / n0); }

ContinuousVectorField conforming_shape_gradient(const MeshPtr& mesh, std::span<const Sign> sign,
                                                const UnconstrainedProblem& problem, int quadrature_order) {
  if (sign.size() != static_cast<std::size_t>(mesh->num_triangles())) {
    throw Error("conforming reference: one sign per triangle is required");
  }
  ContinuousField gx(mesh, 2);
  const int n = gx.num_nodes();
  std::vector<Eigen::Triplet<double>> trip;
  Matrix rhs = Matrix::Zero(n, 2);
  const auto& ref = reference_triangle_rule(std::max(quadrature_order, 4));
  double shape[6];
  for (int t = 0; t < mesh->num_triangles(); ++t) {
    const auto nodes = gx.triangle_nodes(t);
    const auto dl = barycentric_gradients(*mesh, t);
    const Triangle& tri = mesh->triangle(t);
    const Point a = mesh->vertex(tri[0]), b = mesh->vertex(tri[1]), c = mesh->vertex(tri[2]);
    const double area = mesh->area(t);
    const bool inside = sign[static_cast<std::size_t>(t)] < 0;
    Eigen::Matrix<double, 6, 6> local = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 2> load = Eigen::Matrix<double, 6, 2>::Zero();
    for (std::size_t q = 0; q < ref.size(); ++q) {
      // Reference points are (s, t) on the unit triangle with weights summing to 1/2.
      const Point& r = ref.points[q];
      const Eigen::Vector3d l(1.0 - r.x() - r.y(), r.x(), r.y());
      const Point x = l[0] * a + l[1] * b + l[2] * c;
      const double w = 2.0 * area * ref.weights[q];
      lagrange_shape(2, l, shape);
      const auto grad = p2_gradients(l, dl);
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) local(i, j) += w * (grad[i].dot(grad[j]) + shape[i] * shape[j]);
      }
      if (!inside) continue;
      const double f = problem.f(x);
      const Point df = problem.grad_f(x);
      for (int i = 0; i < 6; ++i) {
        load(i, 0) += w * (f * grad[i].x() + df.x() * shape[i]);
        load(i, 1) += w * (f * grad[i].y() + df.y() * shape[i]);
      }
    }
    for (int i = 0; i < 6; ++i) {
      rhs.row(nodes[i]) += load.row(i);
      for (int j = 0; j < 6; ++j) trip.emplace_back(nodes[i], nodes[j], local(i, j));
    }
  }
  // Homogeneous Dirichlet data: boundary rows and columns become identity.
  std::vector<char> fixed(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) fixed[static_cast<std::size_t>(j)] = gx.is_boundary_node(j);
  std::vector<Eigen::Triplet<double>> kept;
  kept.reserve(trip.size());
  for (const auto& e : trip) {
    if (!fixed[static_cast<std::size_t>(e.row())] && !fixed[static_cast<std::size_t>(e.col())]) kept.push_back(e);
  }
  for (int j = 0; j < n; ++j) {
    if (fixed[static_cast<std::size_t>(j)]) {
      kept.emplace_back(j, j, 1.0);
      rhs.row(j).setZero();
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(kept.begin(), kept.end());
  const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw Error("conforming reference: factorization failed");
  const Matrix x = ldlt.solve(rhs);
  return {ContinuousField(mesh, 2, x.col(0)), ContinuousField(mesh, 2, x.col(1))};
}

double l2_distance(const DgField& field, const ContinuousField& ref, int refinements, int quadrature_order) {
  const SimplicialMesh& mesh = ref.mesh();
  const int children = 1 << (2 * refinements);
  if (refinements < 0 || field.space.fine().num_triangles() * children != mesh.num_triangles()) {
    throw Error("l2_distance: the reference mesh is not a refinement of the dG field's mesh");
  }
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const int e = field.space.element_of_triangle(t / children);
    const QuadratureRule rule = triangle_rule(mesh, t, quadrature_order);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double d = field.eval(e, rule.points[q]) - ref.eval(t, rule.points[q]);
      sum += rule.weights[q] * d * d;
    }
  }
  return std::sqrt(sum);
}

ConvergenceTable shape_gradient_convergence(const ConvergenceStudy& study) {
  study.validate();
  auto base = std::make_shared<const SimplicialMesh>(square_mesh(study.base_cells, study.half_width));
  const double r = study.radius;
  const ContinuousField phi = ContinuousField::interpolate(base, 1, [r](const Point& x) { return x.norm() - r; });
  const FittedMesh fitted = refine_to_fit(phi);
  MeshPtr ref_mesh = fitted.mesh;
  std::vector<Sign> ref_sign = fitted.sign;
  for (int k = 0; k < study.reference_refinements; ++k) {
    ref_mesh = std::make_shared<const SimplicialMesh>(uniform_refine(*ref_mesh));
    std::vector<Sign> children;
    children.reserve(4 * ref_sign.size());
    for (Sign s : ref_sign) children.insert(children.end(), 4, s);
    ref_sign = std::move(children);
  }
  const ContinuousVectorField ref = conforming_shape_gradient(ref_mesh, ref_sign, study.problem, study.quadrature_order);

  ConvergenceTable table;
  table.fine_triangles = fitted.mesh->num_triangles();
  table.reference_triangles = ref_mesh->num_triangles();
  table.degrees = study.degrees;
  for (std::size_t level = 0; level < study.elements.size(); ++level) {
    const auto [k_plus, k_minus] = split_element_budget(study.elements[level], fitted.count(1), fitted.count(-1));
    auto poly = std::make_shared<const PolytopicMesh>(agglomerate(fitted, k_plus, k_minus, study.seed));
    ConvergenceRow row;
    row.level = static_cast<int>(level) + 1;
    row.elements = poly->num_elements();
    for (int p : study.degrees) {
      const DgSpace space = DgSpace::polytopic(poly, p, PolyBasisKind::Tensor, study.quadrature_order);
      const IpdgOperator op = assemble_ipdg(space, study.c_sigma, true);
      const auto g = solve_shape_gradient(op, dJ_rhs_unconstrained(space, study.problem), study.solver_tol);
      const double ex = l2_distance(g[0], ref.x, study.reference_refinements);
      const double ey = l2_distance(g[1], ref.y, study.reference_refinements);
      row.errors.push_back(std::hypot(ex, ey));
    }
    for (std::size_t k = 0; k < study.degrees.size(); ++k) {
      row.rates.push_back(table.rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                                             : convergence_rate(table.rows.back().errors[k], row.errors[k],
                                                                table.rows.back().elements, row.elements));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace polyls
