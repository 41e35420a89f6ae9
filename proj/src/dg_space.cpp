#include "polyls/dg_space.hpp"

#include <cmath>
#include <map>

namespace polyls {

DgSpace DgSpace::polytopic(PolytopicMeshPtr mesh, int degree, PolyBasisKind kind, int quadrature_order) {
  if (!mesh) throw Error("polytopic space needs a mesh");
  if (degree < 0) throw Error("polynomial degree must be non-negative");
  DgSpace s;
  s.fine_ = mesh->fine_ptr();
  s.poly_ = std::move(mesh);
  s.degree_ = degree;
  s.kind_ = kind;
  s.quad_order_ = quadrature_order;
  s.num_elements_ = s.poly_->num_elements();
  s.local_dim_ = legendre_box_dim(degree, kind);
  if (s.local_dim_ > kMaxLocalDim) throw Error("polynomial degree too high");
  return s;
}

DgSpace DgSpace::simplicial(MeshPtr mesh, int degree, int quadrature_order) {
  if (!mesh) throw Error("simplicial space needs a mesh");
  if (degree < 0) throw Error("polynomial degree must be non-negative");
  DgSpace s;
  s.fine_ = std::move(mesh);
  s.degree_ = degree;
  s.kind_ = PolyBasisKind::TotalDegree;
  s.quad_order_ = quadrature_order;
  s.num_elements_ = s.fine_->num_triangles();
  s.local_dim_ = triangle_dim(degree);
  if (s.local_dim_ > kMaxLocalDim) throw Error("polynomial degree too high");
  auto faces = std::make_shared<std::vector<PolytopicFace>>();
  const SimplicialMesh& m = *s.fine_;
  faces->reserve(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& edge = m.edge(e);
    PolytopicFace f;
    f.element = edge.tri;
    f.a = m.vertex(edge.v[0]);
    f.b = m.vertex(edge.v[1]);
    f.normal = m.edge_normal(e, 0);
    f.length = m.edge_length(e);
    f.kind = edge.boundary() ? FaceKind::DomainBoundary : FaceKind::Interior;
    f.fine_edges = {e};
    faces->push_back(std::move(f));
  }
  s.edge_faces_ = std::move(faces);
  return s;
}

const PolytopicMesh& DgSpace::polytopic_mesh() const {
  if (!poly_) throw Error("space is not polytopic");
  return *poly_;
}

void DgSpace::check_element(int element) const {
  if (element < 0 || element >= num_elements_) throw Error("invalid element id " + std::to_string(element));
}

int DgSpace::element_of_triangle(int t) const { return poly_ ? poly_->element_of(t) : t; }

std::vector<int> DgSpace::element_triangles(int element) const {
  check_element(element);
  if (poly_) return poly_->triangles(element);
  return {element};
}

double DgSpace::element_diameter(int element) const {
  check_element(element);
  return poly_ ? poly_->diameter(element) : fine_->diameter(element);
}

const std::vector<PolytopicFace>& DgSpace::faces() const { return poly_ ? poly_->faces() : *edge_faces_; }

void DgSpace::eval(int element, const Point& x, double* values, Point* grads) const {
  check_element(element);
  if (poly_) {
    legendre_box_eval(poly_->bounding_box(element), degree_, kind_, x, values, grads);
  } else {
    const auto& tri = fine_->triangle(element);
    orthonormal_triangle_eval(fine_->vertex(tri[0]), fine_->vertex(tri[1]), fine_->vertex(tri[2]), degree_, x,
                              values, grads);
  }
}

QuadratureRule DgSpace::element_rule(int element) const { return element_rule(element, quad_order_); }

QuadratureRule DgSpace::element_rule(int element, int order) const {
  check_element(element);
  if (!poly_) return triangle_rule(*fine_, element, order);
  if (poly_->triangles(element).size() <= 2) {
    const int basis_degree = kind_ == PolyBasisKind::Tensor ? 2 * degree_ : degree_;
    order = std::max(order, 2 * basis_degree);
  }
  return quadrature_on_element(*poly_, element, order);
}

QuadratureRule DgSpace::face_rule(const PolytopicFace& face) const {
  const int basis_degree = poly_ && kind_ == PolyBasisKind::Tensor ? 2 * degree_ : degree_;
  return face_quadrature(face, std::max(quad_order_, 2 * basis_degree));
}

DgField::DgField(DgSpace s, Vector c) : space(std::move(s)), coeffs(std::move(c)) {
  if (coeffs.size() != space.size()) throw Error("coefficient vector does not match the space dimension");
}

double DgField::eval(int element, const Point& x) const {
  double v[kMaxLocalDim];
  space.eval(element, x, v);
  const int off = space.offset(element);
  double s = 0.0;
  for (int k = 0; k < space.local_dim(); ++k) s += coeffs[off + k] * v[k];
  return s;
}

Point DgField::gradient(int element, const Point& x) const {
  double v[kMaxLocalDim];
  Point g[kMaxLocalDim];
  space.eval(element, x, v, g);
  const int off = space.offset(element);
  Point s = Point::Zero();
  for (int k = 0; k < space.local_dim(); ++k) s += coeffs[off + k] * g[k];
  return s;
}

ScalarJumpAverage jump_average(double plus, double minus, const Point& n_plus) {
  return {0.5 * (plus + minus), (plus - minus) * n_plus};
}

VectorJumpAverage jump_average(const Point& plus, const Point& minus, const Point& n_plus) {
  return {0.5 * (plus + minus), (plus - minus).dot(n_plus)};
}

ScalarJumpAverage jump_average_boundary(double trace, const Point& normal) { return {trace, trace * normal}; }

VectorJumpAverage jump_average_boundary(const Point& trace, const Point& normal) {
  return {trace, trace.dot(normal)};
}

double penalty_sigma(const PolytopicMesh& mesh, const PolytopicFace& face, double c_sigma, int degree) {
  if (c_sigma <= 0) throw Error("penalty constant must be positive");
  double s = 0.0;
  for (int e : face.element) {
    if (e < 0) continue;
    const double h = mesh.diameter(e);
    s = std::max(s, degree * degree * face.length / (h * h));
  }
  return c_sigma * s;
}

double penalty_sigma(const PolytopicMesh& mesh, int face, double c_sigma, int degree) {
  if (face < 0 || face >= mesh.num_faces()) throw Error("invalid face id " + std::to_string(face));
  return penalty_sigma(mesh, mesh.face(face), c_sigma, degree);
}

double penalty_sigma(const SimplicialMesh& mesh, int edge, double c_sigma, int degree) {
  if (c_sigma <= 0) throw Error("penalty constant must be positive");
  const auto& e = mesh.edge(edge);
  double s = 0.0;
  for (int t : e.tri) {
    if (t < 0) continue;
    const double h = mesh.diameter(t);
    s = std::max(s, degree * degree * mesh.edge_length(edge) / (h * h));
  }
  return c_sigma * s;
}

double penalty_sigma(const DgSpace& space, const PolytopicFace& face, double c_sigma, double length) {
  if (c_sigma <= 0) throw Error("penalty constant must be positive");
  const int p = space.degree();
  const double len = length > 0 ? length : face.length;
  double s = 0.0;
  for (int e : face.element) {
    if (e < 0) continue;
    const double h = space.element_diameter(e);
    s = std::max(s, p * p * len / (h * h));
  }
  return c_sigma * s;
}

std::vector<double> interface_lengths(const DgSpace& space) {
  const auto& faces = space.faces();
  std::map<std::array<int, 3>, double> total;
  auto key = [](const PolytopicFace& f) -> std::array<int, 3> {
    if (f.boundary()) return {f.element[0], -1, static_cast<int>(f.kind)};
    return {std::min(f.element[0], f.element[1]), std::max(f.element[0], f.element[1]), -1};
  };
  for (const auto& f : faces) total[key(f)] += f.length;
  std::vector<double> out(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) out[i] = total[key(faces[i])];
  return out;
}

Matrix local_mass(const DgSpace& space, int element) {
  const int n = space.local_dim();
  Matrix m = Matrix::Zero(n, n);
  double v[kMaxLocalDim];
  const QuadratureRule rule = space.element_rule(element);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    space.eval(element, rule.points[q], v);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) += rule.weights[q] * v[i] * v[j];
    }
  }
  return m;
}

DgField l2_project(const std::function<double(const Point&)>& fn, const DgSpace& space, std::span<const char> active) {
  DgField out(space);
  const int n = space.local_dim();
  double v[kMaxLocalDim];
  for (int e = 0; e < space.num_elements(); ++e) {
    if (!active.empty() && !active[e]) continue;
    Matrix m = Matrix::Zero(n, n);
    Vector rhs = Vector::Zero(n);
    const QuadratureRule rule = space.element_rule(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.eval(e, rule.points[q], v);
      const double f = fn(rule.points[q]);
      for (int i = 0; i < n; ++i) {
        rhs[i] += rule.weights[q] * f * v[i];
        for (int j = 0; j < n; ++j) m(i, j) += rule.weights[q] * v[i] * v[j];
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 1e-13 * hi)) throw Error("singular local mass matrix on element " + std::to_string(e));
    out.coeffs.segment(space.offset(e), n) = m.ldlt().solve(rhs);
  }
  return out;
}

}  // namespace polyls
