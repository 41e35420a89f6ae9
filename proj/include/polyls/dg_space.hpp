#pragma once

#include "polyls/basis.hpp"
#include "polyls/polytopic_mesh.hpp"
#include "polyls/quadrature.hpp"

#include <functional>
#include <memory>
#include <span>

namespace polyls {

using PolytopicMeshPtr = std::shared_ptr<const PolytopicMesh>;

/// Discontinuous piecewise polynomials on a polytopic or a simplicial mesh.
///
/// Polytopic elements use Legendre products on the element bounding box; triangles use
/// an orthonormal basis of P_p. Degrees of freedom are stored element by element.
class DgSpace {
public:
  static DgSpace polytopic(PolytopicMeshPtr mesh, int degree, PolyBasisKind kind = PolyBasisKind::Tensor,
                           int quadrature_order = 4);
  static DgSpace simplicial(MeshPtr mesh, int degree, int quadrature_order = 4);

  bool is_polytopic() const { return static_cast<bool>(poly_); }
  const PolytopicMesh& polytopic_mesh() const;
  const PolytopicMeshPtr& polytopic_mesh_ptr() const { return poly_; }
  /// The triangulation the space lives on (the fine mesh for polytopic spaces).
  const SimplicialMesh& fine() const { return *fine_; }
  const MeshPtr& fine_ptr() const { return fine_; }

  int degree() const { return degree_; }
  PolyBasisKind basis_kind() const { return kind_; }
  int quadrature_order() const { return quad_order_; }
  int num_elements() const { return num_elements_; }
  int local_dim() const { return local_dim_; }
  int offset(int element) const { return element * local_dim_; }
  int size() const { return num_elements_ * local_dim_; }
  int element_of_triangle(int t) const;
  std::vector<int> element_triangles(int element) const;
  double element_diameter(int element) const;
  /// Element faces: the polytopic faces, or one face per edge of a simplicial mesh.
  const std::vector<PolytopicFace>& faces() const;

  /// Values (and optionally gradients) of all local basis functions at x.
  void eval(int element, const Point& x, double* values, Point* grads = nullptr) const;

  /// Quadrature over the element. Elements made of one or two triangles use a rule
  /// exact for products of two basis functions, so their mass matrix stays regular.
  QuadratureRule element_rule(int element) const;
  QuadratureRule element_rule(int element, int order) const;
  /// Gauss rule on a face, exact for products of two basis functions (a Q_p function
  /// restricted to a slanted segment has degree 2p).
  QuadratureRule face_rule(const PolytopicFace& face) const;

private:
  void check_element(int element) const;

  PolytopicMeshPtr poly_;
  MeshPtr fine_;
  std::shared_ptr<const std::vector<PolytopicFace>> edge_faces_;
  int degree_{0};
  PolyBasisKind kind_{PolyBasisKind::Tensor};
  int quad_order_{4};
  int num_elements_{0};
  int local_dim_{1};
};

/// Element-wise polynomial field; coefficients stored block by block.
struct DgField {
  DgSpace space;
  Vector coeffs;

  DgField() = default;
  explicit DgField(DgSpace s) : space(std::move(s)), coeffs(Vector::Zero(space.size())) {}
  DgField(DgSpace s, Vector c);

  double eval(int element, const Point& x) const;
  Point gradient(int element, const Point& x) const;
  Eigen::Ref<const Vector> block(int element) const { return coeffs.segment(space.offset(element), space.local_dim()); }
};

struct ScalarJumpAverage {
  double average{0.0};
  Point jump{Point::Zero()};
};

struct VectorJumpAverage {
  Point average{Point::Zero()};
  double jump{0.0};
};

/// Interior face: traces from element[0] (plus side, normal n_plus) and element[1].
ScalarJumpAverage jump_average(double plus, double minus, const Point& n_plus);
VectorJumpAverage jump_average(const Point& plus, const Point& minus, const Point& n_plus);
/// Boundary face: average is the trace, jump is the trace times the outward normal.
ScalarJumpAverage jump_average_boundary(double trace, const Point& normal);
VectorJumpAverage jump_average_boundary(const Point& trace, const Point& normal);

/// C_sigma * max over incident elements of p^2 |e| / h_T^2.
double penalty_sigma(const PolytopicMesh& mesh, const PolytopicFace& face, double c_sigma, int degree);
double penalty_sigma(const PolytopicMesh& mesh, int face, double c_sigma, int degree);
/// Same formula for a face of a simplicial mesh, from the incident triangle diameters.
double penalty_sigma(const SimplicialMesh& mesh, int edge, double c_sigma, int degree);
/// Same formula for any face of the space, with the space degree. A positive `length`
/// replaces |e|.
double penalty_sigma(const DgSpace& space, const PolytopicFace& face, double c_sigma, double length = -1.0);

/// Per face: total length of all faces shared by the same two elements (for boundary
/// faces: by the same element and face kind). Unlike single face lengths this does not
/// change when a straight run of fine edges splits into several faces.
std::vector<double> interface_lengths(const DgSpace& space);

/// Element-wise L2 projection. Elements with `active[e] == 0` get zero coefficients.
DgField l2_project(const std::function<double(const Point&)>& fn, const DgSpace& space,
                   std::span<const char> active = {});

/// Local mass matrix of an element.
Matrix local_mass(const DgSpace& space, int element);

}  // namespace polyls
