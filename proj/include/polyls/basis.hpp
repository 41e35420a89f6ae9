#pragma once

#include "polyls/mesh.hpp"

namespace polyls {

/// Upper bound on the number of local basis functions of any supported space.
inline constexpr int kMaxLocalDim = 36;

enum class PolyBasisKind {
  Tensor,       ///< Q_p: products of 1D Legendre polynomials of degree <= p each
  TotalDegree,  ///< P_p: products with combined degree <= p
};

/// 1D Legendre polynomial P_n(s) and its derivative.
void legendre(int n, double s, double& value, double& derivative);

int legendre_box_dim(int p, PolyBasisKind kind);

/// Legendre products on the box, L2-normalized on the box. Modes are ordered by total
/// degree, so the P_p modes form a prefix of the Q_p modes. `grads` may be null.
void legendre_box_eval(const BoundingBox& box, int p, PolyBasisKind kind, const Point& x, double* values,
                       Point* grads);

inline int triangle_dim(int p) { return (p + 1) * (p + 2) / 2; }

/// Orthonormal basis of P_p on the triangle (a, b, c), obtained by Gram-Schmidt on the
/// monomials of the reference triangle; `grads` may be null.
void orthonormal_triangle_eval(const Point& a, const Point& b, const Point& c, int p, const Point& x,
                               double* values, Point* grads);

}  // namespace polyls
