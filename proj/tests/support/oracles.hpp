#pragma once

#include "helpers.hpp"
#include "polyls/shape_calc.hpp"
#include "polyls/transport.hpp"

#include <Eigen/Dense>

#include <array>
#include <random>
#include <vector>

// Oracles shared by the unit tests and the acceptance checks.
namespace testing_helpers {

using VectorFn = std::function<Point(const Point&)>;

/// Smooth random field times a cutoff that vanishes on the hold-all boundary.
inline VectorFn random_direction(std::mt19937_64& rng, bool disc) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::array<double, 12> a;
  for (double& c : a) c = nd(rng);
  const double pi = std::numbers::pi;
  return [a, disc, pi](const Point& x) -> Point {
    const double cut = disc ? 1.0 - x.squaredNorm() : (1.0 - x.x() * x.x()) * (1.0 - x.y() * x.y());
    const double m[6] = {1.0, x.x(), x.y(), std::sin(pi * x.x()), std::cos(pi * x.y()), x.x() * x.y()};
    Point v = Point::Zero();
    for (int k = 0; k < 6; ++k) {
      v.x() += a[k] * m[k];
      v.y() += a[6 + k] * m[k];
    }
    return cut * v;
  };
}

/// dJ(V) from assembled right-hand sides and the element-wise projection of V.
inline double apply_rhs(const DgSpace& space, const Matrix& rhs, const VectorFn& v) {
  const DgField vx = l2_project([&](const Point& x) { return v(x).x(); }, space);
  const DgField vy = l2_project([&](const Point& x) { return v(x).y(); }, space);
  return rhs.col(0).dot(vx.coeffs) + rhs.col(1).dot(vy.coeffs);
}

struct Agglomerated {
  FittedMesh fit;
  PolytopicMeshPtr mesh;
};

inline Agglomerated agglomerated(const MeshPtr& base, const std::function<double(const Point&)>& phi, int total,
                          std::uint64_t seed = 1) {
  Agglomerated out;
  out.fit = refine_to_fit(ContinuousField::interpolate(base, 2, phi));
  const auto [kp, km] = split_element_budget(total, out.fit.count(1), out.fit.count(-1));
  out.mesh = std::make_shared<const PolytopicMesh>(agglomerate(out.fit, kp, km, seed));
  return out;
}

/// Explicit lifting: R(w) in [S^p restricted to Omega]^2 with
///   int_Omega R(w) . q = int_{faces touching Omega} [w] . {q}   (q extended by zero).
/// Returns, for every global basis function w, the two values int_Omega pi_f R_i(w).
inline Matrix lifted_skeleton_terms(const DgSpace& space, const DgField& pi_f) {
  const auto& sign = space.polytopic_mesh().element_sign();
  const int n = space.local_dim();
  const int ne = space.num_elements();
  std::vector<int> omega_index(ne, -1);
  int count = 0;
  for (int e = 0; e < ne; ++e) {
    if (sign[e] < 0) omega_index[e] = count++;
  }
  // Local masses on Omega (block diagonal).
  std::vector<Eigen::LDLT<Matrix>> mass(ne);
  for (int e = 0; e < ne; ++e) {
    if (omega_index[e] >= 0) mass[e].compute(local_mass(space, e));
  }
  // B(k, (e, j)) = int [w_k] . {q_j e_i} for each component i; stored per component.
  std::array<Matrix, 2> b = {Matrix::Zero(space.size(), count * n), Matrix::Zero(space.size(), count * n)};
  double v0[kMaxLocalDim], v1[kMaxLocalDim];
  for (const PolytopicFace& face : space.faces()) {
    const int e0 = face.element[0], e1 = face.element[1];
    const bool in0 = omega_index[e0] >= 0;
    const bool in1 = e1 >= 0 && omega_index[e1] >= 0;
    if (!in0 && !in1) continue;
    const QuadratureRule rule = face_quadrature(face, 8);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      space.eval(e0, x, v0);
      if (e1 >= 0) space.eval(e1, x, v1);
      for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < n; ++k) {
          for (int j = 0; j < n; ++j) {
            // w = basis k on side s, q = basis j on side r (zero outside Omega).
            for (int s = 0; s < (e1 >= 0 ? 2 : 1); ++s) {
              const double ws = s == 0 ? v0[k] : v1[k];
              const Point wtrace_plus = s == 0 ? Point(ws * face.normal) : Point::Zero();
              const Point wtrace_minus = s == 1 ? Point(ws * face.normal) : Point::Zero();
              for (int r = 0; r < (e1 >= 0 ? 2 : 1); ++r) {
                const int er = r == 0 ? e0 : e1;
                if (omega_index[er] < 0) continue;
                const double qv = r == 0 ? v0[j] : v1[j];
                Point qp = Point::Zero(), qm = Point::Zero();
                (r == 0 ? qp : qm)[i] = qv;
                double value;
                if (e1 < 0) {
                  const ScalarJumpAverage wj = jump_average_boundary(ws, face.normal);
                  const VectorJumpAverage qa = jump_average_boundary(qp, face.normal);
                  value = wj.jump.dot(qa.average);
                } else {
                  const ScalarJumpAverage wj =
                      jump_average(wtrace_plus.dot(face.normal), wtrace_minus.dot(face.normal), face.normal);
                  const VectorJumpAverage qa = jump_average(qp, qm, face.normal);
                  value = wj.jump.dot(qa.average);
                }
                const int es = s == 0 ? e0 : e1;
                b[i](space.offset(es) + k, omega_index[er] * n + j) += rule.weights[q] * value;
              }
            }
          }
        }
      }
    }
  }
  // R_i(w_k) = M^{-1} b_i(w_k, .), then int pi_f R_i(w_k) = pi_f^T M R_i.
  Matrix out = Matrix::Zero(space.size(), 2);
  for (int e = 0; e < ne; ++e) {
    if (omega_index[e] < 0) continue;
    const Matrix m = local_mass(space, e);
    const Vector pf = pi_f.block(e);
    for (int i = 0; i < 2; ++i) {
      for (int k = 0; k < space.size(); ++k) {
        const Vector rhs = b[i].row(k).segment(omega_index[e] * n, n).transpose();
        if (rhs.squaredNorm() == 0.0) continue;
        const Vector r = mass[e].solve(rhs);
        out(k, i) += pf.dot(m * r);
      }
    }
  }
  return out;
}

/// 1 for r <= r0, quintic step down to 0 at r = 1.
inline double cutoff(const Point& x, double r0 = 0.5) {
  const double r = x.norm();
  if (r <= r0) return 1.0;
  if (r >= 1.0) return 0.0;
  const double s = (r - r0) / (1.0 - r0);
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

inline ContinuousVectorField vector_field(const MeshPtr& mesh, const std::function<Point(const Point&)>& v) {
  ContinuousVectorField out{ContinuousField::interpolate(mesh, 2, [&](const Point& x) { return v(x).x(); }),
                            ContinuousField::interpolate(mesh, 2, [&](const Point& x) { return v(x).y(); })};
  for (int j = 0; j < out.x.num_nodes(); ++j) {
    if (out.x.is_boundary_node(j)) out.x.values()[j] = out.y.values()[j] = 0.0;
  }
  return out;
}

inline Point swirl(const Point& x) { return cutoff(x) * Point(-x.y(), x.x()); }

inline DgField random_field(const DgSpace& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DgField f(space);
  for (int i = 0; i < space.size(); ++i) f.coeffs[i] = u(rng);
  return f;
}

/// Per-triangle L2 projection of a continuous field into a simplicial dG space.
inline DgField to_dg(const ContinuousField& c, const DgSpace& space) {
  DgField out(space);
  double v[kMaxLocalDim];
  for (int t = 0; t < space.num_elements(); ++t) {
    const QuadratureRule rule = space.element_rule(t, 2 * space.degree());
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.eval(t, rule.points[q], v);
      const double w = rule.weights[q] * c.eval(t, rule.points[q]);
      for (int i = 0; i < space.local_dim(); ++i) out.coeffs[space.offset(t) + i] += w * v[i];
    }
  }
  return out;
}

inline double max_edge_jump(const ContinuousField& c) {
  const SimplicialMesh& m = c.mesh();
  double worst = 0.0;
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ed = m.edge(e);
    if (ed.boundary()) continue;
    for (double s : {0.0, 0.21, 0.5, 0.77, 1.0}) {
      const Point x = (1 - s) * m.vertex(ed.v[0]) + s * m.vertex(ed.v[1]);
      worst = std::max(worst, std::abs(c.eval(ed.tri[0], x) - c.eval(ed.tri[1], x)));
    }
  }
  return worst;
}

}  // namespace testing_helpers
