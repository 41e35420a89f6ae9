#include "polyls/elliptic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace polyls {

namespace {

struct Triplets {
  std::vector<Eigen::Triplet<double>> entries;
  void add_block(int row_off, int col_off, const Matrix& block) {
    for (int i = 0; i < block.rows(); ++i) {
      for (int j = 0; j < block.cols(); ++j) {
        if (block(i, j) != 0.0) entries.emplace_back(row_off + i, col_off + j, block(i, j));
      }
    }
  }
};

}  // namespace

IpdgOperator assemble_ipdg(const DgSpace& space, double c_sigma, bool include_mass,
                           std::span<const char> dirichlet_faces, bool guard_coercivity) {
  if (space.degree() < 1) throw Error("interior penalty assembly needs polynomial degree >= 1");
  const auto& faces = space.faces();
  if (!dirichlet_faces.empty() && dirichlet_faces.size() != faces.size()) {
    throw Error("Dirichlet face flags do not match the face count");
  }
  if (!(c_sigma > 0)) throw Error("penalty constant must be positive");
  IpdgOperator op;
  op.space = space;
  op.c_sigma = c_sigma;
  op.include_mass = include_mass;
  op.sigma.assign(faces.size(), 0.0);
  op.dirichlet.assign(faces.size(), 0);
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    op.dirichlet[fi] = faces[fi].boundary() && (dirichlet_faces.empty() || dirichlet_faces[fi] != 0);
  }
  auto penalized = [&](std::size_t fi) { return !faces[fi].boundary() || op.dirichlet[fi]; };

  const int n = space.local_dim();
  Triplets trip;
  double v[kMaxLocalDim];
  Point g[kMaxLocalDim];
  std::vector<Matrix> grad_gram(space.num_elements());

  for (int e = 0; e < space.num_elements(); ++e) {
    Matrix a = Matrix::Zero(n, n);
    Matrix& gg = grad_gram[e];
    gg = Matrix::Zero(n, n);
    const QuadratureRule rule = space.element_rule(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.eval(e, rule.points[q], v, g);
      const double w = rule.weights[q];
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          gg(i, j) += w * g[i].dot(g[j]);
          a(i, j) += w * (g[i].dot(g[j]) + (include_mass ? v[i] * v[j] : 0.0));
        }
      }
    }
    trip.add_block(space.offset(e), space.offset(e), a);
  }

  std::vector<double> floor(faces.size(), 0.0);
  if (guard_coercivity) {
    std::vector<Matrix> trace(space.num_elements(), Matrix::Zero(n, n));
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
      if (!penalized(fi)) continue;
      const PolytopicFace& face = faces[fi];
      const double w2 = face.boundary() ? 1.0 : 0.25;
      const QuadratureRule rule = space.face_rule(face);
      for (int e : face.element) {
        if (e < 0) continue;
        for (std::size_t q = 0; q < rule.size(); ++q) {
          space.eval(e, rule.points[q], v, g);
          for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) trace[e](i, j) += w2 * rule.weights[q] * g[i].dot(face.normal) * g[j].dot(face.normal);
          }
        }
      }
    }
    // Mode 0 is the constant; the gradient Gram matrix is definite on the remaining modes.
    std::vector<double> lambda(space.num_elements(), 0.0);
    for (int e = 0; e < space.num_elements(); ++e) {
      Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(trace[e].bottomRightCorner(n - 1, n - 1),
                                                          grad_gram[e].bottomRightCorner(n - 1, n - 1),
                                                          Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) throw Error("degenerate element " + std::to_string(e) + " in penalty bound");
      lambda[e] = std::max(0.0, es.eigenvalues().maxCoeff());
    }
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
      if (!penalized(fi)) continue;
      double need = 0.0;
      for (int e : faces[fi].element) {
        if (e >= 0) need += lambda[e];
      }
      floor[fi] = 1.05 * need;
    }
  }

  const std::vector<double> interface = interface_lengths(space);
  double v1[kMaxLocalDim];
  Point g1[kMaxLocalDim];
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    if (!penalized(fi)) continue;
    const PolytopicFace& face = faces[fi];
    const bool boundary = face.boundary();
    double sigma = penalty_sigma(space, face, c_sigma, interface[fi]);
    if (floor[fi] > sigma) {
      sigma = floor[fi];
      ++op.guarded_faces;
    }
    op.sigma[fi] = sigma;
    const QuadratureRule rule = space.face_rule(face);
    const Point& nrm = face.normal;
    const int e0 = face.element[0];
    if (boundary) {
      Matrix a = Matrix::Zero(n, n);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        space.eval(e0, rule.points[q], v, g);
        const double w = rule.weights[q];
        for (int i = 0; i < n; ++i) {
          const double dni = g[i].dot(nrm);
          for (int j = 0; j < n; ++j) {
            a(i, j) += w * (sigma * v[i] * v[j] - v[i] * g[j].dot(nrm) - v[j] * dni);
          }
        }
      }
      trip.add_block(space.offset(e0), space.offset(e0), a);
      continue;
    }
    const int e1 = face.element[1];
    // Blocks indexed [test side][trial side]; side 0 has sign +1, side 1 has sign -1.
    Matrix blocks[2][2] = {{Matrix::Zero(n, n), Matrix::Zero(n, n)}, {Matrix::Zero(n, n), Matrix::Zero(n, n)}};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.eval(e0, rule.points[q], v, g);
      space.eval(e1, rule.points[q], v1, g1);
      const double w = rule.weights[q];
      const double* val[2] = {v, v1};
      const Point* grd[2] = {g, g1};
      for (int a = 0; a < 2; ++a) {
        const double sa = a == 0 ? 1.0 : -1.0;
        for (int b = 0; b < 2; ++b) {
          const double sb = b == 0 ? 1.0 : -1.0;
          Matrix& blk = blocks[a][b];
          for (int i = 0; i < n; ++i) {
            const double dni = grd[a][i].dot(nrm);
            for (int j = 0; j < n; ++j) {
              blk(i, j) += w * (sigma * sa * sb * val[a][i] * val[b][j] - 0.5 * sa * val[a][i] * grd[b][j].dot(nrm) -
                                0.5 * sb * val[b][j] * dni);
            }
          }
        }
      }
    }
    const int off[2] = {space.offset(e0), space.offset(e1)};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) trip.add_block(off[a], off[b], blocks[a][b]);
    }
  }

  op.matrix.resize(space.size(), space.size());
  op.matrix.setFromTriplets(trip.entries.begin(), trip.entries.end());
  op.matrix.makeCompressed();
  const double asym = asymmetry(op.matrix);
  if (asym > 1e-12) throw Error("assembled interior penalty matrix is not symmetric (" + std::to_string(asym) + ")");
  return op;
}

Vector assemble_load(const DgSpace& space, const std::function<double(const Point&)>& f) {
  Vector b = Vector::Zero(space.size());
  double v[kMaxLocalDim];
  const int n = space.local_dim();
  for (int e = 0; e < space.num_elements(); ++e) {
    const QuadratureRule rule = space.element_rule(e);
    const int off = space.offset(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.eval(e, rule.points[q], v);
      const double fw = rule.weights[q] * f(rule.points[q]);
      for (int i = 0; i < n; ++i) b[off + i] += fw * v[i];
    }
  }
  return b;
}

std::array<DgField, 2> solve_shape_gradient(const IpdgOperator& op, const Matrix& rhs, double rel_tol) {
  if (rhs.rows() != op.space.size() || rhs.cols() != 2) throw Error("shape gradient rhs must be (space size) x 2");
  PcgOptions opts;
  opts.rel_tol = rel_tol;
  opts.block_size = op.space.local_dim();
  const Matrix x = solve_spd({op.matrix, rhs}, opts);
  return {DgField(op.space, x.col(0)), DgField(op.space, x.col(1))};
}

double energy_norm_sq(const IpdgOperator& op, const DgField& g) { return g.coeffs.dot(op.matrix * g.coeffs); }

Vector assemble_dirichlet_rhs(const IpdgOperator& op, const DirichletData& data) {
  const DgSpace& space = op.space;
  const auto& faces = space.faces();
  Vector b = Vector::Zero(space.size());
  double v[kMaxLocalDim];
  Point g[kMaxLocalDim];
  const int n = space.local_dim();
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    if (!op.dirichlet[fi]) continue;
    const PolytopicFace& face = faces[fi];
    const int e0 = face.element[0];
    const int off = space.offset(e0);
    const QuadratureRule rule = space.face_rule(face);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.eval(e0, rule.points[q], v, g);
      const double gd = data(rule.points[q], face.kind);
      const double w = rule.weights[q];
      for (int i = 0; i < n; ++i) b[off + i] += w * gd * (op.sigma[fi] * v[i] - g[i].dot(face.normal));
    }
  }
  return b;
}

DgField solve_state_laplace(const DgSpace& space, const DirichletData& data, double c_sigma, double rel_tol) {
  if (space.num_elements() == 0) throw Error("state equation on an empty mesh");
  const IpdgOperator op = assemble_ipdg(space, c_sigma, false);
  SparseSpdSystem sys{op.matrix, assemble_dirichlet_rhs(op, data)};
  PcgOptions opts;
  opts.rel_tol = rel_tol;
  opts.block_size = space.local_dim();
  return DgField(space, solve_spd(sys, opts).col(0));
}

DgField solve_state_laplace(const DgSpace& space, double fixed_value, double free_value, double c_sigma,
                            double rel_tol) {
  return solve_state_laplace(
      space, [=](const Point&, FaceKind kind) { return kind == FaceKind::FreeBoundary ? free_value : fixed_value; },
      c_sigma, rel_tol);
}

}  // namespace polyls
