#include "polyls/linear_solver.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

namespace polyls {

namespace {

class Preconditioner {
public:
  Preconditioner(const SparseMatrix& a, int block_size) : block_(std::max(1, block_size)) {
    const int n = static_cast<int>(a.rows());
    if (n % block_ != 0) throw Error("matrix size is not a multiple of the preconditioner block size");
    const int nb = n / block_;
    inverses_.resize(nb);
    for (int b = 0; b < nb; ++b) {
      Matrix blk = Matrix::Zero(block_, block_);
      for (int r = 0; r < block_; ++r) {
        const int row = b * block_ + r;
        for (SparseMatrix::InnerIterator it(a, row); it; ++it) {
          const int c = static_cast<int>(it.col()) - b * block_;
          if (c >= 0 && c < block_) blk(r, c) = it.value();
        }
      }
      Eigen::LLT<Matrix> llt(blk);
      if (llt.info() != Eigen::Success) throw Error("matrix is not positive definite (diagonal block " + std::to_string(b) + ")");
      inverses_[b] = llt.solve(Matrix::Identity(block_, block_));
    }
  }

  void apply(const Vector& r, Vector& z) const {
    for (std::size_t b = 0; b < inverses_.size(); ++b) {
      const int off = static_cast<int>(b) * block_;
      z.segment(off, block_).noalias() = inverses_[b] * r.segment(off, block_);
    }
  }

private:
  int block_;
  std::vector<Matrix> inverses_;
};

}  // namespace

double asymmetry(const SparseMatrix& matrix) {
  const SparseMatrix t = matrix.transpose();
  const double diff = SparseMatrix(matrix - t).coeffs().cwiseAbs().maxCoeff();
  const double scale = matrix.coeffs().cwiseAbs().maxCoeff();
  return scale > 0 ? diff / scale : 0.0;
}

Matrix solve_spd(const SparseSpdSystem& system, const PcgOptions& options, PcgReport* report) {
  const SparseMatrix& a = system.matrix;
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw Error("matrix is not square");
  if (system.rhs.rows() != n) throw Error("right-hand side length does not match the matrix");
  Matrix x = Matrix::Zero(n, system.rhs.cols());
  if (n == 0) return x;
  const Preconditioner prec(a, options.block_size);
  PcgReport total;
  std::optional<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt;
  for (int col = 0; col < system.rhs.cols(); ++col) {
    const Vector b = system.rhs.col(col);
    const double bnorm = b.norm();
    if (bnorm == 0.0) continue;
    Vector xc = Vector::Zero(n);
    Vector r = b;
    Vector z(n), p(n), ap(n);
    prec.apply(r, z);
    p = z;
    double rz = r.dot(z);
    double rel = 1.0;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
      rel = r.norm() / bnorm;
      if (rel <= options.rel_tol) {
        // Confirm with the true residual; restart from it if the recursion drifted.
        r = b - a * xc;
        rel = r.norm() / bnorm;
        if (rel <= options.rel_tol) break;
        prec.apply(r, z);
        p = z;
        rz = r.dot(z);
      }
      ap.noalias() = a * p;
      const double pap = p.dot(ap);
      if (!(pap > 0)) throw Error("matrix is not positive definite (p^T A p = " + std::to_string(pap) + ")");
      const double alpha = rz / pap;
      xc += alpha * p;
      r -= alpha * ap;
      prec.apply(r, z);
      const double rz_new = r.dot(z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
    rel = (b - a * xc).norm() / bnorm;
    bool direct = false;
    if (!(rel <= options.rel_tol) && options.direct_fallback) {
      if (!ldlt) ldlt.emplace(Eigen::SparseMatrix<double>(a));
      if (ldlt->info() == Eigen::Success) {
        const Vector xd = ldlt->solve(b);
        const double rel_d = (b - a * xd).norm() / bnorm;
        // Round-off in the factorization can sit above a very tight tolerance.
        if (xd.allFinite() && rel_d <= std::max(options.rel_tol, 1e-8)) {
          xc = xd;
          rel = rel_d;
          direct = true;
          ++total.direct_solves;
        }
      }
    }
    if (!direct && !(rel <= options.rel_tol)) {
      std::ostringstream msg;
      msg << "conjugate gradients did not converge after " << it << " iterations; achieved relative residual "
          << rel;
      throw Error(msg.str());
    }
    x.col(col) = xc;
    total.iterations = std::max(total.iterations, it);
    total.relative_residual = std::max(total.relative_residual, rel);
  }
  if (report) *report = total;
  return x;
}

Matrix solve_spd(const SparseSpdSystem& system, double rel_tol, int max_iterations) {
  PcgOptions opts;
  opts.rel_tol = rel_tol;
  opts.max_iterations = max_iterations;
  return solve_spd(system, opts);
}

}  // namespace polyls
