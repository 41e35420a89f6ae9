#pragma once

#include "polyls/common.hpp"

#include <Eigen/Sparse>

namespace polyls {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SparseSpdSystem {
  SparseMatrix matrix;
  /// One right-hand side per column.
  Matrix rhs;
};

struct PcgOptions {
  double rel_tol{1e-10};
  int max_iterations{20000};
  /// 0 or 1: diagonal (Jacobi) preconditioner; n > 1: inverse of the n x n diagonal blocks.
  int block_size{1};
  /// Retry with a sparse LDL^T factorization when the iteration does not converge.
  bool direct_fallback{true};
};

struct PcgReport {
  int iterations{0};
  double relative_residual{0.0};
  /// Number of columns that were solved by the direct fallback.
  int direct_solves{0};
};

/// Preconditioned conjugate gradients, one solve per rhs column. Stops when
/// ||b - A x|| <= rel_tol ||b||. A column that does not converge is re-solved by
/// sparse LDL^T when `direct_fallback` is set; throws with the achieved residual
/// when that fails too.
Matrix solve_spd(const SparseSpdSystem& system, const PcgOptions& options = {}, PcgReport* report = nullptr);
Matrix solve_spd(const SparseSpdSystem& system, double rel_tol, int max_iterations);

/// Largest |A - A^T| entry relative to the largest |A| entry.
double asymmetry(const SparseMatrix& matrix);

}  // namespace polyls
