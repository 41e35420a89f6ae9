#include "polyls/basis.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace polyls {

void legendre(int n, double s, double& value, double& derivative) {
  double p0 = 1.0, p1 = s;
  double d0 = 0.0, d1 = 1.0;
  if (n == 0) {
    value = 1.0;
    derivative = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2 * k - 1) * s * p1 - (k - 1) * p0) / k;
    const double dk = d0 + (2 * k - 1) * p1;
    p0 = p1;
    p1 = pk;
    d0 = d1;
    d1 = dk;
  }
  value = p1;
  derivative = d1;
}

namespace {

const std::vector<std::array<int, 2>>& box_modes(int p, PolyBasisKind kind) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::vector<std::array<int, 2>>> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(p, static_cast<int>(kind));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::array<int, 2>> modes;
  const int top = kind == PolyBasisKind::Tensor ? 2 * p : p;
  for (int d = 0; d <= top; ++d) {
    for (int i = std::max(0, d - p); i <= std::min(d, p); ++i) modes.push_back({i, d - i});
  }
  return cache.emplace(key, std::move(modes)).first->second;
}

/// Monomial exponents ordered by total degree, then by decreasing power of x.
std::vector<std::array<int, 2>> monomials(int p) {
  std::vector<std::array<int, 2>> out;
  for (int d = 0; d <= p; ++d) {
    for (int i = d; i >= 0; --i) out.push_back({i, d - i});
  }
  return out;
}

long double factorial(int n) {
  long double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

struct OrthonormalTable {
  std::vector<std::array<int, 2>> exps;
  Matrix coeffs;  // row k: coefficients of basis function k over the monomials
};

const OrthonormalTable& orthonormal_table(int p) {
  static std::mutex mutex;
  static std::map<int, OrthonormalTable> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;
  OrthonormalTable table;
  table.exps = monomials(p);
  const int n = static_cast<int>(table.exps.size());
  // Gram matrix of monomials on the reference triangle: int x^a y^b = a! b! / (a+b+2)!.
  // Factorized in extended precision; the monomial Gram matrix is ill-conditioned.
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  LMatrix gram(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      const int a = table.exps[k][0] + table.exps[l][0];
      const int b = table.exps[k][1] + table.exps[l][1];
      gram(k, l) = factorial(a) * factorial(b) / factorial(a + b + 2);
    }
  }
  Eigen::LLT<LMatrix> llt(gram);
  if (llt.info() != Eigen::Success) throw Error("monomial Gram matrix is not positive definite");
  const LMatrix lower = llt.matrixL();
  table.coeffs = lower.triangularView<Eigen::Lower>().solve(LMatrix::Identity(n, n)).cast<double>();
  return cache.emplace(p, std::move(table)).first->second;
}

}  // namespace

int legendre_box_dim(int p, PolyBasisKind kind) {
  return kind == PolyBasisKind::Tensor ? (p + 1) * (p + 1) : (p + 1) * (p + 2) / 2;
}

void legendre_box_eval(const BoundingBox& box, int p, PolyBasisKind kind, const Point& x, double* values,
                       Point* grads) {
  const Point c = box.center();
  const Point h = 0.5 * box.extent();
  const double s = (x.x() - c.x()) / h.x();
  const double t = (x.y() - c.y()) / h.y();
  double ls[kMaxLocalDim], ds[kMaxLocalDim], lt[kMaxLocalDim], dt[kMaxLocalDim];
  for (int n = 0; n <= p; ++n) {
    const double scale = std::sqrt(0.5 * (2 * n + 1));
    legendre(n, s, ls[n], ds[n]);
    legendre(n, t, lt[n], dt[n]);
    ls[n] *= scale;
    ds[n] *= scale / h.x();
    lt[n] *= scale;
    dt[n] *= scale / h.y();
  }
  const double norm = 1.0 / std::sqrt(h.x() * h.y());
  const auto& modes = box_modes(p, kind);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const int i = modes[k][0], j = modes[k][1];
    values[k] = norm * ls[i] * lt[j];
    if (grads) grads[k] = Point(norm * ds[i] * lt[j], norm * ls[i] * dt[j]);
  }
}

void orthonormal_triangle_eval(const Point& a, const Point& b, const Point& c, int p, const Point& x,
                               double* values, Point* grads) {
  const OrthonormalTable& table = orthonormal_table(p);
  Eigen::Matrix2d jac;
  jac.col(0) = b - a;
  jac.col(1) = c - a;
  const double det = jac.determinant();
  const Eigen::Matrix2d inv = jac.inverse();
  const Point xi = inv * (x - a);
  const double scale = 1.0 / std::sqrt(std::abs(det));

  double px[kMaxLocalDim], py[kMaxLocalDim];
  px[0] = py[0] = 1.0;
  for (int k = 1; k <= p; ++k) {
    px[k] = px[k - 1] * xi.x();
    py[k] = py[k - 1] * xi.y();
  }
  const int n = static_cast<int>(table.exps.size());
  double mono[kMaxLocalDim], mx[kMaxLocalDim], my[kMaxLocalDim];
  for (int m = 0; m < n; ++m) {
    const int i = table.exps[m][0], j = table.exps[m][1];
    mono[m] = px[i] * py[j];
    mx[m] = i > 0 ? i * px[i - 1] * py[j] : 0.0;
    my[m] = j > 0 ? j * px[i] * py[j - 1] : 0.0;
  }
  for (int k = 0; k < n; ++k) {
    double v = 0.0, gx = 0.0, gy = 0.0;
    for (int m = 0; m <= k; ++m) {
      const double w = table.coeffs(k, m);
      v += w * mono[m];
      gx += w * mx[m];
      gy += w * my[m];
    }
    values[k] = scale * v;
    if (grads) grads[k] = scale * (inv.transpose() * Point(gx, gy));
  }
}

}  // namespace polyls
