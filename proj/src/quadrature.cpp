#include "polyls/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace polyls {

double QuadratureRule::measure() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void QuadratureRule::append(const QuadratureRule& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

namespace {

QuadratureRule symmetric_rule(int order) {
  QuadratureRule r;
  auto add3 = [&r](double a, double b, double w) {
    // Orbit of barycentric (a, b, b); weights given relative to area 1, scaled by 1/2.
    const Eigen::Vector3d l[3] = {{a, b, b}, {b, a, b}, {b, b, a}};
    for (const auto& bc : l) {
      r.points.emplace_back(bc[1], bc[2]);
      r.weights.push_back(0.5 * w);
    }
  };
  if (order <= 1) {
    r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    r.weights.push_back(0.5);
  } else if (order == 2) {
    add3(2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0);
  } else {
    // Six-point degree-4 rule with positive weights.
    add3(0.108103018168070227360, 0.445948490915964886320, 0.223381589678011465944);
    add3(0.816847572980458513080, 0.091576213509770743460, 0.109951743655321867389);
  }
  return r;
}

QuadratureRule collapsed_rule(int order) {
  const int n = (order + 3) / 2;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadratureRule r;
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (x[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (x[j] + 1.0);
      r.points.emplace_back(u, v * (1.0 - u));
      r.weights.push_back(0.25 * w[i] * w[j] * (1.0 - u));
    }
  }
  return r;
}

}  // namespace

const QuadratureRule& reference_triangle_rule(int order) {
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) {
    it = cache.emplace(order, order <= 4 ? symmetric_rule(order) : collapsed_rule(order)).first;
  }
  return it->second;
}

QuadratureRule triangle_rule(const Point& a, const Point& b, const Point& c, int order) {
  const QuadratureRule& ref = reference_triangle_rule(order);
  const double jac = 2.0 * std::abs(signed_area(a, b, c));
  QuadratureRule r;
  r.points.reserve(ref.size());
  r.weights.reserve(ref.size());
  for (std::size_t q = 0; q < ref.size(); ++q) {
    const Point& p = ref.points[q];
    r.points.push_back(a + p.x() * (b - a) + p.y() * (c - a));
    r.weights.push_back(ref.weights[q] * jac);
  }
  return r;
}

QuadratureRule triangle_rule(const SimplicialMesh& mesh, int t, int order) {
  const auto& tri = mesh.triangle(t);
  return triangle_rule(mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2]), order);
}

QuadratureRule quadrature_on_element(const PolytopicMesh& mesh, int element, int order) {
  QuadratureRule r;
  for (int t : mesh.triangles(element)) r.append(triangle_rule(mesh.fine(), t, order));
  return r;
}

QuadratureRule face_quadrature(const Point& a, const Point& b, int order) {
  const int n = std::max(1, (order + 2) / 2);
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const double len = (b - a).norm();
  QuadratureRule r;
  for (int i = 0; i < n; ++i) {
    r.points.push_back(a + 0.5 * (x[i] + 1.0) * (b - a));
    r.weights.push_back(0.5 * w[i] * len);
  }
  return r;
}

QuadratureRule face_quadrature(const PolytopicFace& face, int order) { return face_quadrature(face.a, face.b, order); }

}  // namespace polyls
