#include "polyls/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace polyls {

bool BoundingBox::contains(const Point& p, double tol) const {
  const double sx = tol * std::max(1.0, extent().x());
  const double sy = tol * std::max(1.0, extent().y());
  return p.x() >= min.x() - sx && p.x() <= max.x() + sx && p.y() >= min.y() - sy && p.y() <= max.y() + sy;
}

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

SimplicialMesh::SimplicialMesh(std::vector<Point> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const int nv = num_vertices();
  areas_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= nv) throw Error("triangle " + std::to_string(t) + " references vertex out of range");
    }
    const Point& a = vertices_[tri[0]];
    const Point& b = vertices_[tri[1]];
    const Point& c = vertices_[tri[2]];
    double area = signed_area(a, b, c);
    const double scale = std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
    if (std::abs(area) <= 1e-14 * scale || scale == 0.0) {
      throw Error("triangle " + std::to_string(t) + " has zero area");
    }
    if (area < 0) {
      std::swap(tri[1], tri[2]);
      area = -area;
    }
    areas_[t] = area;
  }

  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(triangles_.size() * 2);
  tri_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[(i + 1) % 3];
      const int b = tri[(i + 2) % 3];
      const auto key = edge_key(a, b);
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        MeshEdge e;
        e.v = {a, b};
        e.tri = {static_cast<int>(t), -1};
        lookup.emplace(key, num_edges());
        tri_edges_[t][i] = num_edges();
        edges_.push_back(e);
      } else {
        MeshEdge& e = edges_[it->second];
        if (e.tri[1] >= 0) throw Error("edge shared by more than two triangles");
        e.tri[1] = static_cast<int>(t);
        tri_edges_[t][i] = it->second;
      }
    }
  }

  boundary_vertex_.assign(vertices_.size(), 0);
  for (const auto& e : edges_) {
    if (e.boundary()) {
      boundary_vertex_[e.v[0]] = 1;
      boundary_vertex_[e.v[1]] = 1;
    }
  }
}

double SimplicialMesh::total_area() const {
  double sum = 0.0;
  for (double a : areas_) sum += a;
  return sum;
}

Point SimplicialMesh::barycenter(int t) const {
  const auto& tri = triangles_[t];
  return (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) / 3.0;
}

double SimplicialMesh::diameter(int t) const {
  const auto& tri = triangles_[t];
  const Point& a = vertices_[tri[0]];
  const Point& b = vertices_[tri[1]];
  const Point& c = vertices_[tri[2]];
  return std::sqrt(std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()}));
}

Point SimplicialMesh::edge_normal(int e, int side) const {
  const MeshEdge& edge = edges_[e];
  const Point d = vertices_[edge.v[1]] - vertices_[edge.v[0]];
  Point n(d.y(), -d.x());
  n.normalize();
  // Orient away from the requested triangle.
  const int t = edge.tri[side];
  const Point mid = 0.5 * (vertices_[edge.v[0]] + vertices_[edge.v[1]]);
  if (n.dot(mid - barycenter(t)) < 0) n = -n;
  return n;
}

int SimplicialMesh::neighbor(int t, int i) const {
  const MeshEdge& e = edges_[tri_edges_[t][i]];
  return e.tri[0] == t ? e.tri[1] : e.tri[0];
}

BoundingBox SimplicialMesh::bounding_box() const {
  BoundingBox box;
  if (vertices_.empty()) return box;
  box.min = box.max = vertices_.front();
  for (const auto& v : vertices_) {
    box.min = box.min.cwiseMin(v);
    box.max = box.max.cwiseMax(v);
  }
  return box;
}

std::vector<std::vector<int>> SimplicialMesh::vertex_triangles() const {
  std::vector<std::vector<int>> out(vertices_.size());
  for (int t = 0; t < num_triangles(); ++t) {
    for (int v : triangles_[t]) out[v].push_back(t);
  }
  return out;
}

SimplicialMesh square_mesh(int n, double half_width) {
  if (n < 1) throw Error("square_mesh needs n >= 1");
  std::vector<Point> vertices;
  vertices.reserve((n + 1) * (n + 1));
  const double h = 2.0 * half_width / n;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) vertices.emplace_back(-half_width + i * h, -half_width + j * h);
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<Triangle> triangles;
  triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double cx = -half_width + (i + 0.5) * h;
      const double cy = -half_width + (j + 0.5) * h;
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      if (cx * cy > 0) {
        triangles.push_back({v00, v10, v11});
        triangles.push_back({v00, v11, v01});
      } else {
        triangles.push_back({v00, v10, v01});
        triangles.push_back({v10, v11, v01});
      }
    }
  }
  return {std::move(vertices), std::move(triangles)};
}

SimplicialMesh disc_mesh(int rings, double radius) {
  if (rings < 1) throw Error("disc_mesh needs at least one ring");
  std::vector<Point> vertices{Point::Zero()};
  std::vector<int> ring_start{0};
  for (int k = 1; k <= rings; ++k) {
    ring_start.push_back(static_cast<int>(vertices.size()));
    const int count = 6 * k;
    const double r = radius * k / rings;
    for (int j = 0; j < count; ++j) {
      const double a = 2.0 * std::numbers::pi * j / count;
      vertices.emplace_back(r * std::cos(a), r * std::sin(a));
    }
  }
  std::vector<Triangle> triangles;
  for (int j = 0; j < 6; ++j) triangles.push_back({0, ring_start[1] + j, ring_start[1] + (j + 1) % 6});
  for (int k = 2; k <= rings; ++k) {
    const int m = 6 * (k - 1);
    const int n = 6 * k;
    const int in0 = ring_start[k - 1];
    const int out0 = ring_start[k];
    int i = 0;
    int j = 0;
    while (i < m || j < n) {
      const double next_in = 2.0 * std::numbers::pi * (i + 1) / m;
      const double next_out = 2.0 * std::numbers::pi * (j + 1) / n;
      const int a = in0 + i % m;
      const int b = out0 + j % n;
      if (j < n && (i >= m || next_out <= next_in)) {
        triangles.push_back({a, b, out0 + (j + 1) % n});
        ++j;
      } else {
        triangles.push_back({a, b, in0 + (i + 1) % m});
        ++i;
      }
    }
  }
  return {std::move(vertices), std::move(triangles)};
}

SimplicialMesh square_mesh_with_about(int triangles, double half_width) {
  const int n = std::max(1, static_cast<int>(std::lround(std::sqrt(triangles / 2.0))));
  return square_mesh(n, half_width);
}

SimplicialMesh disc_mesh_with_about(int triangles, double radius) {
  const int rings = std::max(1, static_cast<int>(std::lround(std::sqrt(triangles / 6.0))));
  return disc_mesh(rings, radius);
}

SimplicialMesh uniform_refine(const SimplicialMesh& mesh) {
  std::vector<Point> vertices = mesh.vertices();
  const int nv = mesh.num_vertices();
  for (const auto& e : mesh.edges()) vertices.push_back(0.5 * (mesh.vertex(e.v[0]) + mesh.vertex(e.v[1])));
  std::vector<Triangle> triangles;
  triangles.reserve(4 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    const auto& te = mesh.triangle_edges(t);
    const int ma = nv + te[0], mb = nv + te[1], mc = nv + te[2];
    triangles.push_back({tri[0], mc, mb});
    triangles.push_back({tri[1], ma, mc});
    triangles.push_back({tri[2], mb, ma});
    triangles.push_back({ma, mb, mc});
  }
  return {std::move(vertices), std::move(triangles)};
}

void write_mesh_text(const SimplicialMesh& mesh, std::ostream& out) {
  out << "polyls-mesh 1\n";
  out << "vertices " << mesh.num_vertices() << '\n';
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
  out << "triangles " << mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

SimplicialMesh read_mesh_text(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "polyls-mesh" || version != 1) throw Error("not a polyls-mesh v1 stream");
  int nv = 0;
  if (!(in >> tag >> nv) || tag != "vertices" || nv < 0) throw Error("malformed vertex header");
  std::vector<Point> vertices(nv);
  for (auto& v : vertices) {
    if (!(in >> v.x() >> v.y())) throw Error("truncated vertex list");
  }
  int nt = 0;
  if (!(in >> tag >> nt) || tag != "triangles" || nt < 0) throw Error("malformed triangle header");
  std::vector<Triangle> triangles(nt);
  for (auto& t : triangles) {
    if (!(in >> t[0] >> t[1] >> t[2])) throw Error("truncated triangle list");
  }
  return {std::move(vertices), std::move(triangles)};
}

void save_mesh_text(const SimplicialMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_mesh_text(mesh, out);
  if (!out) throw Error("failed writing " + path);
}

SimplicialMesh load_mesh_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_mesh_text(in);
}

}  // namespace polyls
