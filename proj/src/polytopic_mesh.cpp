#include "polyls/polytopic_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <tuple>

namespace polyls {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

PolytopicMesh::PolytopicMesh(MeshPtr fine, std::vector<int> element_of_triangle)
    : fine_(std::move(fine)), element_of_triangle_(std::move(element_of_triangle)) {
  const SimplicialMesh& mesh = *fine_;
  if (static_cast<int>(element_of_triangle_.size()) != mesh.num_triangles()) {
    throw Error("partition size does not match the fine mesh");
  }
  int n_elements = 0;
  for (int e : element_of_triangle_) n_elements = std::max(n_elements, e + 1);
  elements_.resize(n_elements);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (element_of_triangle_[t] >= 0) elements_[element_of_triangle_[t]].push_back(t);
  }
  areas_.assign(n_elements, 0.0);
  boxes_.resize(n_elements);
  diameters_.assign(n_elements, 0.0);
  for (int e = 0; e < n_elements; ++e) {
    if (elements_[e].empty()) throw Error("element " + std::to_string(e) + " is empty");
    std::vector<int> verts;
    for (int t : elements_[e]) {
      areas_[e] += mesh.area(t);
      for (int v : mesh.triangle(t)) verts.push_back(v);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    BoundingBox box;
    box.min = box.max = mesh.vertex(verts.front());
    for (int v : verts) {
      box.min = box.min.cwiseMin(mesh.vertex(v));
      box.max = box.max.cwiseMax(mesh.vertex(v));
    }
    boxes_[e] = box;
    double d2 = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      for (std::size_t j = i + 1; j < verts.size(); ++j) {
        d2 = std::max(d2, (mesh.vertex(verts[i]) - mesh.vertex(verts[j])).squaredNorm());
      }
    }
    diameters_[e] = std::sqrt(d2);
  }

  // Group fine edges by (element, neighbor element or -1, kind).
  using Key = std::tuple<int, int, int>;
  std::map<Key, std::vector<std::pair<int, int>>> groups;  // fine edge, side of element[0]
  for (int fe = 0; fe < mesh.num_edges(); ++fe) {
    const auto& edge = mesh.edge(fe);
    int e0 = element_of_triangle_[edge.tri[0]];
    int e1 = edge.boundary() ? -1 : element_of_triangle_[edge.tri[1]];
    if (e0 == e1) continue;
    int side = 0;
    if (e0 < 0 || (e1 >= 0 && e1 < e0)) {
      std::swap(e0, e1);
      side = 1;
    }
    FaceKind kind = FaceKind::Interior;
    if (e1 < 0) kind = edge.boundary() ? FaceKind::DomainBoundary : FaceKind::FreeBoundary;
    groups[{e0, e1, static_cast<int>(kind)}].emplace_back(fe, side);
  }

  element_faces_.resize(n_elements);
  for (const auto& [key, edges] : groups) {
    const auto [e0, e1, kind] = key;
    const int n = static_cast<int>(edges.size());
    std::vector<Point> normals(n);
    std::map<int, std::vector<int>> at_vertex;
    for (int i = 0; i < n; ++i) {
      normals[i] = mesh.edge_normal(edges[i].first, edges[i].second);
      for (int v : mesh.edge(edges[i].first).v) at_vertex[v].push_back(i);
    }
    UnionFind uf(n);
    for (const auto& [v, list] : at_vertex) {
      if (list.size() == 2 && normals[list[0]].dot(normals[list[1]]) > 1.0 - 1e-12) uf.unite(list[0], list[1]);
    }
    std::map<int, std::vector<int>> chains;
    for (int i = 0; i < n; ++i) chains[uf.find(i)].push_back(i);
    for (const auto& [root, members] : chains) {
      PolytopicFace face;
      face.element = {e0, e1};
      face.kind = static_cast<FaceKind>(kind);
      face.normal = normals[members.front()];
      std::map<int, int> degree;
      for (int i : members) {
        const int fe = edges[i].first;
        face.fine_edges.push_back(fe);
        face.length += mesh.edge_length(fe);
        for (int v : mesh.edge(fe).v) ++degree[v];
      }
      std::vector<int> ends;
      for (const auto& [v, d] : degree) {
        if (d == 1) ends.push_back(v);
      }
      if (ends.size() != 2) throw Error("agglomerate face is not a simple segment");
      face.a = mesh.vertex(ends[0]);
      face.b = mesh.vertex(ends[1]);
      // Keep a -> b counter-clockwise around element[0].
      if (cross(face.b - face.a, face.normal) < 0) std::swap(face.a, face.b);
      const int id = static_cast<int>(faces_.size());
      element_faces_[e0].push_back(id);
      if (e1 >= 0) element_faces_[e1].push_back(id);
      faces_.push_back(std::move(face));
    }
  }
}

double PolytopicMesh::total_area() const { return std::accumulate(areas_.begin(), areas_.end(), 0.0); }

double PolytopicMesh::perimeter(int element) const {
  double p = 0.0;
  for (int f : element_faces_[element]) p += faces_[f].length;
  return p;
}

void PolytopicMesh::set_element_sign(std::vector<Sign> sign) {
  if (static_cast<int>(sign.size()) != num_elements()) throw Error("element sign count mismatch");
  element_sign_ = std::move(sign);
}

BoundingBox bounding_box(const PolytopicMesh& mesh, int element) {
  if (element < 0 || element >= mesh.num_elements()) throw Error("invalid element id " + std::to_string(element));
  return mesh.bounding_box(element);
}

KMeansResult kmeans(std::span<const Point> points, int k, std::uint64_t seed, int max_iterations) {
  const int n = static_cast<int>(points.size());
  if (k < 1) throw Error("k-means needs k >= 1");
  if (n < k) throw Error("k-means needs at least k points");
  std::mt19937_64 rng(seed);
  KMeansResult out;
  out.centers.reserve(k);
  std::uniform_int_distribution<int> first(0, n - 1);
  out.centers.push_back(points[first(rng)]);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(out.centers.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points[i] - out.centers.back()).squaredNorm());
      total += d2[i];
    }
    int pick = n - 1;
    if (total > 0) {
      const double r = unit(rng) * total;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= r && d2[i] > 0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    out.centers.push_back(points[pick]);
  }

  out.labels.assign(n, -1);
  std::vector<Point> sums(k);
  std::vector<int> counts(k);
  for (out.iterations = 0; out.iterations < max_iterations;) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points[i] - out.centers[0]).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (points[i] - out.centers[c]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (out.labels[i] != best) {
        out.labels[i] = best;
        changed = true;
      }
    }
    ++out.iterations;
    if (!changed) break;
    std::fill(sums.begin(), sums.end(), Point::Zero());
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      sums[out.labels[i]] += points[i];
      ++counts[out.labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) out.centers[c] = sums[c] / counts[c];
    }
  }
  out.inertia = 0.0;
  for (int i = 0; i < n; ++i) out.inertia += (points[i] - out.centers[out.labels[i]]).squaredNorm();
  return out;
}

std::pair<int, int> split_element_budget(int total, int triangles_plus, int triangles_minus) {
  if (triangles_plus + triangles_minus == 0) return {0, 0};
  if (triangles_minus == 0) return {std::min(total, triangles_plus), 0};
  if (triangles_plus == 0) return {0, std::min(total, triangles_minus)};
  const double share = static_cast<double>(triangles_plus) / (triangles_plus + triangles_minus);
  int k_plus = static_cast<int>(std::lround(share * total));
  k_plus = std::clamp(k_plus, 1, std::max(1, total - 1));
  int k_minus = std::max(1, total - k_plus);
  return {std::min(k_plus, triangles_plus), std::min(k_minus, triangles_minus)};
}

namespace {

// Splits each label class into edge-connected components, then merges small pieces
// into the same-sign neighbor sharing the longest boundary.
std::vector<int> connected_elements(const SimplicialMesh& mesh, const std::vector<int>& label,
                                    const std::vector<Sign>& sign, int min_triangles) {
  const int nt = mesh.num_triangles();
  std::vector<int> comp(nt, -1);
  int n_comp = 0;
  std::queue<int> queue;
  for (int start = 0; start < nt; ++start) {
    if (comp[start] >= 0 || label[start] < 0) continue;
    comp[start] = n_comp;
    queue.push(start);
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop();
      for (int i = 0; i < 3; ++i) {
        const int nb = mesh.neighbor(t, i);
        if (nb >= 0 && comp[nb] < 0 && label[nb] == label[t]) {
          comp[nb] = n_comp;
          queue.push(nb);
        }
      }
    }
    ++n_comp;
  }

  std::vector<int> size(n_comp, 0);
  for (int t = 0; t < nt; ++t) {
    if (comp[t] >= 0) ++size[comp[t]];
  }
  std::vector<int> target(n_comp);
  std::iota(target.begin(), target.end(), 0);
  for (int c = 0; c < n_comp; ++c) {
    if (size[c] >= min_triangles) continue;
    std::map<int, double> shared;
    for (int t = 0; t < nt; ++t) {
      if (comp[t] != c) continue;
      for (int i = 0; i < 3; ++i) {
        const int nb = mesh.neighbor(t, i);
        if (nb >= 0 && comp[nb] >= 0 && comp[nb] != c && sign[nb] == sign[t] && size[comp[nb]] >= min_triangles) {
          shared[comp[nb]] += mesh.edge_length(mesh.triangle_edges(t)[i]);
        }
      }
    }
    if (shared.empty()) continue;
    auto best = std::max_element(shared.begin(), shared.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    target[c] = best->first;
  }

  // Renumber by first fine triangle so ids do not depend on cluster labels.
  std::vector<int> element(nt, -1);
  std::vector<int> id_of(n_comp, -1);
  int next = 0;
  for (int t = 0; t < nt; ++t) {
    if (comp[t] < 0) continue;
    const int c = target[comp[t]];
    if (id_of[c] < 0) id_of[c] = next++;
    element[t] = id_of[c];
  }
  return element;
}

}  // namespace

PolytopicMesh agglomerate(const FittedMesh& fitted, int k_plus, int k_minus, std::uint64_t seed,
                          const AgglomerationOptions& options) {
  const SimplicialMesh& mesh = *fitted.mesh;
  std::vector<int> label(mesh.num_triangles(), -1);
  int offset = 0;
  for (const auto& [s, k] : {std::pair{1, k_plus}, std::pair{-1, k_minus}}) {
    std::vector<int> ids;
    std::vector<Point> bary;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      if (fitted.sign[t] == s) {
        ids.push_back(t);
        bary.push_back(mesh.barycenter(t));
      }
    }
    if (k < 1) {
      if (!ids.empty()) throw Error("sign class with triangles needs at least one cluster");
      continue;
    }
    if (ids.empty()) throw Error(std::string("no triangles with ") + (s > 0 ? "positive" : "negative") + " sign");
    if (static_cast<int>(ids.size()) < k) throw Error("fewer triangles than clusters in a sign class");
    const auto result = kmeans(bary, k, seed + (s > 0 ? 0 : 1), options.max_iterations);
    for (std::size_t i = 0; i < ids.size(); ++i) label[ids[i]] = offset + result.labels[i];
    offset += k;
  }
  auto element = connected_elements(mesh, label, fitted.sign, options.min_component_triangles);
  PolytopicMesh out(fitted.mesh, std::move(element));
  std::vector<Sign> sign(out.num_elements());
  for (int e = 0; e < out.num_elements(); ++e) sign[e] = fitted.sign[out.triangles(e).front()];
  out.set_element_sign(std::move(sign));
  return out;
}

PolytopicMesh with_fine_mesh(const PolytopicMesh& source, MeshPtr fine) {
  if (fine->num_triangles() != source.fine().num_triangles()) throw Error("fine meshes differ in triangle count");
  PolytopicMesh out(std::move(fine), source.element_of_triangle());
  if (!source.element_sign().empty()) out.set_element_sign(source.element_sign());
  if (!source.parent_element().empty()) out.set_parent_element(source.parent_element());
  return out;
}

PolytopicMesh extract_interior_submesh(const PolytopicMesh& mesh) {
  const auto& sign = mesh.element_sign();
  if (sign.empty()) throw Error("polytopic mesh carries no element signs");
  std::vector<int> new_id(mesh.num_elements(), -1);
  std::vector<int> parent;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (sign[e] < 0) {
      new_id[e] = static_cast<int>(parent.size());
      parent.push_back(e);
    }
  }
  if (parent.empty()) throw Error("interior region is empty");
  std::vector<int> element(mesh.fine().num_triangles(), -1);
  for (int t = 0; t < mesh.fine().num_triangles(); ++t) {
    const int e = mesh.element_of(t);
    if (e >= 0) element[t] = new_id[e];
  }
  PolytopicMesh out(mesh.fine_ptr(), std::move(element));
  out.set_element_sign(std::vector<Sign>(out.num_elements(), -1));
  out.set_parent_element(std::move(parent));
  return out;
}

}  // namespace polyls
