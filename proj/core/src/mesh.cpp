#include "pfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/LU>

#include "pfem/errors.hpp"

namespace pfem {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

AffineMap::AffineMap()
    : matrix_(Eigen::Matrix2d::Identity()),
      inverse_(Eigen::Matrix2d::Identity()),
      laplacian_(Eigen::Matrix2d::Identity()),
      offset_(Point::Zero()),
      det_(1.0) {}

AffineMap AffineMap::from_corner(const Point& origin, const Point& a, const Point& b) {
  AffineMap m;
  m.matrix_.col(0) = 0.5 * (a - origin);
  m.matrix_.col(1) = 0.5 * (b - origin);
  m.offset_ = origin + m.matrix_.col(0) + m.matrix_.col(1);
  m.det_ = m.matrix_.determinant();
  if (m.det_ == 0.0) throw GeometryError("affine map is singular");
  m.inverse_ = m.matrix_.inverse();
  m.laplacian_ = m.inverse_ * m.inverse_.transpose();
  return m;
}

ReferenceFunction pull_back(const PhysicalFunction& u, const AffineMap& map) {
  ReferenceFunction r;
  r.value = [u, map](double x, double y) {
    const Point p = map(x, y);
    return u.value(p.x(), p.y());
  };
  if (u.gradient) {
    r.gradient = [u, map](double x, double y) -> Eigen::Vector2d {
      const Point p = map(x, y);
      return map.matrix().transpose() * u.gradient(p.x(), p.y());
    };
  }
  return r;
}

Point edge_point(Edge edge, double s) {
  switch (edge) {
    case Edge::kBottom: return {s, -1.0};
    case Edge::kRight: return {1.0, s};
    case Edge::kTop: return {-s, 1.0};
    case Edge::kLeft: return {-1.0, -s};
  }
  return {0.0, 0.0};
}

ParallelogramMesh::ParallelogramMesh(std::vector<Point> vertices,
                                     std::vector<std::array<int, 4>> elements)
    : vertices_(std::move(vertices)), elements_(std::move(elements)) {
  validate_and_build();
}

void ParallelogramMesh::validate_and_build() {
  const int nv = num_vertices();
  if (elements_.empty()) throw GeometryError("mesh has no elements");

  for (int k = 0; k < num_elements(); ++k) {
    const auto& el = elements_[k];
    for (int i = 0; i < 4; ++i) {
      if (el[i] < 0 || el[i] >= nv) {
        throw GeometryError("element " + std::to_string(k) + " references missing vertex", k);
      }
      for (int j = 0; j < i; ++j) {
        if (el[i] == el[j]) {
          throw GeometryError("element " + std::to_string(k) + " repeats a vertex", k);
        }
      }
    }
    const Point& v0 = vertices_[el[0]];
    const Point& v1 = vertices_[el[1]];
    const Point& v2 = vertices_[el[2]];
    const Point& v3 = vertices_[el[3]];
    const double diam = std::max((v2 - v0).norm(), (v3 - v1).norm());
    if ((v0 + v2 - v1 - v3).norm() > 1e-12 * diam) {
      throw GeometryError("element " + std::to_string(k) + " is not a parallelogram", k);
    }
    const double area = cross(v1 - v0, v3 - v0);
    if (std::abs(area / 4.0) < 1e-12 * diam * diam) {
      throw GeometryError("element " + std::to_string(k) + " is degenerate", k);
    }
    if (area < 0.0) {
      throw OrientationError("element " + std::to_string(k) + " is not counter-clockwise", k);
    }
  }

  // Edges keyed by sorted vertex pair.
  std::map<std::pair<int, int>, int> index;
  element_edges_.assign(elements_.size(), {-1, -1, -1, -1});
  for (int k = 0; k < num_elements(); ++k) {
    const auto& el = elements_[k];
    for (int l = 0; l < 4; ++l) {
      const int a = el[l];
      const int b = el[(l + 1) % 4];
      const auto key = std::minmax(a, b);
      auto it = index.find(key);
      if (it == index.end()) {
        MeshEdge e;
        e.vertices = {key.first, key.second};
        e.in = k;
        e.local[0] = l;
        e.length = (vertices_[b] - vertices_[a]).norm();
        const Point d = vertices_[b] - vertices_[a];
        e.normal = Point(d.y(), -d.x()) / e.length;  // outward for a CCW element
        index.emplace(key, num_edges());
        element_edges_[k][l] = num_edges();
        edges_.push_back(e);
      } else {
        MeshEdge& e = edges_[it->second];
        if (e.out >= 0) {
          throw ConformityError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                    ") is shared by more than two elements",
                                k);
        }
        const int other = elements_[e.in][(e.local[0] + 1) % 4];
        if (other != a) {
          throw OrientationError("elements " + std::to_string(e.in) + " and " +
                                     std::to_string(k) + " traverse a shared edge in the same direction",
                                 k);
        }
        e.out = k;
        e.local[1] = l;
        element_edges_[k][l] = it->second;
      }
    }
  }

  vertex_elements_.assign(nv, {});
  for (int k = 0; k < num_elements(); ++k) {
    for (int v : elements_[k]) vertex_elements_[v].push_back(k);
  }
  for (int v = 0; v < nv; ++v) {
    if (vertex_elements_[v].empty()) {
      throw ConformityError("vertex " + std::to_string(v) + " is not used by any element");
    }
  }

  boundary_vertex_.assign(nv, false);
  for (const MeshEdge& e : edges_) {
    if (!e.boundary()) continue;
    boundary_vertex_[e.vertices[0]] = true;
    boundary_vertex_[e.vertices[1]] = true;
    // A vertex strictly inside a boundary edge is a hanging node.
    const Point& a = vertices_[e.vertices[0]];
    const Point& b = vertices_[e.vertices[1]];
    const Point d = b - a;
    for (int v = 0; v < nv; ++v) {
      if (v == e.vertices[0] || v == e.vertices[1]) continue;
      const Point r = vertices_[v] - a;
      const double t = r.dot(d) / d.squaredNorm();
      if (t <= 1e-12 || t >= 1.0 - 1e-12) continue;
      if (std::abs(cross(d, r)) <= 1e-12 * d.squaredNorm()) {
        throw ConformityError("hanging node " + std::to_string(v) + " on edge of element " +
                                  std::to_string(e.in),
                              e.in);
      }
    }
  }

  // Normals of interior edges point from `in` (lower element index) to `out`.
  for (MeshEdge& e : edges_) {
    if (!e.boundary() && e.out < e.in) {
      std::swap(e.in, e.out);
      std::swap(e.local[0], e.local[1]);
      e.normal = -e.normal;
    }
  }
}

int ParallelogramMesh::num_interior_edges() const {
  return static_cast<int>(
      std::count_if(edges_.begin(), edges_.end(), [](const MeshEdge& e) { return !e.boundary(); }));
}

int ParallelogramMesh::edge_orientation(int k, int l) const {
  const int a = elements_[k][l];
  const int b = elements_[k][(l + 1) % 4];
  return a < b ? 1 : -1;
}

int ParallelogramMesh::local_vertex(int k, int v) const {
  for (int i = 0; i < 4; ++i) {
    if (elements_[k][i] == v) return i;
  }
  return -1;
}

int ParallelogramMesh::local_edge(int k, int e) const {
  for (int l = 0; l < 4; ++l) {
    if (element_edges_[k][l] == e) return l;
  }
  return -1;
}

AffineMap ParallelogramMesh::geometry(int k) const {
  const auto& el = elements_[k];
  return AffineMap::from_corner(vertices_[el[0]], vertices_[el[1]], vertices_[el[3]]);
}

double ParallelogramMesh::diameter(int k) const {
  const auto& el = elements_[k];
  return std::max((vertices_[el[2]] - vertices_[el[0]]).norm(),
                  (vertices_[el[3]] - vertices_[el[1]]).norm());
}

Point ParallelogramMesh::edge_reference_point(int k, int e, double t) const {
  const int l = local_edge(k, e);
  if (l < 0) throw ParameterError("edge is not an edge of the element");
  return edge_point(static_cast<Edge>(l), edge_orientation(k, l) * t);
}

DegreeMap::DegreeMap(std::vector<int> degrees) : p_(std::move(degrees)) {
  for (int p : p_) {
    if (p < 1) throw ParameterError("DegreeMap: degrees must be >= 1");
  }
}

DegreeMap DegreeMap::uniform(int num_elements, int p) {
  return DegreeMap(std::vector<int>(num_elements, p));
}

int DegreeMap::max() const { return p_.empty() ? 0 : *std::max_element(p_.begin(), p_.end()); }
int DegreeMap::min() const { return p_.empty() ? 0 : *std::min_element(p_.begin(), p_.end()); }

PatchTables patches_and_degrees(const ParallelogramMesh& mesh, const DegreeMap& degrees) {
  if (degrees.size() != mesh.num_elements()) {
    throw ParameterError("patches_and_degrees: " + std::to_string(degrees.size()) +
                         " degrees for " + std::to_string(mesh.num_elements()) + " elements");
  }
  PatchTables t;
  const int nv = mesh.num_vertices();
  t.vertex_patch.resize(nv);
  t.vertex_degree.resize(nv);
  for (int v = 0; v < nv; ++v) {
    t.vertex_patch[v] = mesh.vertex_elements(v);
    std::sort(t.vertex_patch[v].begin(), t.vertex_patch[v].end());
    int pmin = degrees[t.vertex_patch[v].front()];
    for (int k : t.vertex_patch[v]) pmin = std::min(pmin, degrees[k]);
    t.vertex_degree[v] = pmin;
  }

  auto union_of = [&](std::initializer_list<int> verts) {
    std::vector<int> out;
    for (int v : verts) out.insert(out.end(), t.vertex_patch[v].begin(), t.vertex_patch[v].end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  t.element_patch.resize(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& el = mesh.element(k);
    t.element_patch[k] = union_of({el[0], el[1], el[2], el[3]});
    for (int other : t.element_patch[k]) {
      if (degrees[k] > kComparabilityConstant * degrees[other]) t.violations.emplace_back(k, other);
    }
  }

  t.edge_patch.resize(mesh.num_edges());
  t.edge_degree.resize(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const MeshEdge& edge = mesh.edge(e);
    t.edge_patch[e] = union_of({edge.vertices[0], edge.vertices[1]});
    t.edge_degree[e] = edge.boundary() ? degrees[edge.in]
                                       : std::min(degrees[edge.in], degrees[edge.out]);
  }
  return t;
}

int smooth_degrees(const ParallelogramMesh& mesh, DegreeMap& degrees, int cap) {
  if (degrees.size() != mesh.num_elements()) {
    throw ParameterError("smooth_degrees: degree map does not match the mesh");
  }
  int raised = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const auto& patch = mesh.vertex_elements(v);
      int pmax = 0;
      for (int k : patch) pmax = std::max(pmax, degrees[k]);
      for (int k : patch) {
        const int floor = std::min(pmax - 1, cap);
        if (degrees[k] < floor) {
          degrees[k] = floor;
          ++raised;
          changed = true;
        }
      }
    }
  }
  return raised;
}

ParallelogramMesh make_rectangle_mesh(double x0, double x1, double y0, double y1, int nx,
                                      int ny) {
  if (nx < 1 || ny < 1) throw ParameterError("make_rectangle_mesh: need nx, ny >= 1");
  std::vector<Point> v;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      v.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
    }
  }
  std::vector<std::array<int, 4>> el;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = j * (nx + 1) + i;
      el.push_back({a, a + 1, a + nx + 2, a + nx + 1});
    }
  }
  return ParallelogramMesh(std::move(v), std::move(el));
}

ParallelogramMesh make_lshape_mesh(int n) {
  if (n < 1) throw ParameterError("make_lshape_mesh: need n >= 1");
  const int m = 2 * n;  // cells per side of (-1,1)^2
  const double h = 1.0 / n;
  auto inside = [&](int i, int j) {
    // cell [i, i+1] x [j, j+1] in grid units; drop the lower-right quadrant
    return !(i >= n && j < n);
  };
  std::map<std::pair<int, int>, int> id;
  std::vector<Point> v;
  std::vector<std::array<int, 4>> el;
  auto vertex = [&](int i, int j) {
    auto [it, fresh] = id.try_emplace({i, j}, static_cast<int>(v.size()));
    if (fresh) v.emplace_back(-1.0 + i * h, -1.0 + j * h);
    return it->second;
  };
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (!inside(i, j)) continue;
      el.push_back({vertex(i, j), vertex(i + 1, j), vertex(i + 1, j + 1), vertex(i, j + 1)});
    }
  }
  return ParallelogramMesh(std::move(v), std::move(el));
}

ParallelogramMesh make_reference_square_mesh() {
  return make_rectangle_mesh(-1.0, 1.0, -1.0, 1.0, 1, 1);
}

}  // namespace pfem
