#ifndef PFEM_MESH_HPP_
#define PFEM_MESH_HPP_

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "pfem/weighted.hpp"

namespace pfem {

using Point = Eigen::Vector2d;

/**
 * @brief Affine map F(x,y) = matrix * (x,y) + offset from Q = (-1,1)^2.
 *
 * laplacian_coeffs() is A = M^{-1} M^{-T}, so that for û = u o F
 *   (Laplace u) o F = sum_ij A_ij d^2 û / dx_i dx_j.
 */
class AffineMap {
 public:
  AffineMap();

  /// F(-1,-1) = origin, F(1,-1) = a, F(-1,1) = b.
  static AffineMap from_corner(const Point& origin, const Point& a, const Point& b);

  Point operator()(double x, double y) const { return matrix_ * Point(x, y) + offset_; }
  Point to_reference(const Point& p) const { return inverse_ * (p - offset_); }

  const Eigen::Matrix2d& matrix() const { return matrix_; }
  const Point& offset() const { return offset_; }
  const Eigen::Matrix2d& laplacian_coeffs() const { return laplacian_; }
  double det() const { return det_; }

  /// Physical gradient from a reference gradient: M^{-T} g.
  Eigen::Vector2d physical_gradient(const Eigen::Vector2d& g) const {
    return inverse_.transpose() * g;
  }

 private:
  Eigen::Matrix2d matrix_;
  Eigen::Matrix2d inverse_;
  Eigen::Matrix2d laplacian_;
  Point offset_;
  double det_;
};

/// Physical-space scalar field with an optional analytic gradient.
struct PhysicalFunction {
  std::function<double(double, double)> value;
  std::function<Eigen::Vector2d(double, double)> gradient;
};

/// u o F on the reference square; the gradient becomes M^T (grad u) o F.
ReferenceFunction pull_back(const PhysicalFunction& u, const AffineMap& map);

/// Reference point on local edge `edge` at the counter-clockwise parameter s.
Point edge_point(Edge edge, double s);

struct MeshEdge {
  std::array<int, 2> vertices{};  // lower global vertex index first
  int in = -1;                    // lower element index
  int out = -1;                   // -1 on the boundary
  std::array<int, 2> local{-1, -1};  // local edge index inside `in` / `out`
  Point normal = Point::Zero();   // unit normal pointing from `in` to `out`
  double length = 0.0;

  bool boundary() const { return out < 0; }
};

/**
 * @brief Validated conforming mesh of parallelograms.
 *
 * Elements list their vertices counter-clockwise; local edge l runs from local
 * vertex l to l+1 and coincides with reference edge Edge(l) (bottom, right,
 * top, left) under geometry(K). Edge adjacency and boundary flags are derived
 * during construction, never read from input.
 */
class ParallelogramMesh {
 public:
  ParallelogramMesh(std::vector<Point> vertices, std::vector<std::array<int, 4>> elements);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_interior_edges() const;

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int v) const { return vertices_[v]; }
  const std::vector<std::array<int, 4>>& elements() const { return elements_; }
  const std::array<int, 4>& element(int k) const { return elements_[k]; }
  const std::vector<MeshEdge>& edges() const { return edges_; }
  const MeshEdge& edge(int e) const { return edges_[e]; }

  /// Global edge index of local edge l of element k.
  int element_edge(int k, int l) const { return element_edges_[k][l]; }
  /// +1 if local edge l of k runs from the lower to the higher global vertex.
  int edge_orientation(int k, int l) const;
  /// Local slot of global vertex v in element k, or -1.
  int local_vertex(int k, int v) const;
  /// Local edge index of global edge e in element k, or -1.
  int local_edge(int k, int e) const;

  bool is_boundary_vertex(int v) const { return boundary_vertex_[v]; }
  const std::vector<int>& vertex_elements(int v) const { return vertex_elements_[v]; }

  /// F_K with (-1,-1) -> vertex 0, (1,-1) -> vertex 1, (-1,1) -> vertex 3.
  AffineMap geometry(int k) const;
  double diameter(int k) const;

  /// Map from the global edge parameter t in [-1,1] (lower vertex first) to
  /// the reference coordinates of element k.
  Point edge_reference_point(int k, int e, double t) const;

 private:
  void validate_and_build();

  std::vector<Point> vertices_;
  std::vector<std::array<int, 4>> elements_;
  std::vector<MeshEdge> edges_;
  std::vector<std::array<int, 4>> element_edges_;
  std::vector<bool> boundary_vertex_;
  std::vector<std::vector<int>> vertex_elements_;
};

/// Per-element polynomial degrees p_K >= 1.
class DegreeMap {
 public:
  DegreeMap() = default;
  explicit DegreeMap(std::vector<int> degrees);
  static DegreeMap uniform(int num_elements, int p);

  int operator[](int k) const { return p_[k]; }
  int& operator[](int k) { return p_[k]; }
  int size() const { return static_cast<int>(p_.size()); }
  int max() const;
  int min() const;
  const std::vector<int>& values() const { return p_; }

  friend bool operator==(const DegreeMap&, const DegreeMap&) = default;

 private:
  std::vector<int> p_;
};

/// Maximum ratio p_K / p_K' allowed between vertex neighbours.
inline constexpr int kComparabilityConstant = 2;

struct PatchTables {
  std::vector<std::vector<int>> vertex_patch;   // omega_V: elements containing V
  std::vector<std::vector<int>> element_patch;  // omega_K: elements sharing a vertex with K
  std::vector<std::vector<int>> edge_patch;     // omega_e: elements touching the closed edge
  std::vector<int> vertex_degree;               // p_V = min over omega_V
  std::vector<int> edge_degree;                 // p_e = min over elements owning e
  std::vector<std::pair<int, int>> violations;  // (K, K') with p_K > C p_K'
};

/// Throws ParameterError when `degrees` does not cover every element.
PatchTables patches_and_degrees(const ParallelogramMesh& mesh, const DegreeMap& degrees);

/// Raise degrees until |p_K - p_K'| <= 1 for all vertex neighbours, never
/// exceeding `cap`. Returns the number of raised entries.
int smooth_degrees(const ParallelogramMesh& mesh, DegreeMap& degrees, int cap);

/// nx * ny axis-aligned cells on [x0,x1] x [y0,y1].
ParallelogramMesh make_rectangle_mesh(double x0, double x1, double y0, double y1, int nx, int ny);

/// (-1,1)^2 minus [0,1) x (-1,0], cells of side 1/n; reentrant corner at 0.
ParallelogramMesh make_lshape_mesh(int n);

/// One element equal to Q = (-1,1)^2.
ParallelogramMesh make_reference_square_mesh();

/// JSON document {"vertices": [[x,y],...], "elements": [[i0,i1,i2,i3],...]},
/// optional "degrees": [p_0, ...]. Throws ConfigError on malformed input and
/// MeshError subclasses on invalid geometry.
struct MeshDocument {
  ParallelogramMesh mesh;
  std::vector<int> degrees;  // empty when absent
};
MeshDocument read_mesh_json(std::istream& in);
MeshDocument read_mesh_file(const std::string& path);
void write_mesh_json(std::ostream& out, const ParallelogramMesh& mesh,
                     const std::vector<int>& degrees = {});

}  // namespace pfem

#endif  // PFEM_MESH_HPP_
