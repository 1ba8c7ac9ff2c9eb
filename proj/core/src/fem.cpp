#include "pfem/fem.hpp"

#include <cmath>
#include <map>
#include <string>

#include <Eigen/LU>
#include <Eigen/SparseCholesky>

#include "pfem/errors.hpp"
#include "pfem/jacobi.hpp"
#include "pfem/quadrature.hpp"

namespace pfem {

namespace {

constexpr double kResidualTol = 1e-12;

// Exact 1D mass M(a,c) = int N_a N_c, stiffness S(a,c) = int N_a' N_c' and
// mixed C(a,c) = int N_a' N_c for shapes 0..p.
struct Tables1D {
  Eigen::MatrixXd mass, stiff, mixed;
};

Tables1D tables_1d(int p) {
  const QuadRule rule = gauss_legendre_rule(p + 1);
  const Eigen::MatrixXd n = shape_table(p, rule.nodes, 0);
  const Eigen::MatrixXd d = shape_table(p, rule.nodes, 1);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), rule.size());
  Tables1D t;
  t.mass = n.transpose() * w.asDiagonal() * n;
  t.stiff = d.transpose() * w.asDiagonal() * d;
  t.mixed = d.transpose() * w.asDiagonal() * n;
  return t;
}

int vertex_slot(int a, int b) {
  static constexpr int kSlot[2][2] = {{0, 3}, {1, 2}};
  return kSlot[a][b];
}

}  // namespace

double shape_1d(int k, int deriv, double x) {
  if (k < 0 || deriv < 0) throw ParameterError("shape_1d: negative index");
  if (k <= 1) {
    const double s = k == 0 ? -0.5 : 0.5;
    if (deriv == 0) return 0.5 + s * x;
    return deriv == 1 ? s : 0.0;
  }
  const double scale = 1.0 / std::sqrt(2.0 * (2.0 * k - 1.0));
  return scale * (eval_jacobi_deriv(k, deriv, 0.0, x) - eval_jacobi_deriv(k - 2, deriv, 0.0, x));
}

Eigen::MatrixXd shape_table(int p, const std::vector<double>& xs, int deriv) {
  Eigen::MatrixXd t(xs.size(), p + 1);
  for (std::size_t m = 0; m < xs.size(); ++m) {
    for (int k = 0; k <= p; ++k) t(m, k) = shape_1d(k, deriv, xs[m]);
  }
  return t;
}

DofMap::DofMap(const ParallelogramMesh& mesh, const DegreeMap& degrees) {
  if (degrees.size() != mesh.num_elements()) {
    throw ParameterError("DofMap: " + std::to_string(degrees.size()) + " degrees for " +
                         std::to_string(mesh.num_elements()) + " elements");
  }
  std::vector<bool> dirichlet;
  const int nv = mesh.num_vertices();
  for (int v = 0; v < nv; ++v) dirichlet.push_back(mesh.is_boundary_vertex(v));

  std::vector<int> edge_offset(mesh.num_edges());
  edge_degree_.resize(mesh.num_edges());
  int next = nv;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const MeshEdge& edge = mesh.edge(e);
    edge_degree_[e] =
        edge.boundary() ? degrees[edge.in] : std::min(degrees[edge.in], degrees[edge.out]);
    edge_offset[e] = next;
    for (int k = 2; k <= edge_degree_[e]; ++k) dirichlet.push_back(edge.boundary());
    next += std::max(edge_degree_[e] - 1, 0);
  }

  local_.resize(mesh.num_elements());
  for (int el = 0; el < mesh.num_elements(); ++el) {
    const int p = degrees[el];
    const int interior = next;
    next += (p - 1) * (p - 1);
    for (int i = 0; i < (p - 1) * (p - 1); ++i) dirichlet.push_back(false);
    auto& list = local_[el];
    for (int b = 0; b <= p; ++b) {
      for (int a = 0; a <= p; ++a) {
        if (a <= 1 && b <= 1) {
          list.push_back({a, b, mesh.element(el)[vertex_slot(a, b)], 1.0});
        } else if (a >= 2 && b >= 2) {
          list.push_back({a, b, interior + (b - 2) * (p - 1) + (a - 2), 1.0});
        } else {
          // Edge mode: bottom/top carry x-modes, left/right y-modes.
          const bool along_x = b <= 1;
          const int mode = along_x ? a : b;
          const Edge local = along_x ? (b == 0 ? Edge::kBottom : Edge::kTop)
                                     : (a == 1 ? Edge::kRight : Edge::kLeft);
          const int l = static_cast<int>(local);
          const int e = mesh.element_edge(el, l);
          if (mode > edge_degree_[e]) continue;
          const int dir = (local == Edge::kBottom || local == Edge::kRight) ? 1 : -1;
          const int o = dir * mesh.edge_orientation(el, l);
          const double sign = (o < 0 && mode % 2 == 1) ? -1.0 : 1.0;
          list.push_back({a, b, edge_offset[e] + mode - 2, sign});
        }
      }
    }
  }
  num_dofs_ = next;
  free_.assign(num_dofs_, -1);
  for (int i = 0; i < num_dofs_; ++i) {
    if (!dirichlet[i]) free_[i] = num_free_++;
  }
}

FESpace::FESpace(const ParallelogramMesh& mesh, DegreeMap degrees)
    : mesh_(&mesh), degrees_(std::move(degrees)), dofs_(mesh, degrees_) {}

LinearSystem assemble(const FESpace& space, const std::function<double(double, double)>& f,
                      int quad_boost) {
  if (quad_boost < 0) throw ParameterError("assemble: quadrature boost must be >= 0");
  const ParallelogramMesh& mesh = space.mesh();
  const DofMap& dofs = space.dofs();
  std::map<int, Tables1D> cache;
  std::vector<Eigen::Triplet<double>> triplets;
  LinearSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(dofs.num_free());

  for (int k = 0; k < mesh.num_elements(); ++k) {
    const int p = space.degrees()[k];
    auto it = cache.find(p);
    if (it == cache.end()) it = cache.emplace(p, tables_1d(p)).first;
    const Tables1D& t = it->second;
    const AffineMap map = mesh.geometry(k);
    const Eigen::Matrix2d& a = map.laplacian_coeffs();
    const double det = std::abs(map.det());

    const QuadRule rule = gauss_legendre_rule(p + 1 + quad_boost);
    const Eigen::MatrixXd n = shape_table(p, rule.nodes, 0);
    Eigen::MatrixXd fw(rule.size(), rule.size());
    for (int i = 0; i < rule.size(); ++i) {
      for (int j = 0; j < rule.size(); ++j) {
        const Point x = map(rule.nodes[i], rule.nodes[j]);
        fw(i, j) = rule.weights[i] * rule.weights[j] * f(x.x(), x.y());
      }
    }
    const Eigen::MatrixXd load = det * (n.transpose() * fw * n);

    const auto& local = dofs.element_dofs(k);
    for (const auto& di : local) {
      const int fi = dofs.free_index(di.dof);
      if (fi < 0) continue;
      sys.rhs[fi] += di.sign * load(di.a, di.b);
      for (const auto& dj : local) {
        const int fj = dofs.free_index(dj.dof);
        if (fj < 0) continue;
        const double kij = a(0, 0) * t.stiff(di.a, dj.a) * t.mass(di.b, dj.b) +
                           a(0, 1) * t.mixed(di.a, dj.a) * t.mixed(dj.b, di.b) +
                           a(1, 0) * t.mixed(dj.a, di.a) * t.mixed(di.b, dj.b) +
                           a(1, 1) * t.mass(di.a, dj.a) * t.stiff(di.b, dj.b);
        triplets.emplace_back(fi, fj, det * di.sign * dj.sign * kij);
      }
    }
  }
  sys.matrix.resize(dofs.num_free(), dofs.num_free());
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

Eigen::VectorXd gradient_functional(const FESpace& space, const PhysicalFunction& u, int points) {
  if (!u.gradient) throw ParameterError("gradient_functional: gradient callback missing");
  const ParallelogramMesh& mesh = space.mesh();
  const DofMap& dofs = space.dofs();
  const QuadRule rule = gauss_legendre_rule(points);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.num_free());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const int p = space.degrees()[k];
    const AffineMap map = mesh.geometry(k);
    const Eigen::Matrix2d minv = map.matrix().inverse();
    const Eigen::MatrixXd n = shape_table(p, rule.nodes, 0);
    const Eigen::MatrixXd d = shape_table(p, rule.nodes, 1);
    Eigen::MatrixXd gx(points, points), gy(points, points);
    for (int i = 0; i < points; ++i) {
      for (int j = 0; j < points; ++j) {
        const Point x = map(rule.nodes[i], rule.nodes[j]);
        const Eigen::Vector2d g = minv * u.gradient(x.x(), x.y());
        const double w = rule.weights[i] * rule.weights[j];
        gx(i, j) = w * g.x();
        gy(i, j) = w * g.y();
      }
    }
    const Eigen::MatrixXd fm =
        std::abs(map.det()) * (d.transpose() * gx * n + n.transpose() * gy * d);
    for (const auto& di : dofs.element_dofs(k)) {
      const int fi = dofs.free_index(di.dof);
      if (fi >= 0) out[fi] += di.sign * fm(di.a, di.b);
    }
  }
  return out;
}

DiscreteSolution::DiscreteSolution(std::shared_ptr<const FESpace> space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (!space_) throw ParameterError("DiscreteSolution: null space");
  if (coeffs_.size() != space_->dofs().num_dofs()) {
    throw ParameterError("DiscreteSolution: coefficient vector does not match the dof map");
  }
}

Eigen::VectorXd DiscreteSolution::free_coeffs() const {
  const DofMap& dofs = space_->dofs();
  Eigen::VectorXd out(dofs.num_free());
  for (int i = 0; i < dofs.num_dofs(); ++i) {
    if (dofs.free_index(i) >= 0) out[dofs.free_index(i)] = coeffs_[i];
  }
  return out;
}

Eigen::MatrixXd DiscreteSolution::local_coeffs(int k) const {
  const int p = degrees()[k];
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p + 1, p + 1);
  for (const auto& d : space_->dofs().element_dofs(k)) c(d.a, d.b) = d.sign * coeffs_[d.dof];
  return c;
}

Eigen::MatrixXd DiscreteSolution::reference_grid(int k, int dx, int dy,
                                                 const std::vector<double>& xs,
                                                 const std::vector<double>& ys) const {
  const int p = degrees()[k];
  return shape_table(p, xs, dx) * local_coeffs(k) * shape_table(p, ys, dy).transpose();
}

Eigen::MatrixXd DiscreteSolution::evaluate(int k, Quantity what,
                                           const std::vector<Point>& points) const {
  if (k < 0 || k >= mesh().num_elements()) throw ParameterError("evaluate: bad element index");
  const AffineMap map = mesh().geometry(k);
  const Eigen::MatrixXd c = local_coeffs(k);
  const int p = degrees()[k];
  Eigen::MatrixXd out(points.size(), what == Quantity::kGradient ? 2 : 1);
  std::vector<double> x(1), y(1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    x[0] = points[i].x();
    y[0] = points[i].y();
    auto d = [&](int dx, int dy) {
      return (shape_table(p, x, dx) * c * shape_table(p, y, dy).transpose())(0, 0);
    };
    switch (what) {
      case Quantity::kValue: out(i, 0) = d(0, 0); break;
      case Quantity::kGradient:
        out.row(i) = map.physical_gradient(Eigen::Vector2d(d(1, 0), d(0, 1))).transpose();
        break;
      case Quantity::kLaplacian: {
        const Eigen::Matrix2d& a = map.laplacian_coeffs();
        out(i, 0) = a(0, 0) * d(2, 0) + (a(0, 1) + a(1, 0)) * d(1, 1) + a(1, 1) * d(0, 2);
        break;
      }
    }
  }
  return out;
}

double DiscreteSolution::value(int k, double x, double y) const {
  return evaluate(k, Quantity::kValue, {Point(x, y)})(0, 0);
}

Eigen::Vector2d DiscreteSolution::reference_gradient(int k, double x, double y) const {
  const int p = degrees()[k];
  const std::vector<double> xs{x}, ys{y};
  const Eigen::MatrixXd c = local_coeffs(k);
  return {(shape_table(p, xs, 1) * c * shape_table(p, ys, 0).transpose())(0, 0),
          (shape_table(p, xs, 0) * c * shape_table(p, ys, 1).transpose())(0, 0)};
}

Eigen::Vector2d DiscreteSolution::gradient(int k, double x, double y) const {
  return evaluate(k, Quantity::kGradient, {Point(x, y)}).row(0).transpose();
}

DiscreteSolution solve(std::shared_ptr<const FESpace> space, const LinearSystem& system) {
  const DofMap& dofs = space->dofs();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(system.rhs.size());
  const double bnorm = system.rhs.norm();
  if (system.rhs.size() > 0 && bnorm > 0.0) {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol(system.matrix);
    if (chol.info() != Eigen::Success) {
      throw SolverError("stiffness matrix is not symmetric positive definite");
    }
    x = chol.solve(system.rhs);
    double rel = (system.rhs - system.matrix * x).norm() / bnorm;
    for (int step = 0; step < 3 && rel > kResidualTol; ++step) {
      x += chol.solve(system.rhs - system.matrix * x);
      rel = (system.rhs - system.matrix * x).norm() / bnorm;
    }
    if (!(rel <= kResidualTol)) {
      throw SolverError("relative residual " + std::to_string(rel) + " above 1e-12");
    }
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(dofs.num_dofs());
  for (int i = 0; i < dofs.num_dofs(); ++i) {
    if (dofs.free_index(i) >= 0) full[i] = x[dofs.free_index(i)];
  }
  return DiscreteSolution(std::move(space), std::move(full));
}

DiscreteSolution solve_poisson(std::shared_ptr<const FESpace> space,
                               const std::function<double(double, double)>& f, int quad_boost) {
  const LinearSystem sys = assemble(*space, f, quad_boost);
  return solve(std::move(space), sys);
}

}  // namespace pfem
