#ifndef PFEM_FEM_HPP_
#define PFEM_FEM_HPP_

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "pfem/mesh.hpp"

namespace pfem {

/// 1D hierarchical shape k on [-1,1]: N_0 = (1-x)/2, N_1 = (1+x)/2 and for
/// k >= 2 the integrated Legendre bubble (P_k - P_{k-2}) / sqrt(2(2k-1)).
double shape_1d(int k, int deriv, double x);

/// T(m, k) = d^deriv N_k (xs[m]) for k = 0..p.
Eigen::MatrixXd shape_table(int p, const std::vector<double>& xs, int deriv = 0);

/**
 * @brief Global numbering of the hierarchical basis of S_0^p.
 *
 * Vertex dofs come first, then the p_e - 1 modes of each edge (minimum rule),
 * then the (p_K - 1)^2 interior modes of each element. Edge modes are
 * functions of the global edge parameter; an element sees mode k with sign
 * (+-1)^k depending on its local traversal direction.
 */
class DofMap {
 public:
  struct LocalDof {
    int a;        // 1D shape index in x
    int b;        // 1D shape index in y
    int dof;      // global index
    double sign;  // local shape = sign * global function on this element
  };

  DofMap(const ParallelogramMesh& mesh, const DegreeMap& degrees);

  int num_dofs() const { return num_dofs_; }
  int num_free() const { return num_free_; }
  int edge_degree(int e) const { return edge_degree_[e]; }
  const std::vector<LocalDof>& element_dofs(int k) const { return local_[k]; }
  bool is_dirichlet(int dof) const { return free_[dof] < 0; }
  /// Position among the free dofs, or -1 for a Dirichlet dof.
  int free_index(int dof) const { return free_[dof]; }

 private:
  int num_dofs_ = 0;
  int num_free_ = 0;
  std::vector<int> edge_degree_;
  std::vector<std::vector<LocalDof>> local_;
  std::vector<int> free_;
};

/// Mesh, degrees and dof numbering. The mesh must outlive the space.
class FESpace {
 public:
  FESpace(const ParallelogramMesh& mesh, DegreeMap degrees);

  const ParallelogramMesh& mesh() const { return *mesh_; }
  const DegreeMap& degrees() const { return degrees_; }
  const DofMap& dofs() const { return dofs_; }

 private:
  const ParallelogramMesh* mesh_;
  DegreeMap degrees_;
  DofMap dofs_;
};

struct LinearSystem {
  Eigen::SparseMatrix<double> matrix;  // free x free
  Eigen::VectorXd rhs;
};

/// Default extra Gauss-Legendre points for the load integral.
inline constexpr int kDefaultQuadBoost = 3;

/**
 * Stiffness a(u,v) = int grad u . grad v (exact, from 1D mass/stiffness
 * tables) and load int f v by Gauss-Legendre with p_K + 1 + boost points per
 * direction. Homogeneous Dirichlet dofs are eliminated.
 */
LinearSystem assemble(const FESpace& space, const std::function<double(double, double)>& f,
                      int quad_boost = kDefaultQuadBoost);

/// F_i = int grad u . grad phi_i over the free basis, with `points` Gauss
/// nodes per direction. Used to test Galerkin orthogonality.
Eigen::VectorXd gradient_functional(const FESpace& space, const PhysicalFunction& u, int points);

class DiscreteSolution {
 public:
  enum class Quantity { kValue, kGradient, kLaplacian };

  DiscreteSolution(std::shared_ptr<const FESpace> space, Eigen::VectorXd coeffs);

  const FESpace& space() const { return *space_; }
  const ParallelogramMesh& mesh() const { return space_->mesh(); }
  const DegreeMap& degrees() const { return space_->degrees(); }
  /// Coefficients over all dofs (zero on Dirichlet dofs).
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  /// Coefficients over the free dofs, in free_index order.
  Eigen::VectorXd free_coeffs() const;

  /// C(a, b): coefficient of N_a(x) N_b(y) on element k.
  Eigen::MatrixXd local_coeffs(int k) const;

  /// G(m, n) = d^{dx+dy} u_hat / dx^dx dy^dy at (xs[m], ys[n]) on element k.
  Eigen::MatrixXd reference_grid(int k, int dx, int dy, const std::vector<double>& xs,
                                 const std::vector<double>& ys) const;

  /// Physical values at reference points of element k: one column for
  /// kValue and kLaplacian, two for kGradient.
  Eigen::MatrixXd evaluate(int k, Quantity what, const std::vector<Point>& points) const;

  double value(int k, double x, double y) const;
  Eigen::Vector2d reference_gradient(int k, double x, double y) const;
  Eigen::Vector2d gradient(int k, double x, double y) const;

 private:
  std::shared_ptr<const FESpace> space_;
  Eigen::VectorXd coeffs_;
};

/**
 * Sparse Cholesky solve with up to three steps of iterative refinement.
 * Throws SolverError if the matrix is not SPD or the relative residual stays
 * above 1e-12.
 */
DiscreteSolution solve(std::shared_ptr<const FESpace> space, const LinearSystem& system);

/// Convenience: assemble and solve.
DiscreteSolution solve_poisson(std::shared_ptr<const FESpace> space,
                               const std::function<double(double, double)>& f,
                               int quad_boost = kDefaultQuadBoost);

}  // namespace pfem

#endif  // PFEM_FEM_HPP_
