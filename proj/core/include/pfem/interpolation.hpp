#ifndef PFEM_INTERPOLATION_HPP_
#define PFEM_INTERPOLATION_HPP_

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "pfem/mesh.hpp"
#include "pfem/series.hpp"
#include "pfem/weighted.hpp"

namespace pfem {

/// g in P_p with g(-1) = 1, g(1) = 0 and minimal H^{0,beta} norm, which
/// decays like (p+1)^{-(1+beta)}:
/// g(x) = (1-x) P_{p-1}^{(beta+2,beta+1)}(x) / (2 P_{p-1}^{(beta+2,beta+1)}(-1)).
/// The result is expressed in the J^basis_beta basis (defaults to beta).
JacobiSeries boundary_decay_poly(int p, double beta);
JacobiSeries boundary_decay_poly(int p, double beta, double basis_beta);

/// Reference coordinates of local vertex slot l (0..3, counter-clockwise from (-1,-1)).
Point corner_of_slot(int slot);

/// xi_l = g(-sx x) g(-sy y) where (sx, sy) is the corner of slot l.
/// xi_l(V_j) = delta_lj. For p = 1 these are the bilinear hats.
TensorCoeffs vertex_function(int slot, int p, double beta);

/**
 * Extension of an edge polynomial w (in the counter-clockwise parameter of
 * `edge`, vanishing at both ends) to Q: equal to w on `edge`, zero on the
 * three other edges. Throws PreconditionError if |w(+-1)| > 1e-10.
 */
TensorCoeffs edge_lift(const JacobiSeries& w, Edge edge, int p, double beta);

/// Element-wise polynomials pulled back to Q, keyed by global element index.
struct PiecewisePoly {
  std::vector<int> elements;
  std::vector<TensorCoeffs> pieces;
  bool continuous = false;

  const TensorCoeffs* find(int k) const;
  TensorCoeffs* find(int k);
};

/// Trace of the piece of element k on global edge e, as a series in the
/// global edge parameter t (lower global vertex at t = -1).
JacobiSeries edge_trace(const ParallelogramMesh& mesh, int k, int e, const TensorCoeffs& piece);

/// Largest H^{0,beta}(e) norm of the trace difference over interior edges
/// shared by two pieces of `u`.
double continuity_defect(const ParallelogramMesh& mesh, const PiecewisePoly& u);

/// Local interpolant I_V^beta u on the vertex patch omega_V at degree p.
/// Requires -1 < beta < -1/2 (ParameterError otherwise).
PiecewisePoly local_interpolant(const ParallelogramMesh& mesh, const PhysicalFunction& u, int v,
                                int p, double beta);

/// Iu = sum_V phi_V I_V u with I_V at degree p_V - 1. Throws DegreeFloorError
/// when some p_V < 2.
PiecewisePoly global_interpolant(const ParallelogramMesh& mesh, const PhysicalFunction& u,
                                 const DegreeMap& degrees, double beta);

/**
 * @brief Lift of an edge function P(t)(1-t^2)^beta into the two elements
 * sharing interior edge `edge`, for beta in (1/2, 1).
 *
 * On each neighbour the lift reads P(X)(1-X^2)^beta g(Y) in a frame where the
 * edge is Y = -1 and X is the global edge parameter; g is the decay
 * polynomial of degree p at exponent -beta. The function is not polynomial and
 * is only available through point evaluation and exact factorised integrals.
 */
class JumpLift {
 public:
  JumpLift(const ParallelogramMesh& mesh, int edge, JacobiSeries poly, double beta, int p);

  int edge() const { return edge_; }
  const std::array<int, 2>& elements() const { return elements_; }
  double beta() const { return beta_; }

  /// Value and reference gradient on element k (one of elements()).
  double value(int k, double x, double y) const;
  Eigen::Vector2d reference_gradient(int k, double x, double y) const;

  /// ||v||_{H^{1,-beta}} summed over both neighbours, integrated exactly.
  double norm_minus_beta() const;

  /// a_K(w, v) = int_K grad w . grad v for element k, given the reference
  /// gradient of w; `points` Gauss nodes per direction.
  double energy_product(int k, const std::function<Eigen::Vector2d(double, double)>& ref_grad_w,
                        int points) const;

 private:
  int slot_of(int k) const;

  int edge_;
  JacobiSeries poly_;
  JacobiSeries g_;
  double beta_;
  std::array<int, 2> elements_{};
  std::array<Eigen::Matrix2d, 2> frames_;  // (X, Y) = T (x, y) per neighbour
  std::array<AffineMap, 2> maps_;
};

}  // namespace pfem

#endif  // PFEM_INTERPOLATION_HPP_
