#ifndef PFEM_QUADRATURE_HPP_
#define PFEM_QUADRATURE_HPP_

#include <vector>

#include "pfem/jacobi.hpp"

namespace pfem {

/**
 * @brief Gauss-Jacobi rule: sum_i w_i f(x_i) ~ int f(x) (1-x)^alpha (1+x)^beta dx.
 *
 * Nodes are strictly increasing in (-1,1), weights are positive, and an
 * n-point rule is exact for polynomials of degree <= 2n-1.
 */
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  JacobiParams params;
  int exactness = -1;

  int size() const { return static_cast<int>(nodes.size()); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/**
 * Golub-Welsch eigenvalues of the Jacobi matrix as starting guesses, then
 * Newton refinement on P_n and weights from the derivative formula
 *   w_i = C_n / ((1 - x_i^2) P_n'(x_i)^2).
 * Throws ParameterError for n <= 0 or invalid exponents.
 */
QuadRule gauss_jacobi_rule(int n, JacobiParams params);

/// Symmetric weight (1-x^2)^beta.
inline QuadRule gauss_jacobi_rule(int n, double beta) {
  return gauss_jacobi_rule(n, JacobiParams::symmetric(beta));
}

inline QuadRule gauss_legendre_rule(int n) { return gauss_jacobi_rule(n, JacobiParams{}); }

}  // namespace pfem

#endif  // PFEM_QUADRATURE_HPP_
