#ifndef PFEM_JACOBI_HPP_
#define PFEM_JACOBI_HPP_

#include <span>
#include <vector>

namespace pfem {

/**
 * @brief Exponents of the Jacobi weight (1-x)^alpha (1+x)^beta on (-1,1).
 *
 * Both exponents must exceed -1 for the weight to be integrable.
 */
struct JacobiParams {
  double alpha = 0.0;
  double beta = 0.0;

  static constexpr JacobiParams symmetric(double b) { return {b, b}; }

  /// Throws ParameterError unless alpha > -1 and beta > -1.
  void validate() const;

  friend constexpr bool operator==(const JacobiParams&,
                                   const JacobiParams&) = default;
};

/// Throws ParameterError unless beta > -1.
void check_weight_exponent(double beta);

/**
 * @brief Jacobi polynomial P_p^{(alpha,beta)}(x) by the three-term recurrence.
 *
 * Normalised so that P_p(1) = Gamma(p+alpha+1) / (Gamma(p+1) Gamma(alpha+1)).
 * For alpha = beta this is the symmetric family J_p^beta.
 */
double eval_jacobi(int p, JacobiParams params, double x);

/// Values P_0(x) .. P_{out.size()-1}(x) in one recurrence sweep.
void eval_jacobi_all(JacobiParams params, double x, std::span<double> out);

/**
 * @brief k-th derivative of J_p^beta, via
 * d^k/dx^k J_p^b = 2^{-k} Gamma(p+2b+k+1)/Gamma(p+2b+1) J_{p-k}^{b+k}.
 *
 * Returns 0 when k > p. Throws ParameterError for k < 0.
 */
double eval_jacobi_deriv(int p, int k, double beta, double x);

/// Two-parameter version of eval_jacobi_deriv.
double eval_jacobi_deriv(int p, int k, JacobiParams params, double x);

/// P_p^{(alpha,beta)}(1) = Gamma(p+alpha+1) / (Gamma(p+1) Gamma(alpha+1)).
double jacobi_at_one(int p, JacobiParams params);

/**
 * @brief gamma_p^beta = int_{-1}^{1} (J_p^beta)^2 (1-x^2)^beta dx.
 *
 * Closed form 2^{2b+1} Gamma(p+b+1)^2 / ((2p+2b+1) Gamma(p+1) Gamma(p+2b+1)),
 * evaluated with log-Gamma so it stays finite for p in the thousands.
 */
double gamma_p(double beta, int p);

/**
 * @brief gamma_{p,k}^beta = int (d^k J_p^beta)^2 (1-x^2)^{beta+k} dx.
 *
 * Equals gamma_p exactly for k = 0. Throws ParameterError for k > p.
 */
double gamma_pk(double beta, int p, int k);

/// Squared weighted L2 norm of P_p^{(alpha,beta)} for general exponents.
double jacobi_norm_sq(int p, JacobiParams params);

/// Gamma(n+alpha) / (Gamma(n) n^alpha); tends to 1 as n grows.
double gamma_ratio(int n, double alpha);

}  // namespace pfem

#endif  // PFEM_JACOBI_HPP_
