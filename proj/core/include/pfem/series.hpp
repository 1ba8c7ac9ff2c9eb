#ifndef PFEM_SERIES_HPP_
#define PFEM_SERIES_HPP_

#include <functional>
#include <vector>

namespace pfem {

/**
 * @brief One-dimensional expansion sum_i b_i J_i^beta(x) on (-1,1).
 *
 * Used for edge traces, edge polynomials and the boundary decay polynomial.
 */
class JacobiSeries {
 public:
  JacobiSeries() = default;
  JacobiSeries(double beta, std::vector<double> coeffs);

  /// Orthogonal projection of f onto P_degree using `points` Gauss-Jacobi
  /// nodes (exact for polynomial f of degree <= 2*points-1-degree).
  static JacobiSeries from_function(const std::function<double(double)>& f, double beta,
                                    int degree, int points);

  /// Exact conversion of sum_j m_j x^j.
  static JacobiSeries from_monomial(const std::vector<double>& monomial, double beta);

  double beta() const { return beta_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  std::vector<double>& coeffs() { return coeffs_; }

  double operator()(double x) const { return value(x); }
  double value(double x) const;
  double derivative(double x, int order = 1) const;

  /// Monomial coefficients m_j with sum_j m_j x^j equal to this series.
  std::vector<double> to_monomial() const;

  /// ||.||_{H^{0,beta}(I)} from Parseval: sqrt(sum b_i^2 gamma_i^beta).
  double norm() const;

  /// f(-x): coefficients pick up (-1)^i.
  JacobiSeries reflected() const;

 private:
  double beta_ = 0.0;
  std::vector<double> coeffs_;
};

}  // namespace pfem

#endif  // PFEM_SERIES_HPP_
