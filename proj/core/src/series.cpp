#include "pfem/series.hpp"

#include <cmath>

#include "pfem/errors.hpp"
#include "pfem/jacobi.hpp"
#include "pfem/quadrature.hpp"

namespace pfem {

JacobiSeries::JacobiSeries(double beta, std::vector<double> coeffs)
    : beta_(beta), coeffs_(std::move(coeffs)) {
  check_weight_exponent(beta_);
}

JacobiSeries JacobiSeries::from_function(const std::function<double(double)>& f, double beta,
                                         int degree, int points) {
  if (degree < 0) throw ParameterError("JacobiSeries: degree must be >= 0");
  if (points < degree + 1) throw ParameterError("JacobiSeries: need points >= degree + 1");
  const QuadRule rule = gauss_jacobi_rule(points, beta);
  std::vector<double> c(degree + 1, 0.0);
  std::vector<double> j(degree + 1);
  for (int q = 0; q < rule.size(); ++q) {
    const double w = rule.weights[q] * f(rule.nodes[q]);
    eval_jacobi_all(JacobiParams::symmetric(beta), rule.nodes[q], j);
    for (int i = 0; i <= degree; ++i) c[i] += w * j[i];
  }
  for (int i = 0; i <= degree; ++i) c[i] /= gamma_p(beta, i);
  return JacobiSeries(beta, std::move(c));
}

JacobiSeries JacobiSeries::from_monomial(const std::vector<double>& monomial, double beta) {
  const int degree = monomial.empty() ? 0 : static_cast<int>(monomial.size()) - 1;
  auto horner = [&](double x) {
    double s = 0.0;
    for (auto it = monomial.rbegin(); it != monomial.rend(); ++it) s = s * x + *it;
    return s;
  };
  return from_function(horner, beta, degree, degree + 1);
}

double JacobiSeries::value(double x) const {
  if (coeffs_.empty()) return 0.0;
  std::vector<double> j(coeffs_.size());
  eval_jacobi_all(JacobiParams::symmetric(beta_), x, j);
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) s += coeffs_[i] * j[i];
  return s;
}

double JacobiSeries::derivative(double x, int order) const {
  if (order == 0) return value(x);
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] != 0.0) s += coeffs_[i] * eval_jacobi_deriv(static_cast<int>(i), order, beta_, x);
  }
  return s;
}

std::vector<double> JacobiSeries::to_monomial() const {
  const int n = static_cast<int>(coeffs_.size());
  std::vector<double> out(std::max(n, 1), 0.0);
  if (n == 0) return out;
  const double a = beta_;
  const double b = beta_;
  std::vector<double> prev{1.0};
  std::vector<double> cur{(a + 1.0) - 0.5 * (a + b + 2.0), 0.5 * (a + b + 2.0)};
  out[0] += coeffs_[0];
  if (n > 1) {
    out[0] += coeffs_[1] * cur[0];
    out[1] += coeffs_[1] * cur[1];
  }
  for (int i = 2; i < n; ++i) {
    const double s = 2.0 * i + a + b;
    const double c1 = 2.0 * i * (i + a + b) * (s - 2.0);
    const double lin = (s - 1.0) * s * (s - 2.0);
    const double con = (s - 1.0) * (a * a - b * b);
    const double c3 = 2.0 * (i + a - 1.0) * (i + b - 1.0) * s;
    std::vector<double> next(i + 1, 0.0);
    for (std::size_t k = 0; k < cur.size(); ++k) {
      next[k + 1] += lin * cur[k];
      next[k] += con * cur[k];
    }
    for (std::size_t k = 0; k < prev.size(); ++k) next[k] -= c3 * prev[k];
    for (double& v : next) v /= c1;
    for (int k = 0; k <= i; ++k) out[k] += coeffs_[i] * next[k];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

double JacobiSeries::norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    s += coeffs_[i] * coeffs_[i] * gamma_p(beta_, static_cast<int>(i));
  }
  return std::sqrt(s);
}

JacobiSeries JacobiSeries::reflected() const {
  std::vector<double> c = coeffs_;
  for (std::size_t i = 1; i < c.size(); i += 2) c[i] = -c[i];
  return JacobiSeries(beta_, std::move(c));
}

}  // namespace pfem
