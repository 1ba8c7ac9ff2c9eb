#include "pfem/jacobi.hpp"

#include <cmath>
#include <string>

#include "pfem/errors.hpp"

namespace pfem {

namespace {

void check_degree(int p) {
  if (p < 0) throw ParameterError("jacobi: degree must be >= 0, got " + std::to_string(p));
}

// log[(2p+a+b+1) Gamma(p+a+b+1)]; for p = 0 the product collapses to
// Gamma(a+b+2), which avoids Gamma at a non-positive argument when a+b <= -1.
double log_norm_denominator(int p, double a, double b) {
  if (p == 0) return std::lgamma(a + b + 2.0);
  return std::log(2.0 * p + a + b + 1.0) + std::lgamma(p + a + b + 1.0);
}

}  // namespace

void JacobiParams::validate() const {
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw ParameterError("jacobi: exponents must exceed -1 (alpha=" + std::to_string(alpha) +
                         ", beta=" + std::to_string(beta) + ")");
  }
}

void check_weight_exponent(double beta) {
  if (!(beta > -1.0)) {
    throw ParameterError("weight exponent must exceed -1, got " + std::to_string(beta));
  }
}

void eval_jacobi_all(JacobiParams params, double x, std::span<double> out) {
  params.validate();
  if (out.empty()) return;
  const double a = params.alpha;
  const double b = params.beta;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
  for (std::size_t i = 2; i < out.size(); ++i) {
    const double n = static_cast<double>(i);
    const double s = 2.0 * n + a + b;
    const double c1 = 2.0 * n * (n + a + b) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
    const double c3 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s;
    out[i] = (c2 * out[i - 1] - c3 * out[i - 2]) / c1;
  }
}

double eval_jacobi(int p, JacobiParams params, double x) {
  check_degree(p);
  params.validate();
  if (p == 0) return 1.0;
  const double a = params.alpha;
  const double b = params.beta;
  double prev = 1.0;
  double cur = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
  for (int i = 2; i <= p; ++i) {
    const double n = static_cast<double>(i);
    const double s = 2.0 * n + a + b;
    const double c1 = 2.0 * n * (n + a + b) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
    const double c3 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s;
    const double next = (c2 * cur - c3 * prev) / c1;
    prev = cur;
    cur = next;
  }
  return cur;
}

double eval_jacobi_deriv(int p, int k, JacobiParams params, double x) {
  check_degree(p);
  params.validate();
  if (k < 0) throw ParameterError("jacobi: derivative order must be >= 0");
  if (k == 0) return eval_jacobi(p, params, x);
  if (k > p) return 0.0;
  const double s = p + params.alpha + params.beta;
  const double log_factor =
      std::lgamma(s + k + 1.0) - std::lgamma(s + 1.0) - k * std::log(2.0);
  return std::exp(log_factor) *
         eval_jacobi(p - k, {params.alpha + k, params.beta + k}, x);
}

double eval_jacobi_deriv(int p, int k, double beta, double x) {
  return eval_jacobi_deriv(p, k, JacobiParams::symmetric(beta), x);
}

double jacobi_at_one(int p, JacobiParams params) {
  check_degree(p);
  params.validate();
  return std::exp(std::lgamma(p + params.alpha + 1.0) - std::lgamma(p + 1.0) -
                  std::lgamma(params.alpha + 1.0));
}

double jacobi_norm_sq(int p, JacobiParams params) {
  check_degree(p);
  params.validate();
  const double a = params.alpha;
  const double b = params.beta;
  const double log_num = (a + b + 1.0) * std::log(2.0) + std::lgamma(p + a + 1.0) +
                         std::lgamma(p + b + 1.0);
  const double log_den = log_norm_denominator(p, a, b) + std::lgamma(p + 1.0);
  return std::exp(log_num - log_den);
}

double gamma_p(double beta, int p) {
  check_weight_exponent(beta);
  check_degree(p);
  const double log_num = (2.0 * beta + 1.0) * std::log(2.0) + 2.0 * std::lgamma(p + beta + 1.0);
  const double log_den = log_norm_denominator(p, beta, beta) + std::lgamma(p + 1.0);
  return std::exp(log_num - log_den);
}

double gamma_pk(double beta, int p, int k) {
  check_weight_exponent(beta);
  check_degree(p);
  if (k < 0 || k > p) {
    throw ParameterError("gamma_pk: need 0 <= k <= p (p=" + std::to_string(p) +
                         ", k=" + std::to_string(k) + ")");
  }
  if (k == 0) return gamma_p(beta, p);
  // k >= 1 forces p >= 1, so every Gamma argument below is positive.
  const double log_num = (2.0 * beta + 1.0) * std::log(2.0) +
                         std::lgamma(p + 2.0 * beta + k + 1.0) +
                         2.0 * std::lgamma(p + beta + 1.0);
  const double log_den = std::log(2.0 * p + 2.0 * beta + 1.0) + std::lgamma(p + 1.0 - k) +
                         2.0 * std::lgamma(p + 2.0 * beta + 1.0);
  return std::exp(log_num - log_den);
}

double gamma_ratio(int n, double alpha) {
  if (n < 1) throw ParameterError("gamma_ratio: n must be >= 1");
  if (!(n + alpha > 0.0)) throw ParameterError("gamma_ratio: n + alpha must be positive");
  if (alpha == 0.0) return 1.0;
  const double nd = static_cast<double>(n);
  if (alpha == std::floor(alpha) && alpha > 0.0 && alpha <= 16.0) {
    // Gamma(n+m)/Gamma(n) = n (n+1) ... (n+m-1); exact for m = 1.
    double r = 1.0;
    for (int j = 0; j < static_cast<int>(alpha); ++j) r *= (nd + j) / nd;
    return r;
  }
  return std::exp(std::lgamma(nd + alpha) - std::lgamma(nd) - alpha * std::log(nd));
}

}  // namespace pfem
