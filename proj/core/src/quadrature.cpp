#include "pfem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "pfem/errors.hpp"

namespace pfem {

namespace {

// Recurrence coefficients of the monic Jacobi polynomials: diagonal a_k and
// off-diagonal sqrt(b_k), k >= 1.
void jacobi_matrix(int n, double a, double b, Eigen::VectorXd& diag, Eigen::VectorXd& sub) {
  diag.resize(n);
  sub.resize(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    diag[k] = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    double bk;
    if (k == 1) {
      // (1+a+b) cancels analytically; keeps a+b -> -1 well defined.
      bk = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    } else {
      bk = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    }
    sub[k - 1] = std::sqrt(bk);
  }
}

QuadRule build_rule(int n, JacobiParams params) {
  const double a = params.alpha;
  const double b = params.beta;

  Eigen::VectorXd diag, sub;
  jacobi_matrix(n, a, b, diag, sub);
  std::vector<double> x(n);
  if (n == 1) {
    x[0] = diag[0];
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    for (int i = 0; i < n; ++i) x[i] = solver.eigenvalues()[i];
  }

  // Newton polish on P_n; the eigenvalues are already within a few ulps.
  for (double& xi : x) {
    for (int it = 0; it < 8; ++it) {
      const double f = eval_jacobi(n, params, xi);
      const double df = eval_jacobi_deriv(n, 1, params, xi);
      const double dx = f / df;
      xi -= dx;
      if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(xi))) break;
    }
  }
  std::sort(x.begin(), x.end());

  const double log_c = std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
                       std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0) +
                       (a + b + 1.0) * std::log(2.0);
  const double c = std::exp(log_c);

  QuadRule rule;
  rule.params = params;
  rule.exactness = 2 * n - 1;
  rule.nodes = x;
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double d = eval_jacobi_deriv(n, 1, params, x[i]);
    rule.weights[i] = c / ((1.0 - x[i] * x[i]) * d * d);
  }
  return rule;
}

}  // namespace

QuadRule gauss_jacobi_rule(int n, JacobiParams params) {
  if (n <= 0) throw ParameterError("gauss_jacobi_rule: need n >= 1, got " + std::to_string(n));
  params.validate();

  // Rules are rebuilt for every element and every norm; memoise them.
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double>, QuadRule> cache;
  const auto key = std::make_tuple(n, params.alpha, params.beta);
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  QuadRule rule = build_rule(n, params);
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key, std::move(rule)).first->second;
}

}  // namespace pfem
