#include "pfem/weighted.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pfem/errors.hpp"
#include "pfem/jacobi.hpp"
#include "pfem/quadrature.hpp"

namespace pfem {

namespace {

// V(q, i) = d^order J_i^beta (nodes[q]).
Eigen::MatrixXd vandermonde(double beta, int cutoff, const std::vector<double>& nodes,
                            int order = 0) {
  Eigen::MatrixXd v(nodes.size(), cutoff + 1);
  std::vector<double> row(cutoff + 1);
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    if (order == 0) {
      eval_jacobi_all(JacobiParams::symmetric(beta), nodes[q], row);
      for (int i = 0; i <= cutoff; ++i) v(q, i) = row[i];
    } else {
      for (int i = 0; i <= cutoff; ++i) v(q, i) = eval_jacobi_deriv(i, order, beta, nodes[q]);
    }
  }
  return v;
}

void check_same_beta(const TensorCoeffs& a, const TensorCoeffs& b) {
  if (a.beta() != b.beta()) throw ParameterError("TensorCoeffs: mismatched beta");
}

double tensor_quadrature(const QuadRule& rx, const QuadRule& ry,
                         const std::function<double(double, double)>& g) {
  double s = 0.0;
  for (int a = 0; a < rx.size(); ++a) {
    double row = 0.0;
    for (int b = 0; b < ry.size(); ++b) row += ry.weights[b] * g(rx.nodes[a], ry.nodes[b]);
    s += rx.weights[a] * row;
  }
  return s;
}

// Weight exponent attached to a first derivative term.
double derivative_exponent(const WeightSpec& spec) {
  const double e = spec.variant == WeightVariant::kPlain ? spec.beta + 1.0 : spec.beta - 1.0;
  if (!(e > -1.0)) {
    throw IntegrabilityError("weighted_norm: derivative weight exponent " + std::to_string(e) +
                             " is not integrable");
  }
  return e;
}

void check_spec(const WeightSpec& spec) {
  check_weight_exponent(spec.beta);
  if (spec.k != 0 && spec.k != 1) throw ParameterError("weighted_norm: only k = 0, 1 supported");
}

}  // namespace

TensorCoeffs::TensorCoeffs(double beta, int cutoff) : beta_(beta) {
  check_weight_exponent(beta);
  if (cutoff < 0) throw ParameterError("TensorCoeffs: cutoff must be >= 0");
  c_ = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
}

TensorCoeffs::TensorCoeffs(double beta, Eigen::MatrixXd c) : beta_(beta), c_(std::move(c)) {
  check_weight_exponent(beta);
  if (c_.rows() != c_.cols() || c_.rows() == 0) {
    throw ParameterError("TensorCoeffs: coefficient array must be square and non-empty");
  }
  if (!c_.allFinite()) throw ParameterError("TensorCoeffs: non-finite coefficient");
}

double TensorCoeffs::derivative(int dx, int dy, double x, double y) const {
  const int n = cutoff();
  std::vector<double> jx(n + 1), jy(n + 1);
  const auto params = JacobiParams::symmetric(beta_);
  if (dx == 0) {
    eval_jacobi_all(params, x, jx);
  } else {
    for (int i = 0; i <= n; ++i) jx[i] = eval_jacobi_deriv(i, dx, beta_, x);
  }
  if (dy == 0) {
    eval_jacobi_all(params, y, jy);
  } else {
    for (int j = 0; j <= n; ++j) jy[j] = eval_jacobi_deriv(j, dy, beta_, y);
  }
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    double row = 0.0;
    for (int j = 0; j <= n; ++j) row += c_(i, j) * jy[j];
    s += jx[i] * row;
  }
  return s;
}

Eigen::Vector2d TensorCoeffs::gradient(double x, double y) const {
  return {derivative(1, 0, x, y), derivative(0, 1, x, y)};
}

TensorCoeffs TensorCoeffs::resized(int cutoff) const {
  TensorCoeffs r(beta_, cutoff);
  const int m = std::min(cutoff, this->cutoff());
  r.c_.topLeftCorner(m + 1, m + 1) = c_.topLeftCorner(m + 1, m + 1);
  return r;
}

TensorCoeffs TensorCoeffs::transformed(bool swap, int sx, int sy) const {
  const int n = cutoff();
  TensorCoeffs r(beta_, n);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double s = ((sx < 0 && (i % 2)) ? -1.0 : 1.0) * ((sy < 0 && (j % 2)) ? -1.0 : 1.0);
      if (swap) {
        r.c_(j, i) = s * c_(i, j);
      } else {
        r.c_(i, j) = s * c_(i, j);
      }
    }
  }
  return r;
}

TensorCoeffs& TensorCoeffs::operator+=(const TensorCoeffs& o) {
  check_same_beta(*this, o);
  if (o.cutoff() > cutoff()) *this = resized(o.cutoff());
  c_.topLeftCorner(o.c_.rows(), o.c_.cols()) += o.c_;
  return *this;
}

TensorCoeffs& TensorCoeffs::operator-=(const TensorCoeffs& o) {
  check_same_beta(*this, o);
  if (o.cutoff() > cutoff()) *this = resized(o.cutoff());
  c_.topLeftCorner(o.c_.rows(), o.c_.cols()) -= o.c_;
  return *this;
}

TensorCoeffs& TensorCoeffs::operator*=(double s) {
  c_ *= s;
  return *this;
}

Eigen::MatrixXd evaluate_grid(const TensorCoeffs& u, const std::vector<double>& xs,
                              const std::vector<double>& ys, int dx, int dy) {
  const Eigen::MatrixXd vx = vandermonde(u.beta(), u.cutoff(), xs, dx);
  const Eigen::MatrixXd vy = vandermonde(u.beta(), u.cutoff(), ys, dy);
  return vx * u.c() * vy.transpose();
}

TensorCoeffs outer(const JacobiSeries& fx, const JacobiSeries& gy) {
  if (fx.beta() != gy.beta()) throw ParameterError("outer: mismatched beta");
  const int n = std::max(fx.degree(), gy.degree());
  TensorCoeffs r(fx.beta(), std::max(n, 0));
  for (int i = 0; i <= fx.degree(); ++i) {
    for (int j = 0; j <= gy.degree(); ++j) r(i, j) = fx.coeffs()[i] * gy.coeffs()[j];
  }
  return r;
}

ReferenceFunction ReferenceFunction::from_coeffs(const TensorCoeffs& u) {
  return {[u](double x, double y) { return u.value(x, y); },
          [u](double x, double y) { return u.gradient(x, y); }};
}

TensorCoeffs expand(const std::function<double(double, double)>& f, double beta, int cutoff,
                    int points) {
  check_weight_exponent(beta);
  if (cutoff < 0) throw ParameterError("expand: cutoff must be >= 0");
  if (points < 0) points = default_expand_points(cutoff);
  if (points < cutoff + 1) {
    throw ParameterError("expand: " + std::to_string(points) + " points alias cutoff " +
                         std::to_string(cutoff));
  }
  const QuadRule rule = gauss_jacobi_rule(points, beta);
  Eigen::MatrixXd values(points, points);
  for (int a = 0; a < points; ++a) {
    for (int b = 0; b < points; ++b) values(a, b) = f(rule.nodes[a], rule.nodes[b]);
  }
  return expand_grid(values, beta, cutoff);
}

TensorCoeffs expand_grid(const Eigen::MatrixXd& values, double beta, int cutoff) {
  check_weight_exponent(beta);
  const int points = static_cast<int>(values.rows());
  if (values.cols() != points || points < cutoff + 1 || cutoff < 0) {
    throw ParameterError("expand_grid: need a square grid with at least cutoff + 1 rows");
  }
  const QuadRule rule = gauss_jacobi_rule(points, beta);
  const Eigen::MatrixXd v = vandermonde(beta, cutoff, rule.nodes);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), points);
  Eigen::MatrixXd c = v.transpose() * w.asDiagonal() * values * w.asDiagonal() * v;
  for (int i = 0; i <= cutoff; ++i) {
    const double gi = gamma_p(beta, i);
    c.row(i) /= gi;
    c.col(i) /= gi;
  }
  return TensorCoeffs(beta, std::move(c));
}

TensorCoeffs project(const TensorCoeffs& u, int p) {
  if (p < 0 || p > u.cutoff()) {
    throw ParameterError("project: degree " + std::to_string(p) + " outside [0, cutoff=" +
                         std::to_string(u.cutoff()) + "]");
  }
  TensorCoeffs r = u;
  const int n = u.cutoff();
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i > p || j > p) r(i, j) = 0.0;
    }
  }
  return r;
}

double weighted_norm(const ReferenceFunction& f, const WeightSpec& spec, int points,
                     NormPart part) {
  check_spec(spec);
  if (points < 1) throw ParameterError("weighted_norm: need at least one quadrature point");
  double total = 0.0;
  const QuadRule r0 = gauss_jacobi_rule(points, spec.beta);
  if (part == NormPart::kFull || spec.k == 0) {
    if (!f.value) throw ParameterError("weighted_norm: value callback missing");
    total += tensor_quadrature(r0, r0, [&](double x, double y) {
      const double v = f.value(x, y);
      return v * v;
    });
  }
  if (spec.k == 1) {
    if (!f.gradient) {
      throw ParameterError("weighted_norm: k = 1 needs an analytic gradient callback");
    }
    const QuadRule r1 = gauss_jacobi_rule(points, derivative_exponent(spec));
    total += tensor_quadrature(r1, r0, [&](double x, double y) {
      const double g = f.gradient(x, y)[0];
      return g * g;
    });
    total += tensor_quadrature(r0, r1, [&](double x, double y) {
      const double g = f.gradient(x, y)[1];
      return g * g;
    });
  }
  return std::sqrt(total);
}

double weighted_norm(const TensorCoeffs& u, const WeightSpec& spec, NormPart part) {
  check_spec(spec);
  if (spec.variant == WeightVariant::kTilde || spec.beta != u.beta()) {
    // No orthogonality to exploit; the integrand is still a polynomial of
    // degree <= 2*cutoff per variable, so cutoff+2 nodes integrate it exactly.
    return weighted_norm(ReferenceFunction::from_coeffs(u), spec, u.cutoff() + 2, part);
  }
  const int n = u.cutoff();
  const double b = spec.beta;
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double gi = gamma_p(b, i);
    const double gi1 = i >= 1 ? gamma_pk(b, i, 1) : 0.0;
    for (int j = 0; j <= n; ++j) {
      const double c2 = u(i, j) * u(i, j);
      if (c2 == 0.0) continue;
      const double gj = gamma_p(b, j);
      if (part == NormPart::kFull || spec.k == 0) total += c2 * gi * gj;
      if (spec.k == 1) {
        const double gj1 = j >= 1 ? gamma_pk(b, j, 1) : 0.0;
        total += c2 * (gi1 * gj + gi * gj1);
      }
    }
  }
  return std::sqrt(total);
}

JacobiSeries trace_to_edge(const TensorCoeffs& u, Edge edge) {
  const int n = u.cutoff();
  const double b = u.beta();
  const auto params = JacobiParams::symmetric(b);
  const double side = (edge == Edge::kBottom || edge == Edge::kLeft) ? -1.0 : 1.0;
  std::vector<double> j(n + 1);
  eval_jacobi_all(params, side, j);
  std::vector<double> out(n + 1, 0.0);
  const bool along_x = (edge == Edge::kBottom || edge == Edge::kTop);
  for (int i = 0; i <= n; ++i) {
    for (int k = 0; k <= n; ++k) {
      if (along_x) {
        out[i] += u(i, k) * j[k];  // y frozen at +-1
      } else {
        out[i] += u(k, i) * j[k];  // x frozen at +-1
      }
    }
  }
  return JacobiSeries(b, std::move(out));
}

TensorCoeffs multiply(const TensorCoeffs& a, const TensorCoeffs& b, int cutoff) {
  check_same_beta(a, b);
  if (cutoff < 0) cutoff = a.cutoff() + b.cutoff();
  return expand([&](double x, double y) { return a.value(x, y) * b.value(x, y); }, a.beta(),
                cutoff, cutoff + 1);
}

double inverse_ratio_weight_shift(const JacobiSeries& poly, double beta) {
  const int p = poly.degree();
  if (p < 1) throw ParameterError("inverse_ratio_weight_shift: degree must be >= 1");
  const QuadRule lo = gauss_jacobi_rule(p + 1, beta);
  const QuadRule hi = gauss_jacobi_rule(p + 1, beta + 1.0);
  const double num = lo.integrate([&](double x) { return poly(x) * poly(x); });
  const double den = hi.integrate([&](double x) { return poly(x) * poly(x); });
  return num / (static_cast<double>(p) * p * den);
}

double inverse_ratio_derivative(const JacobiSeries& poly, double alpha) {
  const int p = poly.degree();
  if (p < 1) throw ParameterError("inverse_ratio_derivative: degree must be >= 1");
  const QuadRule lo = gauss_jacobi_rule(p + 1, alpha);
  const QuadRule hi = gauss_jacobi_rule(p + 1, alpha + 1.0);
  const double num = hi.integrate([&](double x) {
    const double d = poly.derivative(x);
    return d * d;
  });
  const double den = lo.integrate([&](double x) { return poly(x) * poly(x); });
  return num / (static_cast<double>(p) * p * den);
}

}  // namespace pfem
