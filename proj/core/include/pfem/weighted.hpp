#ifndef PFEM_WEIGHTED_HPP_
#define PFEM_WEIGHTED_HPP_

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "pfem/series.hpp"

namespace pfem {

/// Edges of the reference square Q = (-1,1)^2, in counter-clockwise order.
/// Bottom and top are parametrised by x, right and left by y.
enum class Edge { kBottom = 0, kRight = 1, kTop = 2, kLeft = 3 };

/**
 * @brief Tensor Jacobi-Fourier coefficients on the reference square:
 * u(x,y) = sum_{i,j <= cutoff} c(i,j) J_i^beta(x) J_j^beta(y).
 */
class TensorCoeffs {
 public:
  TensorCoeffs() = default;
  TensorCoeffs(double beta, int cutoff);
  TensorCoeffs(double beta, Eigen::MatrixXd c);

  double beta() const { return beta_; }
  int cutoff() const { return static_cast<int>(c_.rows()) - 1; }
  const Eigen::MatrixXd& c() const { return c_; }
  Eigen::MatrixXd& c() { return c_; }
  double operator()(int i, int j) const { return c_(i, j); }
  double& operator()(int i, int j) { return c_(i, j); }

  /// d^{dx+dy} u / dx^{dx} dy^{dy} at (x,y).
  double derivative(int dx, int dy, double x, double y) const;
  double value(double x, double y) const { return derivative(0, 0, x, y); }
  Eigen::Vector2d gradient(double x, double y) const;

  /// Zero-padded or truncated copy with the given cutoff.
  TensorCoeffs resized(int cutoff) const;

  /// Exact transform under a symmetry of the square: the result r satisfies
  /// r(x,y) = u(S(x,y)), where S swaps (if `swap`) and then flips signs:
  /// S(x,y) = (sx * a, sy * b) with (a,b) = swap ? (y,x) : (x,y).
  TensorCoeffs transformed(bool swap, int sx, int sy) const;

  TensorCoeffs& operator+=(const TensorCoeffs& o);
  TensorCoeffs& operator-=(const TensorCoeffs& o);
  TensorCoeffs& operator*=(double s);
  friend TensorCoeffs operator+(TensorCoeffs a, const TensorCoeffs& b) { return a += b; }
  friend TensorCoeffs operator-(TensorCoeffs a, const TensorCoeffs& b) { return a -= b; }
  friend TensorCoeffs operator*(double s, TensorCoeffs a) { return a *= s; }

 private:
  double beta_ = 0.0;
  Eigen::MatrixXd c_;
};

/// G(a,b) = d^{dx+dy} u (xs[a], ys[b]), evaluated as a tensor product.
Eigen::MatrixXd evaluate_grid(const TensorCoeffs& u, const std::vector<double>& xs,
                              const std::vector<double>& ys, int dx = 0, int dy = 0);

/// Tensor product f(x) g(y) of two one-dimensional series with equal beta.
TensorCoeffs outer(const JacobiSeries& fx, const JacobiSeries& gy);

/// Scalar function on the reference square, with an optional analytic gradient.
struct ReferenceFunction {
  std::function<double(double, double)> value;
  std::function<Eigen::Vector2d(double, double)> gradient;

  static ReferenceFunction from_coeffs(const TensorCoeffs& u);
};

enum class WeightVariant {
  kPlain,  // derivative d^a carries (1-x^2)^{beta+a_1} (1-y^2)^{beta+a_2}
  kTilde,  // derivative d^a carries (1-x^2)^{beta-a_1} (1-y^2)^{beta-a_2}
};

struct WeightSpec {
  int k = 0;  // Sobolev order, 0 or 1
  double beta = 0.0;
  WeightVariant variant = WeightVariant::kPlain;
};

enum class NormPart { kFull, kSeminorm };

/// Default oversampling for expand(): cutoff + 10 points per direction.
inline int default_expand_points(int cutoff) { return cutoff + 10; }

/**
 * @brief Jacobi-Fourier coefficients c_ij = (gamma_i gamma_j)^{-1} int_Q f J_i J_j W_beta
 * by tensor Gauss-Jacobi quadrature with `points` nodes per direction
 * (`points` < 0 selects default_expand_points). Throws ParameterError when
 * points < cutoff + 1.
 */
TensorCoeffs expand(const std::function<double(double, double)>& f, double beta, int cutoff,
                    int points = -1);

/// Same coefficients from values G(a,b) = f(x_a, x_b) sampled on the nodes of
/// gauss_jacobi_rule(G.rows(), beta). Throws ParameterError when the grid is
/// not square or has fewer than cutoff + 1 rows.
TensorCoeffs expand_grid(const Eigen::MatrixXd& values, double beta, int cutoff);

/// Truncation Pi_p: entries with i > p or j > p set to zero, cutoff kept.
TensorCoeffs project(const TensorCoeffs& u, int p);

/**
 * @brief Weighted norm (or seminorm) of a function given by value/gradient
 * callbacks, by tensor Gauss-Jacobi quadrature whose exponents match each term.
 *
 * k = 1 requires `f.gradient`; tilde k = 1 requires beta > 0.
 */
double weighted_norm(const ReferenceFunction& f, const WeightSpec& spec, int points,
                     NormPart part = NormPart::kFull);

/**
 * Coefficient input. Plain norms use the orthogonality identities
 *   ||u||_0^2 = sum c_ij^2 g_i g_j,  |u|_1^2 = sum c_ij^2 (g_{i,1} g_j + g_i g_{j,1});
 * tilde norms are integrated exactly by quadrature.
 */
double weighted_norm(const TensorCoeffs& u, const WeightSpec& spec,
                     NormPart part = NormPart::kFull);

/// Trace of u on an edge of Q as a 1D series in the edge parameter.
JacobiSeries trace_to_edge(const TensorCoeffs& u, Edge edge);

/// Exact product of two polynomials, re-expanded with the given cutoff
/// (defaults to the sum of the cutoffs).
TensorCoeffs multiply(const TensorCoeffs& a, const TensorCoeffs& b, int cutoff = -1);

/// int P^2 (1-x^2)^beta / (p^2 int P^2 (1-x^2)^{beta+1}),  p = deg P >= 1.
double inverse_ratio_weight_shift(const JacobiSeries& poly, double beta);

/// int P'^2 (1-x^2)^{alpha+1} / (p^2 int P^2 (1-x^2)^alpha),  p = deg P >= 1.
double inverse_ratio_derivative(const JacobiSeries& poly, double alpha);

}  // namespace pfem

#endif  // PFEM_WEIGHTED_HPP_
