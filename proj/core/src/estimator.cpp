#include "pfem/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>

#include <Eigen/LU>

#include "pfem/errors.hpp"
#include "pfem/interpolation.hpp"
#include "pfem/jacobi.hpp"
#include "pfem/quadrature.hpp"

namespace pfem {

namespace {

double weighted_sum(const QuadRule& rx, const QuadRule& ry, const Eigen::MatrixXd& g) {
  const Eigen::VectorXd wx = Eigen::Map<const Eigen::VectorXd>(rx.weights.data(), rx.size());
  const Eigen::VectorXd wy = Eigen::Map<const Eigen::VectorXd>(ry.weights.data(), ry.size());
  return wx.dot(g * wy);
}

// Reference-space error grids e = u o F - u_N and its reference gradient on
// the tensor grid xs x ys of element k.
struct ErrorGrid {
  Eigen::MatrixXd e, ex, ey;
};

ErrorGrid error_grid(const DiscreteSolution& sol, const PhysicalFunction& exact, int k,
                     const std::vector<double>& xs, const std::vector<double>& ys,
                     bool need_value) {
  const AffineMap map = sol.mesh().geometry(k);
  ErrorGrid g;
  g.ex = -sol.reference_grid(k, 1, 0, xs, ys);
  g.ey = -sol.reference_grid(k, 0, 1, xs, ys);
  if (need_value) g.e = -sol.reference_grid(k, 0, 0, xs, ys);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const Point p = map(xs[i], ys[j]);
      const Eigen::Vector2d grad = map.matrix().transpose() * exact.gradient(p.x(), p.y());
      g.ex(i, j) += grad.x();
      g.ey(i, j) += grad.y();
      if (need_value) g.e(i, j) += exact.value(p.x(), p.y());
    }
  }
  return g;
}

Eigen::MatrixXd laplacian_grid(const DiscreteSolution& sol, int k, const std::vector<double>& xs,
                               const std::vector<double>& ys) {
  const Eigen::Matrix2d& a = sol.mesh().geometry(k).laplacian_coeffs();
  return a(0, 0) * sol.reference_grid(k, 2, 0, xs, ys) +
         (a(0, 1) + a(1, 0)) * sol.reference_grid(k, 1, 1, xs, ys) +
         a(1, 1) * sol.reference_grid(k, 0, 2, xs, ys);
}

// R_l(t) = (grad u_in - grad u_out) . n at global edge parameter t.
double normal_jump(const DiscreteSolution& sol, int e, double t, bool reverse) {
  const ParallelogramMesh& mesh = sol.mesh();
  const MeshEdge& edge = mesh.edge(e);
  const Point a = mesh.edge_reference_point(edge.in, e, t);
  const Point b = mesh.edge_reference_point(edge.out, e, t);
  const Eigen::Vector2d jump = sol.gradient(edge.in, a.x(), a.y()) - sol.gradient(edge.out, b.x(), b.y());
  return (reverse ? -edge.normal : edge.normal).dot(jump);
}

int max_edge_degree(const DiscreteSolution& sol, int e) {
  const MeshEdge& edge = sol.mesh().edge(e);
  return std::max(sol.degrees()[edge.in], sol.degrees()[edge.out]);
}

// f_p + Laplace u_N on element k as a polynomial of degree p.
TensorCoeffs element_residual(const DiscreteSolution& sol,
                              const std::function<double(double, double)>& f, int k, double beta) {
  const int p = sol.degrees()[k];
  const AffineMap map = sol.mesh().geometry(k);
  const TensorCoeffs fp = project(project_load(f, map, p, beta), p);
  const QuadRule rule = gauss_jacobi_rule(p + 1, beta);
  const Eigen::MatrixXd values =
      evaluate_grid(fp, rule.nodes, rule.nodes) + laplacian_grid(sol, k, rule.nodes, rule.nodes);
  return expand_grid(values, beta, p);
}

struct Pairing {
  double a = 0.0;     // a(e, v)
  double norm = 0.0;  // ||v||_{H^{1,-beta}}
};

// v = r (1-x^2)^beta (1-y^2)^beta on element k, zero elsewhere.
Pairing bubble_pairing(const DiscreteSolution& sol, const PhysicalFunction& exact, int k,
                       const TensorCoeffs& r, double beta, int extra) {
  const int q = std::max(sol.degrees()[k], r.cutoff()) + extra;
  const QuadRule rb = gauss_jacobi_rule(q, beta);
  const QuadRule rb1 = gauss_jacobi_rule(q, beta - 1.0);
  const AffineMap map = sol.mesh().geometry(k);
  const Eigen::Matrix2d& a = map.laplacian_coeffs();

  Pairing out;
  const Eigen::MatrixXd r0 = evaluate_grid(r, rb.nodes, rb.nodes);
  double norm2 = weighted_sum(rb, rb, r0.cwiseProduct(r0));

  // x-derivative part on (rb1 x rb): d_x v = (1-x^2)^{beta-1} (1-y^2)^beta H1.
  {
    const Eigen::MatrixXd rv = evaluate_grid(r, rb1.nodes, rb.nodes);
    const Eigen::MatrixXd rx = evaluate_grid(r, rb1.nodes, rb.nodes, 1, 0);
    Eigen::MatrixXd h(rv.rows(), rv.cols());
    for (int i = 0; i < h.rows(); ++i) {
      const double x = rb1.nodes[i];
      h.row(i) = rx.row(i) * (1.0 - x * x) - 2.0 * beta * x * rv.row(i);
    }
    const ErrorGrid eg = error_grid(sol, exact, k, rb1.nodes, rb.nodes, false);
    norm2 += weighted_sum(rb1, rb, h.cwiseProduct(h));
    out.a += weighted_sum(rb1, rb, (a(0, 0) * eg.ex + a(0, 1) * eg.ey).cwiseProduct(h));
  }
  {
    const Eigen::MatrixXd rv = evaluate_grid(r, rb.nodes, rb1.nodes);
    const Eigen::MatrixXd ry = evaluate_grid(r, rb.nodes, rb1.nodes, 0, 1);
    Eigen::MatrixXd h(rv.rows(), rv.cols());
    for (int j = 0; j < h.cols(); ++j) {
      const double y = rb1.nodes[j];
      h.col(j) = ry.col(j) * (1.0 - y * y) - 2.0 * beta * y * rv.col(j);
    }
    const ErrorGrid eg = error_grid(sol, exact, k, rb.nodes, rb1.nodes, false);
    norm2 += weighted_sum(rb, rb1, h.cwiseProduct(h));
    out.a += weighted_sum(rb, rb1, (a(1, 0) * eg.ex + a(1, 1) * eg.ey).cwiseProduct(h));
  }
  out.a *= std::abs(map.det());
  out.norm = std::sqrt(norm2);
  return out;
}

Pairing lift_pairing(const DiscreteSolution& sol, const PhysicalFunction& exact, int e,
                     const JacobiSeries& poly, double beta, int extra) {
  const ParallelogramMesh& mesh = sol.mesh();
  const MeshEdge& edge = mesh.edge(e);
  const int pl = std::min(sol.degrees()[edge.in], sol.degrees()[edge.out]);
  const JumpLift lift(mesh, e, poly, beta, pl);
  Pairing out;
  for (int k : lift.elements()) {
    const AffineMap map = mesh.geometry(k);
    auto grad_e = [&](double x, double y) -> Eigen::Vector2d {
      const Point p = map(x, y);
      return map.matrix().transpose() * exact.gradient(p.x(), p.y()) -
             sol.reference_gradient(k, x, y);
    };
    out.a += lift.energy_product(k, grad_e, sol.degrees()[k] + extra);
  }
  out.norm = lift.norm_minus_beta();
  return out;
}

}  // namespace

void EstimatorParams::validate() const {
  if (!(delta > 0.0 && delta < 0.25)) {
    throw ParameterError("estimator: delta must lie in (0, 1/4), got " + std::to_string(delta));
  }
  if (load_projection_boost < 1) throw ParameterError("estimator: load projection boost must be >= 1");
  if (quadrature_multiplier < 1) throw ParameterError("estimator: quadrature multiplier must be >= 1");
}

TensorCoeffs project_load(const std::function<double(double, double)>& f, const AffineMap& map,
                          int p, double beta, int boost) {
  if (p < 0 || boost < 0) throw ParameterError("project_load: negative degree");
  return expand(
      [&](double x, double y) {
        const Point q = map(x, y);
        return f(q.x(), q.y());
      },
      beta, p + boost);
}

EstimatorReport compute_indicators(const DiscreteSolution& sol,
                                   const std::function<double(double, double)>& f,
                                   const EstimatorParams& params) {
  params.validate();
  const ParallelogramMesh& mesh = sol.mesh();
  const DegreeMap& degrees = sol.degrees();
  if (degrees.size() != mesh.num_elements()) {
    throw ParameterError("compute_indicators: solution does not match the mesh");
  }
  const double beta = params.beta();
  const int mult = params.quadrature_multiplier;
  const int boost = params.load_projection_boost;
  const int ne = mesh.num_elements();

  EstimatorReport rep;
  rep.eta_b.assign(ne, 0.0);
  rep.eta_e.assign(ne, 0.0);
  rep.osc.assign(ne, 0.0);
  rep.eta_edge.assign(mesh.num_edges(), 0.0);
  rep.edge_degree.assign(mesh.num_edges(), 0);

  for (int k = 0; k < ne; ++k) {
    const int p = degrees[k];
    const AffineMap map = mesh.geometry(k);
    const TensorCoeffs fn = project_load(f, map, p, beta, boost);
    const int n = fn.cutoff();
    double diff2 = 0.0, tail2 = 0.0;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const int m = std::max(i, j);
        if (m <= p) continue;
        const double c2 = fn(i, j) * fn(i, j) * gamma_p(beta, i) * gamma_p(beta, j);
        diff2 += c2;
        if (m == n) tail2 += c2;
      }
    }
    rep.osc[k] = (std::sqrt(diff2) + std::sqrt(tail2)) / p;

    const TensorCoeffs fp = project(fn, p);
    const QuadRule rule = gauss_jacobi_rule((p + 2) * mult, beta);
    const Eigen::MatrixXd r =
        evaluate_grid(fp, rule.nodes, rule.nodes) + laplacian_grid(sol, k, rule.nodes, rule.nodes);
    rep.eta_b[k] = std::sqrt(weighted_sum(rule, rule, r.cwiseProduct(r))) / p;
  }

  std::vector<double> edge_sq(ne, 0.0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const MeshEdge& edge = mesh.edge(e);
    if (edge.boundary()) {
      rep.edge_degree[e] = degrees[edge.in];
      continue;
    }
    const int pl = std::min(degrees[edge.in], degrees[edge.out]);
    rep.edge_degree[e] = pl;
    const QuadRule rule = gauss_jacobi_rule((max_edge_degree(sol, e) + 1) * mult, beta);
    const double r2 = rule.integrate([&](double t) {
      const double r = normal_jump(sol, e, t, params.reverse_normals);
      return r * r;
    });
    const double eta2 = r2 / pl;
    rep.eta_edge[e] = std::sqrt(eta2);
    edge_sq[edge.in] += 0.25 * eta2;
    edge_sq[edge.out] += 0.25 * eta2;
  }

  double eta2 = 0.0, osc2 = 0.0;
  for (int k = 0; k < ne; ++k) {
    rep.eta_e[k] = std::sqrt(edge_sq[k]);
    eta2 += rep.eta_b[k] * rep.eta_b[k] + edge_sq[k];
    osc2 += rep.osc[k] * rep.osc[k];
  }
  rep.eta = std::sqrt(eta2);
  rep.osc_total = std::sqrt(osc2);
  return rep;
}

ErrorMeasures error_surrogate(const DiscreteSolution& sol, const PhysicalFunction& exact,
                              const EstimatorParams& params, int extra_points) {
  params.validate();
  if (!exact.value || !exact.gradient) {
    throw ParameterError("error_surrogate: exact solution needs value and gradient");
  }
  const double beta = params.beta();
  const ParallelogramMesh& mesh = sol.mesh();
  ErrorMeasures out;
  out.tilde_element.assign(mesh.num_elements(), 0.0);
  double tilde2 = 0.0, energy2 = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const int q = sol.degrees()[k] + extra_points;
    const QuadRule rb = gauss_jacobi_rule(q, beta);
    const QuadRule rb1 = gauss_jacobi_rule(q, beta - 1.0);
    const QuadRule rl = gauss_legendre_rule(q);

    const ErrorGrid g0 = error_grid(sol, exact, k, rb.nodes, rb.nodes, true);
    const ErrorGrid gx = error_grid(sol, exact, k, rb1.nodes, rb.nodes, false);
    const ErrorGrid gy = error_grid(sol, exact, k, rb.nodes, rb1.nodes, false);
    const double t2 = weighted_sum(rb, rb, g0.e.cwiseProduct(g0.e)) +
                      weighted_sum(rb1, rb, gx.ex.cwiseProduct(gx.ex)) +
                      weighted_sum(rb, rb1, gy.ey.cwiseProduct(gy.ey));
    out.tilde_element[k] = std::sqrt(t2);
    tilde2 += t2;

    const AffineMap map = mesh.geometry(k);
    const Eigen::Matrix2d& a = map.laplacian_coeffs();
    const ErrorGrid gl = error_grid(sol, exact, k, rl.nodes, rl.nodes, false);
    const Eigen::MatrixXd dens = a(0, 0) * gl.ex.cwiseProduct(gl.ex) +
                                 (a(0, 1) + a(1, 0)) * gl.ex.cwiseProduct(gl.ey) +
                                 a(1, 1) * gl.ey.cwiseProduct(gl.ey);
    energy2 += std::abs(map.det()) * weighted_sum(rl, rl, dens);
  }
  out.tilde = std::sqrt(tilde2);
  out.energy = std::sqrt(std::max(energy2, 0.0));
  return out;
}

double dual_lower_bound(const DiscreteSolution& sol, const PhysicalFunction& exact,
                        const std::function<double(double, double)>& f,
                        const EstimatorParams& params, int random_count, std::uint64_t seed,
                        int extra_points) {
  params.validate();
  const double beta = params.beta();
  const ParallelogramMesh& mesh = sol.mesh();
  double best = 0.0;
  auto consider = [&](const Pairing& pr) {
    if (pr.norm > 0.0) best = std::max(best, std::abs(pr.a) / pr.norm);
  };

  std::vector<int> interior;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.edge(e).boundary()) interior.push_back(e);
  }

  for (int k = 0; k < mesh.num_elements(); ++k) {
    consider(bubble_pairing(sol, exact, k, element_residual(sol, f, k, beta), beta, extra_points));
  }
  for (int e : interior) {
    const int pm = max_edge_degree(sol, e);
    const JacobiSeries jump = JacobiSeries::from_function(
        [&](double t) { return normal_jump(sol, e, t, false); }, beta, pm - 1, pm);
    consider(lift_pairing(sol, exact, e, jump, beta, extra_points));
  }

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  for (int i = 0; i < random_count; ++i) {
    if (i % 2 == 0 || interior.empty()) {
      const int k = static_cast<int>(gen() % mesh.num_elements());
      const int p = sol.degrees()[k];
      TensorCoeffs r(beta, p);
      for (int a = 0; a <= p; ++a) {
        for (int b = 0; b <= p; ++b) r(a, b) = normal(gen);
      }
      consider(bubble_pairing(sol, exact, k, r, beta, extra_points));
    } else {
      const int e = interior[gen() % interior.size()];
      const MeshEdge& edge = mesh.edge(e);
      const int pl = std::min(sol.degrees()[edge.in], sol.degrees()[edge.out]);
      std::vector<double> c(pl + 1);
      for (double& v : c) v = normal(gen);
      consider(lift_pairing(sol, exact, e, JacobiSeries(beta, std::move(c)), beta, extra_points));
    }
  }
  return best;
}

std::optional<double> effectivity(double eta, double error, double tol) {
  if (error <= tol) {
    if (eta <= tol) return std::nullopt;
    throw InconsistencyError("estimator " + std::to_string(eta) +
                             " is non-zero while the error vanishes");
  }
  return eta / error;
}

void write_element_csv(std::ostream& out, const EstimatorReport& report, const DegreeMap& degrees) {
  out << "element,p,eta_b,eta_e,osc\n" << std::setprecision(17);
  for (std::size_t k = 0; k < report.eta_b.size(); ++k) {
    out << k << ',' << degrees[static_cast<int>(k)] << ',' << report.eta_b[k] << ','
        << report.eta_e[k] << ',' << report.osc[k] << '\n';
  }
}

void write_edge_csv(std::ostream& out, const EstimatorReport& report,
                    const ParallelogramMesh& mesh) {
  out << "edge,p,eta_l\n" << std::setprecision(17);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edge(e).boundary()) continue;
    out << e << ',' << report.edge_degree[e] << ',' << report.eta_edge[e] << '\n';
  }
}

}  // namespace pfem
