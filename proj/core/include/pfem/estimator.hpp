#ifndef PFEM_ESTIMATOR_HPP_
#define PFEM_ESTIMATOR_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pfem/fem.hpp"
#include "pfem/mesh.hpp"
#include "pfem/weighted.hpp"

namespace pfem {

struct EstimatorParams {
  double delta = 0.1;              // beta = 1/2 + delta, 0 < delta < 1/4
  int load_projection_boost = 4;   // extra degrees for the oscillation reference
  bool reverse_normals = false;    // flip every n_l (the report must not change)
  int quadrature_multiplier = 1;   // scales every exact rule (the report must not change)

  double beta() const { return 0.5 + delta; }
  /// Throws ParameterError on an out-of-range field.
  void validate() const;
};

struct EstimatorReport {
  std::vector<double> eta_b;     // per element
  std::vector<double> eta_e;     // per element: sqrt(1/4 sum of eta_l^2 over its interior edges)
  std::vector<double> osc;       // per element: p_K^{-1} ||f - f_p||
  std::vector<double> eta_edge;  // per edge, 0 on the boundary
  std::vector<int> edge_degree;  // per edge: p_l = min of the neighbours
  double eta = 0.0;
  double osc_total = 0.0;

  double eta_k_sq(int k) const { return eta_b[k] * eta_b[k] + eta_e[k] * eta_e[k]; }
};

/// f_p = Pi_p^beta (f o F_K), returned with cutoff p + boost so that the
/// oscillation reference can share the same coefficients. Entries above p are
/// kept; use project() to truncate.
TensorCoeffs project_load(const std::function<double(double, double)>& f, const AffineMap& map,
                          int p, double beta, int boost = 0);

/// Residual estimator for u_N with load f. Throws ParameterError on invalid
/// parameters.
EstimatorReport compute_indicators(const DiscreteSolution& sol,
                                   const std::function<double(double, double)>& f,
                                   const EstimatorParams& params);

struct ErrorMeasures {
  double tilde = 0.0;   // ||u - u_N||_{tilde H^{1,beta}(T)}
  double energy = 0.0;  // ||grad (u - u_N)||_{L2}
  std::vector<double> tilde_element;
};

/// Pulled-back tilde-weighted error with p_K + extra_points Gauss-Jacobi
/// nodes per direction, plus the unweighted energy error.
ErrorMeasures error_surrogate(const DiscreteSolution& sol, const PhysicalFunction& exact,
                              const EstimatorParams& params, int extra_points = 30);

/**
 * Lower bound for the dual error norm: the largest |a(u - u_N, v)| / ||v||
 * with ||.|| the broken H^{1,-beta} norm, over element bubbles r W_beta (r the
 * element residual), jump lifts of each R_l, and `random_count` bubbles or
 * lifts with random polynomial factors drawn from a seeded generator.
 */
double dual_lower_bound(const DiscreteSolution& sol, const PhysicalFunction& exact,
                        const std::function<double(double, double)>& f,
                        const EstimatorParams& params, int random_count = 20,
                        std::uint64_t seed = 20240613, int extra_points = 30);

/// eta / error. nullopt when both are below `tol`; InconsistencyError when
/// only the error is.
std::optional<double> effectivity(double eta, double error, double tol = 1e-10);

/// CSV rows "element,p,eta_b,eta_e,osc" and "edge,p,eta_l" (interior edges),
/// values printed with 17 significant digits.
void write_element_csv(std::ostream& out, const EstimatorReport& report, const DegreeMap& degrees);
void write_edge_csv(std::ostream& out, const EstimatorReport& report, const ParallelogramMesh& mesh);

}  // namespace pfem

#endif  // PFEM_ESTIMATOR_HPP_
