#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pfem/errors.hpp"
#include "pfem/estimator.hpp"
#include "pfem/jacobi.hpp"
#include "pfem/problems.hpp"

namespace {

using pfem::DegreeMap;
using pfem::DiscreteSolution;
using pfem::EstimatorParams;
using pfem::EstimatorReport;
using pfem::FESpace;
using pfem::ParallelogramMesh;

struct Solved {
  std::unique_ptr<ParallelogramMesh> mesh;
  std::shared_ptr<const FESpace> space;
  std::unique_ptr<DiscreteSolution> sol;
};

Solved solve_on(ParallelogramMesh mesh, const DegreeMap& d,
                const std::function<double(double, double)>& f) {
  Solved s;
  s.mesh = std::make_unique<ParallelogramMesh>(std::move(mesh));
  s.space = std::make_shared<const FESpace>(*s.mesh, d);
  s.sol = std::make_unique<DiscreteSolution>(pfem::solve_poisson(s.space, f));
  return s;
}

void expect_reports_equal(const EstimatorReport& a, const EstimatorReport& b, double rel) {
  ASSERT_EQ(a.eta_b.size(), b.eta_b.size());
  for (std::size_t k = 0; k < a.eta_b.size(); ++k) {
    EXPECT_NEAR(a.eta_b[k], b.eta_b[k], rel * std::max(a.eta_b[k], 1e-300));
    EXPECT_NEAR(a.eta_e[k], b.eta_e[k], rel * std::max(a.eta_e[k], 1e-300));
    EXPECT_EQ(a.osc[k], b.osc[k]);
  }
  for (std::size_t e = 0; e < a.eta_edge.size(); ++e) {
    EXPECT_NEAR(a.eta_edge[e], b.eta_edge[e], rel * std::max(a.eta_edge[e], 1e-300));
  }
  EXPECT_NEAR(a.eta, b.eta, rel * a.eta);
}

TEST(ProjectLoad, ReproducesPolynomials) {
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 2, 0, 1, 2, 1);
  const auto f = [](double x, double y) { return 1 + x * y - 2 * x * x * x + y * y; };
  const pfem::AffineMap map = m.geometry(1);
  const pfem::TensorCoeffs fp = pfem::project(pfem::project_load(f, map, 3, 0.6), 3);
  for (double x : {-0.8, 0.1, 1.0}) {
    for (double y : {-1.0, 0.4}) {
      const pfem::Point q = map(x, y);
      EXPECT_NEAR(fp.value(x, y), f(q.x(), q.y()), 1e-11);
    }
  }
  const pfem::TensorCoeffs z = pfem::project_load([](double, double) { return 0.0; }, map, 4, 0.6, 2);
  EXPECT_EQ(z.cutoff(), 6);
  EXPECT_EQ(z.c().cwiseAbs().maxCoeff(), 0.0);
}

TEST(ProjectLoad, ErrorDecaysForExponential) {
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 1, 0, 1, 1, 1);
  const auto f = [](double x, double y) { return std::exp(x + y); };
  const pfem::TensorCoeffs ref = pfem::project_load(f, m.geometry(0), 30, 0.6);
  double prev = 1e300;
  for (int p = 0; p <= 16; ++p) {
    const double err = pfem::weighted_norm(ref - pfem::project(ref, p), {0, 0.6, pfem::WeightVariant::kPlain});
    EXPECT_LE(err, prev + 1e-12);
    prev = err;
  }
  EXPECT_LT(prev, 1e-12);
}

TEST(Indicators, ExactnessCase) {
  const pfem::Benchmark b = pfem::bubble_exact(-1, 1, -1, 1);
  for (int p = 2; p <= 5; ++p) {
    const Solved s = solve_on(pfem::make_reference_square_mesh(), DegreeMap::uniform(1, p), b.load);
    const EstimatorReport r = pfem::compute_indicators(*s.sol, b.load, {});
    EXPECT_LE(r.eta, 1e-10);
    EXPECT_LE(r.osc_total, 1e-10);
    EXPECT_EQ(r.eta_edge.size(), 4u);
  }
}

TEST(Indicators, HatFunctionJumps) {
  // Centre hat on the 2x2 mesh with f = 0: no interior residual, and the
  // normal-derivative jump on each interior edge is 2(1+t) in the global parameter.
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 1, 0, 1, 2, 2);
  const auto space = std::make_shared<const FESpace>(m, DegreeMap::uniform(4, 2));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(space->dofs().num_dofs());
  c[4] = 1.0;
  const DiscreteSolution u(space, c);
  EstimatorParams prm;
  const double b = prm.beta();
  const EstimatorReport r = pfem::compute_indicators(u, [](double, double) { return 0.0; }, prm);
  // int 4 (1+t)^2 W_b dt; the odd moment vanishes and t = J_1 / (b+1).
  const double r2 = 4.0 * (pfem::gamma_p(b, 0) + pfem::gamma_p(b, 1) / ((b + 1) * (b + 1)));
  for (int k = 0; k < 4; ++k) EXPECT_LT(r.eta_b[k], 1e-13);
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edge(e).boundary()) {
      EXPECT_EQ(r.eta_edge[e], 0.0);
    } else {
      EXPECT_NEAR(r.eta_edge[e] * r.eta_edge[e], r2 / 2.0, 1e-12);
    }
  }
}

class IndicatorInvariance : public ::testing::Test {
 protected:
  void SetUp() override {
    DegreeMap d = DegreeMap::uniform(12, 3);
    d[0] = 5;
    d[5] = 4;
    ParallelogramMesh m = pfem::make_lshape_mesh(2);
    pfem::smooth_degrees(m, d, 12);
    bench = pfem::corner_cutoff();
    solved = solve_on(std::move(m), d, bench.load);
  }
  pfem::Benchmark bench;
  Solved solved;
};

TEST_F(IndicatorInvariance, NormalFlip) {
  EstimatorParams flipped;
  flipped.reverse_normals = true;
  const EstimatorReport a = pfem::compute_indicators(*solved.sol, bench.load, {});
  const EstimatorReport b = pfem::compute_indicators(*solved.sol, bench.load, flipped);
  expect_reports_equal(a, b, 1e-12);
}

TEST_F(IndicatorInvariance, QuadratureDoubling) {
  EstimatorParams doubled;
  doubled.quadrature_multiplier = 2;
  const EstimatorReport a = pfem::compute_indicators(*solved.sol, bench.load, {});
  const EstimatorReport b = pfem::compute_indicators(*solved.sol, bench.load, doubled);
  expect_reports_equal(a, b, 1e-12);
}

TEST_F(IndicatorInvariance, Additivity) {
  const EstimatorReport r = pfem::compute_indicators(*solved.sol, bench.load, {});
  double sum = 0.0, edge_half = 0.0, eta_e2 = 0.0;
  for (int k = 0; k < solved.mesh->num_elements(); ++k) {
    sum += r.eta_k_sq(k);
    eta_e2 += r.eta_e[k] * r.eta_e[k];
  }
  for (double v : r.eta_edge) edge_half += 0.5 * v * v;
  EXPECT_NEAR(r.eta * r.eta, sum, 1e-12 * sum);
  EXPECT_NEAR(eta_e2, edge_half, 1e-12 * edge_half);
  for (int e = 0; e < solved.mesh->num_edges(); ++e) {
    const pfem::MeshEdge& edge = solved.mesh->edge(e);
    EXPECT_EQ(r.edge_degree[e], edge.boundary() ? solved.sol->degrees()[edge.in]
                                                 : std::min(solved.sol->degrees()[edge.in],
                                                            solved.sol->degrees()[edge.out]));
  }
}

TEST_F(IndicatorInvariance, ElementResidualMatchesDirectQuadrature) {
  const EstimatorParams prm;
  const double b = prm.beta();
  const EstimatorReport r = pfem::compute_indicators(*solved.sol, bench.load, prm);
  for (int k : {0, 3, 9}) {
    const int p = solved.sol->degrees()[k];
    const pfem::AffineMap map = solved.mesh->geometry(k);
    const pfem::TensorCoeffs fp = pfem::project(pfem::project_load(bench.load, map, p, b, prm.load_projection_boost), p);
    const pfem::ReferenceFunction res{[&](double x, double y) {
                                        const Eigen::MatrixXd lap = solved.sol->evaluate(
                                            k, DiscreteSolution::Quantity::kLaplacian, {{x, y}});
                                        return fp.value(x, y) + lap(0, 0);
                                      },
                                      nullptr};
    const double n = pfem::weighted_norm(res, {0, b, pfem::WeightVariant::kPlain}, p + 5);
    EXPECT_NEAR(r.eta_b[k], n / p, 1e-12 * std::max(n, 1e-300));
  }
}

TEST(Indicators, ParamValidation) {
  EstimatorParams p;
  p.delta = 0.0;
  EXPECT_THROW(p.validate(), pfem::ParameterError);
  p.delta = 0.25;
  EXPECT_THROW(p.validate(), pfem::ParameterError);
  p.delta = 0.1;
  p.quadrature_multiplier = 0;
  EXPECT_THROW(p.validate(), pfem::ParameterError);
  p.quadrature_multiplier = 1;
  p.load_projection_boost = 0;
  EXPECT_THROW(p.validate(), pfem::ParameterError);
  EXPECT_DOUBLE_EQ(EstimatorParams{}.beta(), 0.6);
}

TEST(Surrogate, ZeroForExactSolution) {
  const pfem::Benchmark b = pfem::bubble_exact(-1, 1, -1, 1);
  const Solved s = solve_on(pfem::make_reference_square_mesh(), DegreeMap::uniform(1, 3), b.load);
  const pfem::ErrorMeasures e = pfem::error_surrogate(*s.sol, b.exact, {});
  EXPECT_LT(e.tilde, 1e-10);
  EXPECT_LT(e.energy, 1e-10);
  EXPECT_EQ(pfem::effectivity(pfem::compute_indicators(*s.sol, b.load, {}).eta, e.tilde), std::nullopt);
}

TEST(Surrogate, DecreasesWithDegreeAndBoundsDualLowerBound) {
  const pfem::Benchmark b = pfem::smooth_sine();
  double prev = 1e300;
  for (int p = 2; p <= 7; ++p) {
    const Solved s = solve_on(pfem::make_rectangle_mesh(0, 1, 0, 1, 2, 2), DegreeMap::uniform(4, p), b.load);
    const pfem::ErrorMeasures e = pfem::error_surrogate(*s.sol, b.exact, {});
    EXPECT_LT(e.tilde, prev);
    prev = e.tilde;
    double sum = 0.0;
    for (double t : e.tilde_element) sum += t * t;
    EXPECT_NEAR(std::sqrt(sum), e.tilde, 1e-14 * e.tilde);
    const double lower = pfem::dual_lower_bound(*s.sol, b.exact, b.load, {});
    EXPECT_GT(lower, 0.0);
    EXPECT_LE(lower, e.tilde * (1 + 1e-9)) << "p=" << p;
  }
}

TEST(Surrogate, TildeWeightedQuadratureMatchesClosure) {
  const pfem::Benchmark b = pfem::smooth_sine();
  const Solved s = solve_on(pfem::make_rectangle_mesh(0, 1, 0, 1, 2, 2), DegreeMap::uniform(4, 3), b.load);
  const EstimatorParams prm;
  const pfem::ErrorMeasures e = pfem::error_surrogate(*s.sol, b.exact, prm);
  for (int k = 0; k < 4; ++k) {
    const pfem::AffineMap map = s.mesh->geometry(k);
    const pfem::ReferenceFunction err = pfem::pull_back(
        {[&](double x, double y) {
           const pfem::Point r = map.to_reference({x, y});
           return b.exact.value(x, y) - s.sol->value(k, r.x(), r.y());
         },
         [&](double x, double y) {
           const pfem::Point r = map.to_reference({x, y});
           return (b.exact.gradient(x, y) - s.sol->gradient(k, r.x(), r.y())).eval();
         }},
        map);
    const double n = pfem::weighted_norm(err, {1, prm.beta(), pfem::WeightVariant::kTilde}, 40);
    EXPECT_NEAR(e.tilde_element[k], n, 1e-10 * n);
  }
}

TEST(DualLowerBound, DeterministicForFixedSeed) {
  const pfem::Benchmark b = pfem::smooth_sine();
  const Solved s = solve_on(pfem::make_rectangle_mesh(0, 1, 0, 1, 2, 2), DegreeMap::uniform(4, 3), b.load);
  const double a = pfem::dual_lower_bound(*s.sol, b.exact, b.load, {});
  const double c = pfem::dual_lower_bound(*s.sol, b.exact, b.load, {});
  EXPECT_EQ(a, c);
  const double none = pfem::dual_lower_bound(*s.sol, b.exact, b.load, {}, 0);
  EXPECT_LE(none, a);
}

TEST(Effectivity, Cases) {
  EXPECT_EQ(pfem::effectivity(0.0, 0.0), std::nullopt);
  EXPECT_EQ(pfem::effectivity(1e-12, 5e-11), std::nullopt);
  EXPECT_THROW(pfem::effectivity(1e-3, 0.0), pfem::InconsistencyError);
  EXPECT_DOUBLE_EQ(*pfem::effectivity(2.0, 0.5), 4.0);
}

TEST(Csv, ElementAndEdgeFiles) {
  const pfem::Benchmark b = pfem::smooth_sine();
  const Solved s = solve_on(pfem::make_rectangle_mesh(0, 1, 0, 1, 2, 2), DegreeMap::uniform(4, 3), b.load);
  const EstimatorReport r = pfem::compute_indicators(*s.sol, b.load, {});
  std::ostringstream el, ed;
  pfem::write_element_csv(el, r, s.sol->degrees());
  pfem::write_edge_csv(ed, r, *s.mesh);
  std::istringstream in(el.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "element,p,eta_b,eta_e,osc");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string cell;
    std::vector<std::string> parts;
    while (std::getline(cells, cell, ',')) parts.push_back(cell);
    ASSERT_EQ(parts.size(), 5u);
    EXPECT_EQ(std::stod(parts[2]), r.eta_b[rows - 1]);
  }
  EXPECT_EQ(rows, 4);
  std::istringstream ein(ed.str());
  std::getline(ein, line);
  EXPECT_EQ(line, "edge,p,eta_l");
  rows = 0;
  while (std::getline(ein, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

}  // namespace
