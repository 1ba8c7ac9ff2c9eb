#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pfem/errors.hpp"
#include "pfem/fem.hpp"
#include "pfem/problems.hpp"

namespace {

using pfem::DegreeMap;
using pfem::DiscreteSolution;
using pfem::FESpace;
using pfem::ParallelogramMesh;
using pfem::Point;
constexpr double kPi = std::numbers::pi;

std::shared_ptr<const FESpace> make_space(const ParallelogramMesh& m, DegreeMap d) {
  return std::make_shared<const FESpace>(m, std::move(d));
}

DiscreteSolution random_solution(std::shared_ptr<const FESpace> s, std::mt19937_64& gen) {
  const pfem::DofMap& dofs = s->dofs();
  std::normal_distribution<double> d;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dofs.num_dofs());
  for (int i = 0; i < dofs.num_dofs(); ++i) {
    if (!dofs.is_dirichlet(i)) c[i] = d(gen);
  }
  return DiscreteSolution(std::move(s), std::move(c));
}

double energy_error(const DiscreteSolution& u, const pfem::PhysicalFunction& exact, int n = 20) {
  double s = 0.0;
  for (int k = 0; k < u.mesh().num_elements(); ++k) {
    const pfem::AffineMap f = u.mesh().geometry(k);
    const pfem::QuadRule r = pfem::gauss_legendre_rule(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Point q = f(r.nodes[i], r.nodes[j]);
        const Eigen::Vector2d e = exact.gradient(q.x(), q.y()) - u.gradient(k, r.nodes[i], r.nodes[j]);
        s += r.weights[i] * r.weights[j] * e.squaredNorm() * std::abs(f.det());
      }
    }
  }
  return std::sqrt(s);
}

ParallelogramMesh sheared_strip() {
  return ParallelogramMesh({{0, 0}, {1, 0}, {2, 0}, {0.5, 1}, {1.5, 1}, {2.5, 1}, {1, 2}, {2, 2}, {3, 2}},
                           {{0, 1, 4, 3}, {1, 2, 5, 4}, {3, 4, 7, 6}, {4, 5, 8, 7}});
}

TEST(Shapes, VerticesAndBubbles) {
  EXPECT_EQ(pfem::shape_1d(0, 0, -1.0), 1.0);
  EXPECT_EQ(pfem::shape_1d(0, 0, 1.0), 0.0);
  EXPECT_EQ(pfem::shape_1d(1, 0, 1.0), 1.0);
  EXPECT_EQ(pfem::shape_1d(1, 1, 0.3), 0.5);
  for (int k = 2; k <= 20; ++k) {
    EXPECT_NEAR(pfem::shape_1d(k, 0, -1.0), 0.0, 1e-15);
    EXPECT_NEAR(pfem::shape_1d(k, 0, 1.0), 0.0, 1e-15);
  }
  // N_2 = (x^2 - 1) sqrt(6) / 4.
  EXPECT_NEAR(pfem::shape_1d(2, 0, 0.0), -std::sqrt(6.0) / 4, 1e-15);
  EXPECT_THROW(pfem::shape_1d(-1, 0, 0.0), pfem::ParameterError);
}

TEST(Shapes, DerivativesMatchFiniteDifference) {
  const double h = 1e-6;
  for (int k = 0; k <= 12; ++k) {
    for (double x : {-0.9, 0.05, 0.7}) {
      const double fd = (pfem::shape_1d(k, 0, x + h) - pfem::shape_1d(k, 0, x - h)) / (2 * h);
      EXPECT_NEAR(pfem::shape_1d(k, 1, x), fd, 1e-8);
      const double fd2 = (pfem::shape_1d(k, 1, x + h) - pfem::shape_1d(k, 1, x - h)) / (2 * h);
      EXPECT_NEAR(pfem::shape_1d(k, 2, x), fd2, 1e-6);
    }
  }
}

TEST(Shapes, BubbleStiffnessIsIdentity) {
  const pfem::QuadRule r = pfem::gauss_legendre_rule(12);
  for (int a = 2; a <= 10; ++a) {
    for (int b = 2; b <= 10; ++b) {
      const double s = r.integrate([&](double x) { return pfem::shape_1d(a, 1, x) * pfem::shape_1d(b, 1, x); });
      EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-13);
    }
  }
  const Eigen::MatrixXd t = pfem::shape_table(4, {-0.5, 0.5}, 1);
  EXPECT_EQ(t.rows(), 2);
  EXPECT_EQ(t.cols(), 5);
  EXPECT_EQ(t(1, 3), pfem::shape_1d(3, 1, 0.5));
}

TEST(DofMap, CountsOnTwoByTwo) {
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 1, 0, 1, 2, 2);
  for (int p = 1; p <= 5; ++p) {
    const pfem::DofMap d(m, DegreeMap::uniform(4, p));
    EXPECT_EQ(d.num_dofs(), 9 + 12 * (p - 1) + 4 * (p - 1) * (p - 1));
    EXPECT_EQ(d.num_free(), 1 + 4 * (p - 1) + 4 * (p - 1) * (p - 1));
    for (int k = 0; k < 4; ++k) EXPECT_EQ(static_cast<int>(d.element_dofs(k).size()), (p + 1) * (p + 1));
  }
}

TEST(DofMap, MinimumRule) {
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 2, 0, 1, 2, 1);
  const pfem::DofMap d(m, DegreeMap({2, 5}));
  const int shared = m.element_edge(0, 1);
  EXPECT_EQ(d.edge_degree(shared), 2);
  // Element 1 drops its edge modes 3..5 on the shared edge.
  EXPECT_EQ(static_cast<int>(d.element_dofs(1).size()), 36 - 3);
  EXPECT_THROW(pfem::DofMap(m, DegreeMap({2})), pfem::ParameterError);
}

TEST(DofMap, DirichletMaskCoversBoundary) {
  const ParallelogramMesh m = pfem::make_lshape_mesh(2);
  const pfem::DofMap d(m, DegreeMap::uniform(m.num_elements(), 3));
  for (int k = 0; k < m.num_elements(); ++k) {
    for (const auto& ld : d.element_dofs(k)) {
      const bool on_boundary_edge =
          (ld.b == 0 && ld.a >= 2 && m.edge(m.element_edge(k, 0)).boundary()) ||
          (ld.a == 1 && ld.b >= 2 && m.edge(m.element_edge(k, 1)).boundary()) ||
          (ld.b == 1 && ld.a >= 2 && m.edge(m.element_edge(k, 2)).boundary()) ||
          (ld.a == 0 && ld.b >= 2 && m.edge(m.element_edge(k, 3)).boundary());
      if (on_boundary_edge) EXPECT_TRUE(d.is_dirichlet(ld.dof));
      if (ld.a <= 1 && ld.b <= 1) {
        EXPECT_EQ(d.is_dirichlet(ld.dof), m.is_boundary_vertex(ld.dof));
      }
      if (ld.a >= 2 && ld.b >= 2) EXPECT_FALSE(d.is_dirichlet(ld.dof));
    }
  }
}

TEST(Assemble, SingleElementDegreeOneIsEmpty) {
  const ParallelogramMesh m = pfem::make_reference_square_mesh();
  const auto s = make_space(m, DegreeMap::uniform(1, 1));
  const pfem::LinearSystem sys = pfem::assemble(*s, [](double, double) { return 1.0; });
  EXPECT_EQ(sys.matrix.rows(), 0);
  EXPECT_EQ(sys.rhs.size(), 0);
  const DiscreteSolution u = pfem::solve(s, sys);
  EXPECT_EQ(u.value(0, 0.2, 0.3), 0.0);
}

TEST(Assemble, SymmetricAndDeterministic) {
  const ParallelogramMesh m = pfem::make_lshape_mesh(2);
  DegreeMap d = DegreeMap::uniform(m.num_elements(), 2);
  d[3] = 5;
  pfem::smooth_degrees(m, d, 12);
  const auto s = make_space(m, d);
  const auto f = [](double x, double y) { return std::cos(x * y); };
  const pfem::LinearSystem a = pfem::assemble(*s, f);
  const Eigen::MatrixXd dense = Eigen::MatrixXd(a.matrix);
  const double amax = dense.cwiseAbs().maxCoeff();
  EXPECT_LE((dense - dense.transpose()).cwiseAbs().maxCoeff(), 1e-12 * amax);
  const pfem::LinearSystem b = pfem::assemble(*s, f);
  EXPECT_EQ(Eigen::MatrixXd(b.matrix), dense);
  EXPECT_EQ(a.rhs, b.rhs);
}

TEST(Assemble, EnergyMatchesQuadratureOfGradients) {
  const ParallelogramMesh m = sheared_strip();
  const auto s = make_space(m, DegreeMap({3, 4, 4, 5}));
  const pfem::LinearSystem sys = pfem::assemble(*s, [](double, double) { return 0.0; });
  std::mt19937_64 gen(21);
  const DiscreteSolution u = random_solution(s, gen);
  const Eigen::VectorXd x = u.free_coeffs();
  const double quad = std::pow(energy_error(u, {[](double, double) { return 0.0; },
                                                [](double, double) { return Eigen::Vector2d::Zero().eval(); }}),
                               2);
  EXPECT_NEAR(x.dot(sys.matrix * x), quad, 1e-11 * quad);
}

TEST(Assemble, LoadMatchesDirectIntegration) {
  const ParallelogramMesh m = sheared_strip();
  const auto s = make_space(m, DegreeMap::uniform(4, 3));
  const auto f = [](double x, double y) { return 1 + x * x - y; };
  const pfem::LinearSystem sys = pfem::assemble(*s, f);
  const pfem::DofMap& dofs = s->dofs();
  for (int i = 0; i < dofs.num_dofs(); ++i) {
    const int fi = dofs.free_index(i);
    if (fi < 0) continue;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(dofs.num_dofs());
    c[i] = 1.0;
    const DiscreteSolution phi(s, c);
    double ref = 0.0;
    for (int k = 0; k < m.num_elements(); ++k) {
      const pfem::AffineMap map = m.geometry(k);
      const pfem::QuadRule r = pfem::gauss_legendre_rule(8);
      for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
          const Point q = map(r.nodes[a], r.nodes[b]);
          ref += r.weights[a] * r.weights[b] * f(q.x(), q.y()) * phi.value(k, r.nodes[a], r.nodes[b]) *
                 std::abs(map.det());
        }
      }
    }
    EXPECT_NEAR(sys.rhs[fi], ref, 1e-13);
  }
  EXPECT_THROW(pfem::assemble(*s, f, -1), pfem::ParameterError);
}

TEST(Solve, PatchTestReferenceSquare) {
  const ParallelogramMesh m = pfem::make_reference_square_mesh();
  const pfem::Benchmark b = pfem::bubble_exact(-1, 1, -1, 1);
  for (int p = 2; p <= 6; ++p) {
    const DiscreteSolution u = pfem::solve_poisson(make_space(m, DegreeMap::uniform(1, p)), b.load);
    for (double x : {-0.9, 0.0, 0.35}) {
      for (double y : {-0.5, 0.6}) EXPECT_NEAR(u.value(0, x, y), b.exact.value(x, y), 1e-10);
    }
    EXPECT_LT(energy_error(u, b.exact), 1e-10);
  }
}

TEST(Solve, PatchTestRectangleMesh) {
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 2, 0, 1, 3, 2);
  const pfem::Benchmark b = pfem::bubble_exact(0, 2, 0, 1);
  const DiscreteSolution u = pfem::solve_poisson(make_space(m, DegreeMap::uniform(6, 4)), b.load);
  EXPECT_LT(energy_error(u, b.exact), 1e-10);
}

TEST(Solve, ZeroLoad) {
  const ParallelogramMesh m = pfem::make_lshape_mesh(2);
  const DiscreteSolution u = pfem::solve_poisson(make_space(m, DegreeMap::uniform(m.num_elements(), 3)),
                                                 [](double, double) { return 0.0; });
  EXPECT_EQ(u.coeffs().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Solve, GalerkinOrthogonality) {
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 1, 0, 1, 2, 2);
  const pfem::Benchmark b = pfem::smooth_sine();
  for (int p : {2, 4, 6}) {
    const auto s = make_space(m, DegreeMap::uniform(4, p));
    const pfem::LinearSystem sys = pfem::assemble(*s, b.load, 10);
    const DiscreteSolution u = pfem::solve(s, sys);
    const Eigen::VectorXd au = pfem::gradient_functional(*s, b.exact, p + 20);
    const Eigen::VectorXd residual = au - sys.matrix * u.free_coeffs();
    for (int i = 0; i < residual.size(); ++i) {
      const double vnorm = std::sqrt(sys.matrix.coeff(i, i));
      EXPECT_LE(std::abs(residual[i]), 1e-9 * vnorm) << "p=" << p << " i=" << i;
    }
  }
}

TEST(Solve, NotSpdThrows) {
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 1, 0, 1, 2, 2);
  const auto s = make_space(m, DegreeMap::uniform(4, 1));
  pfem::LinearSystem sys;
  sys.matrix.resize(1, 1);
  sys.matrix.insert(0, 0) = -1.0;
  sys.rhs = Eigen::VectorXd::Ones(1);
  EXPECT_THROW(pfem::solve(s, sys), pfem::SolverError);
}

TEST(Solve, MismatchedCoefficientsRejected) {
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 1, 0, 1, 2, 2);
  EXPECT_THROW(DiscreteSolution(make_space(m, DegreeMap::uniform(4, 2)), Eigen::VectorXd::Zero(3)),
               pfem::ParameterError);
}

TEST(Evaluate, AffineSolutionHasZeroLaplacian) {
  // Bilinear hats are harmonic only on rectangles.
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 2, 0, 1, 2, 2);
  const auto s = make_space(m, DegreeMap::uniform(4, 3));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(s->dofs().num_dofs());
  c[4] = 1.0;  // the only interior vertex
  const DiscreteSolution u(s, c);
  const std::vector<Point> pts{{0.1, 0.2}, {-0.7, 0.9}};
  for (int k = 0; k < 4; ++k) {
    const Eigen::MatrixXd lap = u.evaluate(k, DiscreteSolution::Quantity::kLaplacian, pts);
    EXPECT_LT(lap.cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Evaluate, BubbleLaplacianAtCentre) {
  const ParallelogramMesh m = pfem::make_reference_square_mesh();
  const pfem::Benchmark b = pfem::bubble_exact(-1, 1, -1, 1);
  const DiscreteSolution u = pfem::solve_poisson(make_space(m, DegreeMap::uniform(1, 2)), b.load);
  const Eigen::MatrixXd lap = u.evaluate(0, DiscreteSolution::Quantity::kLaplacian, {{0.0, 0.0}});
  EXPECT_NEAR(lap(0, 0), -4.0, 1e-10);
  EXPECT_THROW(u.evaluate(3, DiscreteSolution::Quantity::kValue, {{0.0, 0.0}}), pfem::ParameterError);
}

TEST(Evaluate, GradientChainRuleOnShearedElement) {
  const ParallelogramMesh m = sheared_strip();
  const auto s = make_space(m, DegreeMap::uniform(4, 4));
  std::mt19937_64 gen(31);
  const DiscreteSolution u = random_solution(s, gen);
  for (int k = 0; k < 4; ++k) {
    const pfem::AffineMap f = m.geometry(k);
    const auto phys = [&](double x, double y) {
      const Point r = f.to_reference({x, y});
      return u.value(k, r.x(), r.y());
    };
    const Point r(0.15, -0.35);
    const Point q = f(r.x(), r.y());
    const Eigen::MatrixXd g = u.evaluate(k, DiscreteSolution::Quantity::kGradient, {r});
    const Eigen::Vector2d fd = oracle::fd_gradient(phys, q.x(), q.y());
    EXPECT_NEAR(g(0, 0), fd[0], 1e-6 * std::max(1.0, std::abs(fd[0])));
    EXPECT_NEAR(g(0, 1), fd[1], 1e-6 * std::max(1.0, std::abs(fd[1])));
    EXPECT_LT((u.gradient(k, r.x(), r.y()) - Eigen::Vector2d(g(0, 0), g(0, 1))).norm(), 1e-13);
  }
}

TEST(Evaluate, LaplacianMatchesFiniteDifference) {
  const ParallelogramMesh m = sheared_strip();
  const auto s = make_space(m, DegreeMap::uniform(4, 4));
  std::mt19937_64 gen(32);
  const DiscreteSolution u = random_solution(s, gen);
  const pfem::AffineMap f = m.geometry(2);
  const auto phys = [&](double x, double y) {
    const Point r = f.to_reference({x, y});
    return u.value(2, r.x(), r.y());
  };
  const Point r(0.3, 0.1);
  const Point q = f(r.x(), r.y());
  const double h = 1e-4;
  const double fd = (phys(q.x() + h, q.y()) + phys(q.x() - h, q.y()) + phys(q.x(), q.y() + h) +
                     phys(q.x(), q.y() - h) - 4 * phys(q.x(), q.y())) / (h * h);
  const double lap = u.evaluate(2, DiscreteSolution::Quantity::kLaplacian, {r})(0, 0);
  EXPECT_NEAR(lap, fd, 1e-4 * std::max(1.0, std::abs(lap)));
}

TEST(Conformity, RandomCoefficientsAreContinuous) {
  const ParallelogramMesh m = pfem::make_lshape_mesh(2);
  DegreeMap d = DegreeMap::uniform(m.num_elements(), 2);
  d[0] = 4;
  d[7] = 5;
  pfem::smooth_degrees(m, d, 12);
  const auto s = make_space(m, d);
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 5; ++trial) {
    const DiscreteSolution u = random_solution(s, gen);
    for (int e = 0; e < m.num_edges(); ++e) {
      const pfem::MeshEdge& edge = m.edge(e);
      for (int i = 0; i <= 10; ++i) {
        const double t = -1.0 + 0.2 * i;
        const Point a = m.edge_reference_point(edge.in, e, t);
        const double va = u.value(edge.in, a.x(), a.y());
        if (edge.boundary()) {
          EXPECT_NEAR(va, 0.0, 1e-12);
        } else {
          const Point b = m.edge_reference_point(edge.out, e, t);
          EXPECT_NEAR(va, u.value(edge.out, b.x(), b.y()), 1e-10);
        }
      }
    }
  }
}

TEST(Convergence, SmoothSineIsGeometric) {
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 1, 0, 1, 2, 2);
  const pfem::Benchmark b = pfem::smooth_sine();
  double prev = 0.0;
  for (int p = 2; p <= 8; ++p) {
    const DiscreteSolution u = pfem::solve_poisson(make_space(m, DegreeMap::uniform(4, p)), b.load);
    const double err = energy_error(u, b.exact);
    if (p > 2) EXPECT_LE(err, 0.75 * prev) << "p=" << p;
    prev = err;
  }
}

TEST(Convergence, NestedDegreesDecreaseEnergyError) {
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 1, 0, 1, 3, 3);
  const pfem::Benchmark b = pfem::smooth_sine();
  DegreeMap d = DegreeMap::uniform(m.num_elements(), 2);
  double prev = 1e300;
  for (int step = 0; step < 8; ++step) {
    const DiscreteSolution u = pfem::solve_poisson(make_space(m, d), b.load, 6);
    const double err = energy_error(u, b.exact, 30);
    EXPECT_LE(err, prev + 1e-12);
    prev = err;
    d[(4 * step) % m.num_elements()] += 1;
    pfem::smooth_degrees(m, d, 12);
  }
}

TEST(Convergence, LoadBoostInsensitive) {
  const ParallelogramMesh m = pfem::make_rectangle_mesh(0, 1, 0, 1, 2, 2);
  const pfem::Benchmark b = pfem::smooth_sine();
  for (int p = 2; p <= 8; p += 3) {
    const auto s = make_space(m, DegreeMap::uniform(4, p));
    const double e3 = energy_error(pfem::solve_poisson(s, b.load, 3), b.exact);
    const double e6 = energy_error(pfem::solve_poisson(s, b.load, 6), b.exact);
    EXPECT_NEAR(e3, e6, 1e-3 * e6);
  }
}

}  // namespace
