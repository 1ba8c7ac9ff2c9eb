#ifndef PFEM_PROBLEMS_HPP_
#define PFEM_PROBLEMS_HPP_

#include <functional>
#include <string>

#include "pfem/mesh.hpp"

namespace pfem {

/// Manufactured Poisson problem -Laplace u = f with u = 0 on the boundary.
struct Benchmark {
  std::string id;
  PhysicalFunction exact;
  std::function<double(double, double)> load;
};

/// u = sin(pi x) sin(pi y) on (0,1)^2.
Benchmark smooth_sine();

/// Quartic bubble vanishing on the edges of [x0,x1] x [y0,y1], scaled so that
/// it equals (1-x^2)(1-y^2) on the reference square.
Benchmark bubble_exact(double x0, double x1, double y0, double y1);

/// u = chi(r) r^{2/3} sin(2 theta / 3) on the L-shape (-1,1)^2 minus
/// [0,1) x (-1,0], theta in [0, 3 pi / 2]. chi is a quintic smoothstep equal
/// to 1 for r <= r0 and 0 for r >= r1.
Benchmark corner_cutoff(double r0 = 0.25, double r1 = 0.75);

/// Benchmark by id ("smooth-sine", "bubble-exact", "corner-cutoff"), checked
/// against the mesh domain. Throws ConfigError on an unknown id or a mesh the
/// exact solution does not vanish on.
Benchmark make_benchmark(const std::string& id, const ParallelogramMesh& mesh);

}  // namespace pfem

#endif  // PFEM_PROBLEMS_HPP_
