#include "pfem/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pfem/errors.hpp"

namespace pfem {

namespace {

using std::numbers::pi;

struct Box {
  double x0, x1, y0, y1;
};

Box bounding_box(const ParallelogramMesh& mesh) {
  Box b{mesh.vertex(0).x(), mesh.vertex(0).x(), mesh.vertex(0).y(), mesh.vertex(0).y()};
  for (const Point& v : mesh.vertices()) {
    b.x0 = std::min(b.x0, v.x());
    b.x1 = std::max(b.x1, v.x());
    b.y0 = std::min(b.y0, v.y());
    b.y1 = std::max(b.y1, v.y());
  }
  return b;
}

double mesh_area(const ParallelogramMesh& mesh) {
  double a = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) a += 4.0 * std::abs(mesh.geometry(k).det());
  return a;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

// Every boundary vertex must satisfy `on_boundary`.
template <class Pred>
bool boundary_matches(const ParallelogramMesh& mesh, Pred on_boundary) {
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.is_boundary_vertex(v) && !on_boundary(mesh.vertex(v))) return false;
  }
  return true;
}

}  // namespace

Benchmark smooth_sine() {
  Benchmark b;
  b.id = "smooth-sine";
  b.exact.value = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
  b.exact.gradient = [](double x, double y) -> Eigen::Vector2d {
    return {pi * std::cos(pi * x) * std::sin(pi * y), pi * std::sin(pi * x) * std::cos(pi * y)};
  };
  b.load = [](double x, double y) { return 2.0 * pi * pi * std::sin(pi * x) * std::sin(pi * y); };
  return b;
}

Benchmark bubble_exact(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0 && y1 > y0)) throw ParameterError("bubble_exact: empty box");
  const double c = 16.0 / ((x1 - x0) * (x1 - x0) * (y1 - y0) * (y1 - y0));
  Benchmark b;
  b.id = "bubble-exact";
  b.exact.value = [=](double x, double y) { return c * (x - x0) * (x1 - x) * (y - y0) * (y1 - y); };
  b.exact.gradient = [=](double x, double y) -> Eigen::Vector2d {
    const double bx = (x - x0) * (x1 - x), by = (y - y0) * (y1 - y);
    return {c * (x0 + x1 - 2.0 * x) * by, c * bx * (y0 + y1 - 2.0 * y)};
  };
  b.load = [=](double x, double y) {
    return 2.0 * c * ((x - x0) * (x1 - x) + (y - y0) * (y1 - y));
  };
  return b;
}

Benchmark corner_cutoff(double r0, double r1) {
  if (!(r1 > r0 && r0 > 0.0)) throw ParameterError("corner_cutoff: need 0 < r0 < r1");
  const double h = r1 - r0;
  // chi = 1 - S(s), S(s) = 6s^5 - 15s^4 + 10s^3, s = (r - r0) / h.
  auto chi = [=](double r, int d) {
    if (r <= r0) return d == 0 ? 1.0 : 0.0;
    if (r >= r1) return 0.0;
    const double s = (r - r0) / h;
    if (d == 0) return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
    if (d == 1) return -30.0 * s * s * (1.0 - s) * (1.0 - s) / h;
    return -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (h * h);
  };
  auto angle = [](double x, double y) {
    double t = std::atan2(y, x);
    if (t < 0.0) t += 2.0 * pi;
    return t;
  };
  Benchmark b;
  b.id = "corner-cutoff";
  b.exact.value = [=](double x, double y) {
    const double r = std::hypot(x, y);
    if (r == 0.0) return 0.0;
    return chi(r, 0) * std::pow(r, 2.0 / 3.0) * std::sin(2.0 * angle(x, y) / 3.0);
  };
  b.exact.gradient = [=](double x, double y) -> Eigen::Vector2d {
    const double r = std::hypot(x, y);
    if (r == 0.0) return Eigen::Vector2d::Zero();
    const double t = angle(x, y);
    const double w = std::pow(r, 2.0 / 3.0) * std::sin(2.0 * t / 3.0);
    const Eigen::Vector2d grad_w =
        (2.0 / 3.0) * std::pow(r, -1.0 / 3.0) * Eigen::Vector2d(-std::sin(t / 3.0), std::cos(t / 3.0));
    return chi(r, 0) * grad_w + w * chi(r, 1) * Eigen::Vector2d(x / r, y / r);
  };
  b.load = [=](double x, double y) {
    const double r = std::hypot(x, y);
    if (r <= r0 || r >= r1) return 0.0;
    const double st = std::sin(2.0 * angle(x, y) / 3.0);
    const double c1 = chi(r, 1), c2 = chi(r, 2);
    return -(2.0 * c1 * (2.0 / 3.0) * std::pow(r, -1.0 / 3.0) * st +
             std::pow(r, 2.0 / 3.0) * st * (c2 + c1 / r));
  };
  return b;
}

Benchmark make_benchmark(const std::string& id, const ParallelogramMesh& mesh) {
  const Box box = bounding_box(mesh);
  const bool rectangle = near(mesh_area(mesh), (box.x1 - box.x0) * (box.y1 - box.y0));
  if (id == "smooth-sine") {
    if (!rectangle || !near(box.x0, 0.0) || !near(box.x1, 1.0) || !near(box.y0, 0.0) ||
        !near(box.y1, 1.0)) {
      throw ConfigError("smooth-sine needs a mesh of the unit square (0,1)^2");
    }
    return smooth_sine();
  }
  if (id == "bubble-exact") {
    if (!rectangle) throw ConfigError("bubble-exact needs a rectangular domain");
    return bubble_exact(box.x0, box.x1, box.y0, box.y1);
  }
  if (id == "corner-cutoff") {
    const bool lshape = near(mesh_area(mesh), 3.0) && near(box.x0, -1.0) && near(box.x1, 1.0) &&
                        near(box.y0, -1.0) && near(box.y1, 1.0) &&
                        boundary_matches(mesh, [](const Point& p) {
                          const bool outer = std::abs(std::abs(p.x()) - 1.0) < 1e-12 ||
                                             std::abs(std::abs(p.y()) - 1.0) < 1e-12;
                          const bool notch = (std::abs(p.x()) < 1e-12 && p.y() <= 1e-12) ||
                                             (std::abs(p.y()) < 1e-12 && p.x() >= -1e-12);
                          return outer || notch;
                        });
    if (!lshape) throw ConfigError("corner-cutoff needs the L-shaped domain (-1,1)^2 \\ [0,1)x(-1,0]");
    return corner_cutoff();
  }
  throw ConfigError("unknown benchmark '" + id + "'");
}

}  // namespace pfem
