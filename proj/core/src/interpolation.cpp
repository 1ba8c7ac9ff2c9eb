#include "pfem/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pfem/errors.hpp"
#include "pfem/jacobi.hpp"
#include "pfem/quadrature.hpp"

namespace pfem {

namespace {

// a - b as series, padding the shorter coefficient list. Same basis assumed.
JacobiSeries difference(const JacobiSeries& a, const JacobiSeries& b) {
  std::vector<double> c(std::max(a.coeffs().size(), b.coeffs().size()), 0.0);
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) c[i] += a.coeffs()[i];
  for (std::size_t i = 0; i < b.coeffs().size(); ++i) c[i] -= b.coeffs()[i];
  return JacobiSeries(a.beta(), std::move(c));
}

JacobiSeries rebase(const JacobiSeries& w, double beta) {
  if (w.beta() == beta) return w;
  const int d = std::max(w.degree(), 0);
  return JacobiSeries::from_function([&](double x) { return w(x); }, beta, d, d + 1);
}

// Trace on local edge l in its counter-clockwise parameter s.
JacobiSeries local_trace(const TensorCoeffs& u, int l) {
  JacobiSeries tr = trace_to_edge(u, static_cast<Edge>(l));
  const auto e = static_cast<Edge>(l);
  return (e == Edge::kTop || e == Edge::kLeft) ? tr.reflected() : tr;
}

// (X, Y) = T (x, y) puts local edge l at Y = -1 with X the global parameter.
Eigen::Matrix2d edge_frame(int l, int o) {
  Eigen::Matrix2d t;
  switch (static_cast<Edge>(l)) {
    case Edge::kBottom: t << o, 0, 0, 1; break;
    case Edge::kRight: t << 0, o, -1, 0; break;
    case Edge::kTop: t << -o, 0, 0, -1; break;
    case Edge::kLeft: t << 0, -o, 1, 0; break;
  }
  return t;
}

}  // namespace

JacobiSeries boundary_decay_poly(int p, double beta) { return boundary_decay_poly(p, beta, beta); }

JacobiSeries boundary_decay_poly(int p, double beta, double basis_beta) {
  if (p < 1) throw ParameterError("boundary_decay_poly: degree must be >= 1");
  check_weight_exponent(beta);
  // Second exponent beta + 1: (1-x) P^{(beta+2,beta+1)}_{p-1} is the minimiser
  // of the weighted norm under both endpoint conditions.
  const JacobiParams params{beta + 2.0, beta + 1.0};
  const double scale = 2.0 * eval_jacobi(p - 1, params, -1.0);
  auto g = [&](double x) { return (1.0 - x) * eval_jacobi(p - 1, params, x) / scale; };
  return JacobiSeries::from_function(g, basis_beta, p, p + 1);
}

Point corner_of_slot(int slot) {
  switch (slot) {
    case 0: return {-1.0, -1.0};
    case 1: return {1.0, -1.0};
    case 2: return {1.0, 1.0};
    case 3: return {-1.0, 1.0};
    default: throw ParameterError("vertex slot must be 0..3, got " + std::to_string(slot));
  }
}

TensorCoeffs vertex_function(int slot, int p, double beta) {
  const Point c = corner_of_slot(slot);
  const JacobiSeries g = boundary_decay_poly(p, beta);
  const JacobiSeries gx = c.x() > 0 ? g.reflected() : g;
  const JacobiSeries gy = c.y() > 0 ? g.reflected() : g;
  return outer(gx, gy);
}

TensorCoeffs edge_lift(const JacobiSeries& w_in, Edge edge, int p, double beta) {
  const JacobiSeries w = rebase(w_in, beta);
  if (w.degree() > p) {
    throw ParameterError("edge_lift: edge polynomial degree " + std::to_string(w.degree()) +
                         " exceeds p = " + std::to_string(p));
  }
  const double tol = 1e-10 * std::max(1.0, w.norm());
  if (std::abs(w(-1.0)) > tol || std::abs(w(1.0)) > tol) {
    throw PreconditionError("edge_lift: edge polynomial must vanish at both endpoints");
  }
  const JacobiSeries g = boundary_decay_poly(std::max(p, 1), beta);
  switch (edge) {
    case Edge::kBottom: return outer(w, g);
    case Edge::kRight: return outer(g.reflected(), w);
    case Edge::kTop: return outer(w.reflected(), g.reflected());
    case Edge::kLeft: return outer(g, w.reflected());
  }
  return {};
}

const TensorCoeffs* PiecewisePoly::find(int k) const {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i] == k) return &pieces[i];
  }
  return nullptr;
}

TensorCoeffs* PiecewisePoly::find(int k) {
  return const_cast<TensorCoeffs*>(std::as_const(*this).find(k));
}

JacobiSeries edge_trace(const ParallelogramMesh& mesh, int k, int e, const TensorCoeffs& piece) {
  const int l = mesh.local_edge(k, e);
  if (l < 0) throw ParameterError("edge_trace: edge is not on the element");
  JacobiSeries s = local_trace(piece, l);
  return mesh.edge_orientation(k, l) > 0 ? s : s.reflected();
}

double continuity_defect(const ParallelogramMesh& mesh, const PiecewisePoly& u) {
  double worst = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const MeshEdge& edge = mesh.edge(e);
    if (edge.boundary()) continue;
    const TensorCoeffs* a = u.find(edge.in);
    const TensorCoeffs* b = u.find(edge.out);
    if (!a || !b) continue;
    const JacobiSeries d =
        difference(edge_trace(mesh, edge.in, e, *a), edge_trace(mesh, edge.out, e, *b));
    worst = std::max(worst, d.norm());
  }
  return worst;
}

PiecewisePoly local_interpolant(const ParallelogramMesh& mesh, const PhysicalFunction& u, int v,
                                int p, double beta) {
  if (!(beta > -1.0 && beta < -0.5)) {
    throw ParameterError("local_interpolant: beta must lie in (-1, -1/2)");
  }
  if (p < 1) throw ParameterError("local_interpolant: degree must be >= 1");
  if (v < 0 || v >= mesh.num_vertices()) throw ParameterError("local_interpolant: bad vertex");

  PiecewisePoly out;
  out.elements = mesh.vertex_elements(v);
  std::sort(out.elements.begin(), out.elements.end());

  std::array<TensorCoeffs, 4> xi;
  for (int l = 0; l < 4; ++l) xi[l] = vertex_function(l, p, beta);

  for (int k : out.elements) {
    const AffineMap map = mesh.geometry(k);
    auto uhat = [&](double x, double y) {
      const Point q = map(x, y);
      return u.value(q.x(), q.y());
    };
    TensorCoeffs phi = expand(uhat, beta, p);
    const TensorCoeffs pi = phi;
    for (int l = 0; l < 4; ++l) {
      const Point c = corner_of_slot(l);
      phi += (uhat(c.x(), c.y()) - pi.value(c.x(), c.y())) * xi[l];
    }
    out.pieces.push_back(std::move(phi));
  }

  // Match shared patch edges by correcting the lower-index element.
  std::vector<int> edges;
  for (int k : out.elements) {
    for (int l = 0; l < 4; ++l) edges.push_back(mesh.element_edge(k, l));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (int e : edges) {
    const MeshEdge& edge = mesh.edge(e);
    if (edge.boundary()) continue;
    TensorCoeffs* first = out.find(edge.in);
    const TensorCoeffs* second = out.find(edge.out);
    if (!first || !second) continue;
    const JacobiSeries d = difference(edge_trace(mesh, edge.out, e, *second),
                                      edge_trace(mesh, edge.in, e, *first));
    const int l = mesh.local_edge(edge.in, e);
    const JacobiSeries w = mesh.edge_orientation(edge.in, l) > 0 ? d : d.reflected();
    *first += edge_lift(w, static_cast<Edge>(l), p, beta);
  }

  // Zero the pieces on the domain boundary.
  for (std::size_t i = 0; i < out.elements.size(); ++i) {
    const int k = out.elements[i];
    for (int l = 0; l < 4; ++l) {
      if (!mesh.edge(mesh.element_edge(k, l)).boundary()) continue;
      out.pieces[i] -= edge_lift(local_trace(out.pieces[i], l), static_cast<Edge>(l), p, beta);
    }
  }
  out.continuous = true;
  return out;
}

PiecewisePoly global_interpolant(const ParallelogramMesh& mesh, const PhysicalFunction& u,
                                 const DegreeMap& degrees, double beta) {
  const PatchTables tables = patches_and_degrees(mesh, degrees);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (tables.vertex_degree[v] < 2) {
      throw DegreeFloorError("global_interpolant: vertex " + std::to_string(v) +
                             " has p_V = " + std::to_string(tables.vertex_degree[v]) +
                             "; need p_V >= 2");
    }
  }
  PiecewisePoly out;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    out.elements.push_back(k);
    out.pieces.emplace_back(beta, degrees[k]);
  }
  std::array<TensorCoeffs, 4> hats;
  for (int l = 0; l < 4; ++l) hats[l] = vertex_function(l, 1, beta);

  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const PiecewisePoly iv = local_interpolant(mesh, u, v, tables.vertex_degree[v] - 1, beta);
    for (std::size_t i = 0; i < iv.elements.size(); ++i) {
      const int k = iv.elements[i];
      const int slot = mesh.local_vertex(k, v);
      out.pieces[k] += multiply(hats[slot], iv.pieces[i], degrees[k]);
    }
  }
  out.continuous = true;
  return out;
}

JumpLift::JumpLift(const ParallelogramMesh& mesh, int edge, JacobiSeries poly, double beta, int p)
    : edge_(edge), poly_(std::move(poly)), beta_(beta) {
  if (edge < 0 || edge >= mesh.num_edges()) throw ParameterError("JumpLift: bad edge index");
  const MeshEdge& e = mesh.edge(edge);
  if (e.boundary()) throw ParameterError("JumpLift: edge " + std::to_string(edge) + " is on the boundary");
  if (!(beta > 0.5 && beta < 1.0)) throw ParameterError("JumpLift: beta must lie in (1/2, 1)");
  g_ = boundary_decay_poly(std::max(p, 1), -beta);
  elements_ = {e.in, e.out};
  for (int i = 0; i < 2; ++i) {
    const int k = elements_[i];
    const int l = mesh.local_edge(k, edge);
    frames_[i] = edge_frame(l, mesh.edge_orientation(k, l));
    maps_[i] = mesh.geometry(k);
  }
}

int JumpLift::slot_of(int k) const {
  if (k == elements_[0]) return 0;
  if (k == elements_[1]) return 1;
  throw ParameterError("JumpLift: element " + std::to_string(k) + " does not touch the edge");
}

double JumpLift::value(int k, double x, double y) const {
  const Eigen::Vector2d c = frames_[slot_of(k)] * Eigen::Vector2d(x, y);
  const double w = 1.0 - c.x() * c.x();
  return poly_(c.x()) * std::pow(std::max(w, 0.0), beta_) * g_(c.y());
}

Eigen::Vector2d JumpLift::reference_gradient(int k, double x, double y) const {
  const Eigen::Matrix2d& t = frames_[slot_of(k)];
  const Eigen::Vector2d c = t * Eigen::Vector2d(x, y);
  const double X = c.x();
  const double w = 1.0 - X * X;
  const double px = poly_(X);
  const double gy = g_(c.y());
  const Eigen::Vector2d grad_c(
      (poly_.derivative(X) * w - 2.0 * beta_ * X * px) * std::pow(w, beta_ - 1.0) * gy,
      px * std::pow(w, beta_) * g_.derivative(c.y()));
  return t.transpose() * grad_c;
}

double JumpLift::norm_minus_beta() const {
  const int m = std::max(poly_.degree(), 0);
  const int pg = g_.degree();
  const QuadRule xb = gauss_jacobi_rule(m + 2, beta_);
  const QuadRule xb1 = gauss_jacobi_rule(m + 2, beta_ - 1.0);
  const QuadRule yb = gauss_jacobi_rule(pg + 1, -beta_);
  const QuadRule yb1 = gauss_jacobi_rule(pg + 1, 1.0 - beta_);
  const double p2 = xb.integrate([&](double x) { return poly_(x) * poly_(x); });
  const double dp2 = xb1.integrate([&](double x) {
    const double h = poly_.derivative(x) * (1.0 - x * x) - 2.0 * beta_ * x * poly_(x);
    return h * h;
  });
  const double g2 = yb.integrate([&](double y) { return g_(y) * g_(y); });
  const double dg2 = yb1.integrate([&](double y) {
    const double d = g_.derivative(y);
    return d * d;
  });
  // Both neighbours give the same value: the frame change is a symmetry of Q.
  return std::sqrt(2.0 * (p2 * g2 + dp2 * g2 + p2 * dg2));
}

double JumpLift::energy_product(int k,
                                const std::function<Eigen::Vector2d(double, double)>& ref_grad_w,
                                int points) const {
  const int s = slot_of(k);
  const Eigen::Matrix2d& t = frames_[s];
  const AffineMap& map = maps_[s];
  const Eigen::Matrix2d& a = map.laplacian_coeffs();
  const QuadRule rx = gauss_jacobi_rule(points, beta_ - 1.0);
  const QuadRule ry = gauss_legendre_rule(points);
  double total = 0.0;
  for (int i = 0; i < rx.size(); ++i) {
    const double X = rx.nodes[i];
    const double w = 1.0 - X * X;
    const double px = poly_(X);
    const double hx = poly_.derivative(X) * w - 2.0 * beta_ * X * px;
    for (int j = 0; j < ry.size(); ++j) {
      const double Y = ry.nodes[j];
      // grad_c v = (1-X^2)^{beta-1} H; the power is carried by the rule.
      const Eigen::Vector2d h(hx * g_(Y), px * w * g_.derivative(Y));
      const Eigen::Vector2d ref = t.transpose() * Eigen::Vector2d(X, Y);
      const Eigen::Vector2d gw = ref_grad_w(ref.x(), ref.y());
      total += rx.weights[i] * ry.weights[j] * (a * gw).dot(t.transpose() * h);
    }
  }
  return total * std::abs(map.det());
}

}  // namespace pfem
