#include "pfem/driver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pfem/errors.hpp"
#include "pfem/fem.hpp"

namespace pfem {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  std::string t = s.substr(b, e - b + 1);
  if (t.size() >= 2 && (t.front() == '"' || t.front() == '\'') && t.back() == t.front()) {
    t = t.substr(1, t.size() - 2);
  }
  return t;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
  return static_cast<int>(d);
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value,
            const std::string& base_dir) {
  if (key == "mesh") {
    cfg.mesh = value;
    if (value.rfind("builtin:", 0) != 0 && fs::path(value).is_relative()) {
      cfg.mesh = (fs::path(base_dir) / value).lexically_normal().string();
    }
  } else if (key == "benchmark") {
    cfg.benchmark = value;
  } else if (key == "delta") {
    cfg.delta = to_double(key, value);
  } else if (key == "p0") {
    cfg.p0 = to_int(key, value);
  } else if (key == "pmax") {
    cfg.pmax = to_int(key, value);
  } else if (key == "mode") {
    if (value == "uniform") {
      cfg.mode = RunMode::kUniform;
    } else if (value == "adaptive") {
      cfg.mode = RunMode::kAdaptive;
    } else {
      throw ConfigError("config: mode must be 'uniform' or 'adaptive', got '" + value + "'");
    }
  } else if (key == "theta") {
    cfg.theta = to_double(key, value);
  } else if (key == "output") {
    cfg.output = value;
  } else if (key == "quad_boost") {
    cfg.quad_boost = to_int(key, value);
  } else if (key == "load_boost") {
    cfg.load_boost = to_int(key, value);
  } else if (key == "target_eta") {
    cfg.target_eta = to_double(key, value);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(4) << v;
  return s.str();
}

EstimatorParams estimator_params(const RunConfig& cfg) {
  EstimatorParams p;
  p.delta = cfg.delta;
  p.load_projection_boost = cfg.load_boost;
  return p;
}

struct Step {
  int dofs = 0;
  EstimatorReport report;
  ErrorMeasures error;
};

Step solve_and_estimate(const RunConfig& cfg, const ParallelogramMesh& mesh,
                        const Benchmark& bench, const DegreeMap& degrees) {
  auto space = std::make_shared<const FESpace>(mesh, degrees);
  const DiscreteSolution sol = solve_poisson(space, bench.load, cfg.quad_boost);
  const EstimatorParams params = estimator_params(cfg);
  Step s;
  s.dofs = space->dofs().num_free();
  s.report = compute_indicators(sol, bench.load, params);
  s.error = error_surrogate(sol, bench.exact, params);
  return s;
}

}  // namespace

void RunConfig::validate() const {
  if (mesh.empty()) throw ConfigError("config: 'mesh' is required");
  if (benchmark.empty()) throw ConfigError("config: 'benchmark' is required");
  if (p0 < 2) throw ConfigError("config: p0 must be >= 2 (interpolation degree floor)");
  if (pmax < p0) throw ConfigError("config: pmax must be >= p0");
  if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("config: theta must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 0.25)) throw ConfigError("config: delta must lie in (0, 1/4)");
  if (quad_boost < 0) throw ConfigError("config: quad_boost must be >= 0");
  if (load_boost < 1) throw ConfigError("config: load_boost must be >= 1");
  if (!(target_eta >= 0.0)) throw ConfigError("config: target_eta must be >= 0");
}

RunConfig RunConfig::parse(std::istream& in, const std::string& base_dir) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  RunConfig cfg;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    for (const auto& [key, value] : doc.items()) {
      assign(cfg, key, value.is_string() ? value.get<std::string>() : value.dump(), base_dir);
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    int number = 0;
    while (std::getline(lines, line)) {
      ++number;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
      }
      assign(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), base_dir);
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, fs::path(path).parent_path().string());
}

ParallelogramMesh load_mesh(const std::string& spec) {
  if (spec.rfind("builtin:", 0) != 0) return read_mesh_file(spec).mesh;
  const std::string rest = spec.substr(8);
  auto count = [&](const std::string& prefix) {
    const std::string n = rest.substr(prefix.size());
    const int v = to_int("mesh", n);
    if (v < 1) throw ConfigError("mesh: cell count must be >= 1 in '" + spec + "'");
    return v;
  };
  if (rest == "reference") return make_reference_square_mesh();
  if (rest.rfind("square:", 0) == 0) {
    const int n = count("square:");
    return make_rectangle_mesh(0.0, 1.0, 0.0, 1.0, n, n);
  }
  if (rest.rfind("lshape:", 0) == 0) return make_lshape_mesh(count("lshape:"));
  throw ConfigError("unknown builtin mesh '" + spec + "'");
}

std::vector<int> dorfler_mark(const std::vector<double>& eta_sq, double theta) {
  std::vector<int> order(eta_sq.size());
  std::iota(order.begin(), order.end(), 0);
  if (theta >= 1.0) return order;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return eta_sq[a] > eta_sq[b]; });
  const double total = std::accumulate(eta_sq.begin(), eta_sq.end(), 0.0);
  const double goal = theta * theta * total;
  std::vector<int> marked;
  double acc = 0.0;
  for (int k : order) {
    if (acc >= goal && !marked.empty()) break;
    marked.push_back(k);
    acc += eta_sq[k];
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

SweepResult run_uniform_sweep(const RunConfig& cfg, const ParallelogramMesh& mesh,
                              const Benchmark& bench) {
  cfg.validate();
  SweepResult res;
  for (int p = cfg.p0; p <= cfg.pmax; ++p) {
    SweepRow row;
    row.p = p;
    try {
      const Step s = solve_and_estimate(cfg, mesh, bench, DegreeMap::uniform(mesh.num_elements(), p));
      row.dofs = s.dofs;
      row.energy_err = s.error.energy;
      row.tilde_err = s.error.tilde;
      row.eta = s.report.eta;
      row.osc = s.report.osc_total;
      row.effectivity = effectivity(row.eta, row.tilde_err);
    } catch (const SolverError& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.energy_err = row.tilde_err = row.eta = row.osc = nan;
      res.rows.push_back(row);
      res.status = RunStatus::kSolverFailure;
      res.message = "solver failure at p = " + std::to_string(p) + ": " + e.what();
      return res;
    }
    res.rows.push_back(row);
  }
  return res;
}

AdaptiveResult run_adaptive(const RunConfig& cfg, const ParallelogramMesh& mesh,
                            const Benchmark& bench) {
  cfg.validate();
  AdaptiveResult res;
  res.degrees = DegreeMap::uniform(mesh.num_elements(), cfg.p0);
  double prev = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int iter = 0;; ++iter) {
    Step s;
    try {
      s = solve_and_estimate(cfg, mesh, bench, res.degrees);
    } catch (const SolverError& e) {
      res.status = RunStatus::kSolverFailure;
      res.message = "solver failure at iteration " + std::to_string(iter) + ": " + e.what();
      return res;
    }
    res.rows.push_back({iter, res.degrees.max(), s.dofs, s.error.tilde, s.report.eta,
                        s.report.osc_total});
    if (s.report.eta > prev) res.eta_monotone = false;
    if (s.report.eta <= cfg.target_eta) {
      res.reached_target = true;
      res.message = "estimator below target";
      return res;
    }
    if (res.degrees.max() >= cfg.pmax) {
      res.message = "maximum degree reached";
      return res;
    }
    stalled = s.report.eta >= prev ? stalled + 1 : 0;
    if (stalled >= 3) {
      res.status = RunStatus::kStagnation;
      res.message = "estimator did not decrease for 3 iterations";
      return res;
    }
    prev = s.report.eta;

    std::vector<double> eta_sq(mesh.num_elements());
    for (int k = 0; k < mesh.num_elements(); ++k) eta_sq[k] = s.report.eta_k_sq(k);
    for (int k : dorfler_mark(eta_sq, cfg.theta)) {
      res.degrees[k] = std::min(res.degrees[k] + 1, cfg.pmax);
    }
    smooth_degrees(mesh, res.degrees, cfg.pmax);
  }
}

std::pair<double, double> corner_concentration(const ParallelogramMesh& mesh,
                                               const DegreeMap& degrees, const Point& corner) {
  std::vector<bool> near(mesh.num_vertices(), false);
  std::vector<int> corner_elements;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& el = mesh.element(k);
    const bool touches = std::any_of(el.begin(), el.end(), [&](int v) {
      return (mesh.vertex(v) - corner).norm() < 1e-12;
    });
    if (!touches) continue;
    corner_elements.push_back(k);
    for (int v : el) near[v] = true;
  }
  if (corner_elements.empty()) throw ParameterError("corner_concentration: no element at corner");
  double sum_c = 0.0, sum_f = 0.0;
  int n_f = 0;
  for (int k : corner_elements) sum_c += degrees[k];
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& el = mesh.element(k);
    if (std::any_of(el.begin(), el.end(), [&](int v) { return near[v]; })) continue;
    sum_f += degrees[k];
    ++n_f;
  }
  const double far = n_f ? sum_f / n_f : std::numeric_limits<double>::quiet_NaN();
  return {sum_c / static_cast<double>(corner_elements.size()), far};
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "p,dofs,energy_err,tilde_err,eta,osc,effectivity\n";
  for (const auto& r : rows) {
    out << r.p << ',' << r.dofs << ',' << fmt(r.energy_err) << ',' << fmt(r.tilde_err) << ','
        << fmt(r.eta) << ',' << fmt(r.osc) << ','
        << (r.effectivity ? fmt(*r.effectivity) : std::string("nan")) << '\n';
  }
}

void write_adaptive_csv(std::ostream& out, const std::vector<AdaptiveRow>& rows) {
  out << "iter,pmax,dofs,tilde_err,eta,osc\n";
  for (const auto& r : rows) {
    out << r.iter << ',' << r.pmax << ',' << r.dofs << ',' << fmt(r.tilde_err) << ','
        << fmt(r.eta) << ',' << fmt(r.osc) << '\n';
  }
}

void write_degrees_csv(std::ostream& out, const ParallelogramMesh& mesh, const DegreeMap& degrees) {
  out << "element,p,cx,cy\n";
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Point c = mesh.geometry(k).offset();
    out << k << ',' << degrees[k] << ',' << fmt(c.x()) << ',' << fmt(c.y()) << '\n';
  }
}

int run(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const ParallelogramMesh mesh = load_mesh(cfg.mesh);
  const Benchmark bench = make_benchmark(cfg.benchmark, mesh);
  fs::create_directories(cfg.output);
  const fs::path dir(cfg.output);

  std::ostringstream rep;
  rep << "benchmark      " << bench.id << '\n'
      << "mesh           " << cfg.mesh << " (" << mesh.num_elements() << " elements, "
      << mesh.num_vertices() << " vertices, " << mesh.num_edges() << " edges)\n"
      << "delta          " << cfg.delta << " (beta = " << 0.5 + cfg.delta << ")\n"
      << "degrees        p0 = " << cfg.p0 << ", pmax = " << cfg.pmax << "\n";

  RunStatus status = RunStatus::kOk;
  if (cfg.mode == RunMode::kUniform) {
    const SweepResult res = run_uniform_sweep(cfg, mesh, bench);
    std::ofstream(dir / "sweep.csv") << [&] {
      std::ostringstream s;
      write_sweep_csv(s, res.rows);
      return s.str();
    }();
    rep << "mode           uniform sweep\n\n"
        << "   p    dofs    energy_err     tilde_err           eta           osc   effectivity\n";
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : res.rows) {
      rep << std::setw(4) << r.p << std::setw(8) << r.dofs << std::setw(14) << sci(r.energy_err)
          << std::setw(14) << sci(r.tilde_err) << std::setw(14) << sci(r.eta) << std::setw(14)
          << sci(r.osc) << std::setw(14)
          << (r.effectivity ? sci(*r.effectivity) : std::string("degenerate")) << '\n';
      if (r.effectivity) {
        lo = std::min(lo, *r.effectivity);
        hi = std::max(hi, *r.effectivity);
      }
    }
    if (hi > 0.0) rep << "\neffectivity range [" << sci(lo) << ", " << sci(hi) << "], ratio " << sci(hi / lo) << '\n';
    status = res.status;
    if (!res.message.empty()) rep << "status         " << res.message << '\n';
  } else {
    const AdaptiveResult res = run_adaptive(cfg, mesh, bench);
    std::ofstream(dir / "adaptive.csv") << [&] {
      std::ostringstream s;
      write_adaptive_csv(s, res.rows);
      return s.str();
    }();
    std::ofstream(dir / "degrees.csv") << [&] {
      std::ostringstream s;
      write_degrees_csv(s, mesh, res.degrees);
      return s.str();
    }();
    rep << "mode           adaptive (theta = " << cfg.theta << ", +1 degree per mark, |dp| <= 1)\n\n"
        << "iter  pmax    dofs     tilde_err           eta           osc\n";
    for (const auto& r : res.rows) {
      rep << std::setw(4) << r.iter << std::setw(6) << r.pmax << std::setw(8) << r.dofs
          << std::setw(14) << sci(r.tilde_err) << std::setw(14) << sci(r.eta) << std::setw(14)
          << sci(r.osc) << '\n';
    }
    rep << "\nstatus         " << res.message << '\n'
        << "eta sequence   " << (res.eta_monotone ? "non-increasing" : "NOT monotone (flagged)") << '\n';
    if (res.degrees.size() == mesh.num_elements()) {
      rep << "final degrees  min " << res.degrees.min() << ", max " << res.degrees.max() << '\n';
      if (bench.id == "corner-cutoff") {
        const auto [corner, far] = corner_concentration(mesh, res.degrees, Point(0.0, 0.0));
        rep << "corner mean p  " << corner << ", far-field mean p " << far << '\n';
      }
    }
    rep << "note           the adaptive loop is a heuristic; no convergence result backs it\n";
    status = res.status;
  }
  std::ofstream(dir / "report.txt") << rep.str();
  log << rep.str();
  return static_cast<int>(status);
}

}  // namespace pfem
