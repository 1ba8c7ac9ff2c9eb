#ifndef PFEM_DRIVER_HPP_
#define PFEM_DRIVER_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfem/estimator.hpp"
#include "pfem/mesh.hpp"
#include "pfem/problems.hpp"

namespace pfem {

enum class RunMode { kUniform, kAdaptive };

/**
 * @brief Benchmark run description.
 *
 * Text form is `key = value` per line with `#` comments; a JSON object with
 * the same keys is accepted too. `mesh` is a mesh JSON path (relative paths
 * resolve against the config file) or one of `builtin:reference`,
 * `builtin:square:<n>` (unit square, n x n cells) and `builtin:lshape:<n>`
 * (L-shape with cells of side 1/n).
 */
struct RunConfig {
  std::string mesh;
  std::string benchmark;
  double delta = 0.1;
  int p0 = 2;
  int pmax = 12;
  RunMode mode = RunMode::kUniform;
  double theta = 0.5;
  std::string output = ".";
  int quad_boost = 3;
  int load_boost = 4;
  double target_eta = 1e-8;

  /// Throws ConfigError on out-of-range values.
  void validate() const;

  static RunConfig parse(std::istream& in, const std::string& base_dir = ".");
  static RunConfig load(const std::string& path);
};

ParallelogramMesh load_mesh(const std::string& spec);

struct SweepRow {
  int p = 0;
  int dofs = 0;
  double energy_err = 0.0;
  double tilde_err = 0.0;
  double eta = 0.0;
  double osc = 0.0;
  std::optional<double> effectivity;
};

struct AdaptiveRow {
  int iter = 0;
  int pmax = 0;
  int dofs = 0;
  double tilde_err = 0.0;
  double eta = 0.0;
  double osc = 0.0;
};

enum class RunStatus { kOk = 0, kSolverFailure = 3, kStagnation = 4 };

struct SweepResult {
  std::vector<SweepRow> rows;
  RunStatus status = RunStatus::kOk;
  std::string message;
};

struct AdaptiveResult {
  std::vector<AdaptiveRow> rows;
  DegreeMap degrees;
  RunStatus status = RunStatus::kOk;
  bool reached_target = false;
  bool eta_monotone = true;
  std::string message;
};

/// Smallest prefix of the elements sorted by eta_K^2 (descending, ties by
/// index) carrying theta^2 of the total. theta >= 1 marks everything.
std::vector<int> dorfler_mark(const std::vector<double>& eta_sq, double theta);

SweepResult run_uniform_sweep(const RunConfig& cfg, const ParallelogramMesh& mesh,
                              const Benchmark& bench);
AdaptiveResult run_adaptive(const RunConfig& cfg, const ParallelogramMesh& mesh,
                            const Benchmark& bench);

/// Mean degree over elements touching `corner` and over the elements sharing
/// no vertex with those.
std::pair<double, double> corner_concentration(const ParallelogramMesh& mesh,
                                               const DegreeMap& degrees, const Point& corner);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_adaptive_csv(std::ostream& out, const std::vector<AdaptiveRow>& rows);
void write_degrees_csv(std::ostream& out, const ParallelogramMesh& mesh, const DegreeMap& degrees);

/// Full run: writes sweep.csv or adaptive.csv (+ degrees.csv), and report.txt
/// into cfg.output. Returns the process exit code (0, 3 or 4); validation
/// problems surface as exceptions.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace pfem

#endif  // PFEM_DRIVER_HPP_
