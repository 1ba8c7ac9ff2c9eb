// Command line runner: `pfem run --config <file>` and `pfem mesh ...`.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pfem/driver.hpp"
#include "pfem/errors.hpp"
#include "pfem/mesh.hpp"

namespace {

constexpr int kValidationExit = 2;
constexpr int kSolverExit = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-version FEM workbench with a weighted residual estimator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  auto* run = app.add_subcommand("run", "run a uniform sweep or adaptive loop from a config file");
  run->add_option("--config", config_path, "key = value or JSON config")->required();
  run->add_option("--output", output_override, "output directory (overrides the config)");

  std::string mesh_spec = "builtin:lshape:4";
  std::string mesh_out;
  auto* mesh = app.add_subcommand("mesh", "write a builtin mesh as JSON");
  mesh->add_option("--spec", mesh_spec, "builtin:reference | builtin:square:<n> | builtin:lshape:<n>");
  mesh->add_option("--out", mesh_out, "output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationExit;
  }

  try {
    if (*run) {
      pfem::RunConfig cfg = pfem::RunConfig::load(config_path);
      if (!output_override.empty()) cfg.output = output_override;
      return pfem::run(cfg, std::cout);
    }
    const pfem::ParallelogramMesh m = pfem::load_mesh(mesh_spec);
    if (mesh_out.empty()) {
      pfem::write_mesh_json(std::cout, m);
    } else {
      std::ofstream out(mesh_out);
      if (!out) throw pfem::ConfigError("cannot write '" + mesh_out + "'");
      pfem::write_mesh_json(out, m);
    }
    return 0;
  } catch (const pfem::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverExit;
  } catch (const pfem::InconsistencyError& e) {
    std::cerr << "inconsistent estimate: " << e.what() << '\n';
    return kSolverExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationExit;
  }
}
