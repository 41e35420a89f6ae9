#include "commands.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Level-set shape optimization on agglomerated polytopic meshes"};
  app.require_subcommand(1);
  std::string config;

  auto* optimize = app.add_subcommand("optimize", "Run the steepest-descent loop; writes history.csv, VTK and summary.json");
  optimize->add_option("config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  auto* table = app.add_subcommand("convergence-table", "Print the shape-gradient convergence table as CSV");
  table->add_option("config", config, "JSON study configuration")->required()->check(CLI::ExistingFile);
  auto* mesh = app.add_subcommand("export-mesh", "Write the base mesh (text and VTK) and the fitted initial level set");
  mesh->add_option("config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? polyls::cli::kExitOk : polyls::cli::kExitError;
  }

  try {
    if (*optimize) return polyls::cli::run_optimize(config, std::cerr);
    if (*table) return polyls::cli::run_convergence_table(config, std::cout);
    return polyls::cli::run_export_mesh(config, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return polyls::cli::kExitError;
  }
}
