#pragma once

#include "polyls/convergence.hpp"
#include "polyls/optimizer.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace polyls::cli {

/// Config errors carry the JSON pointer of the offending value, e.g. "/time_step/cfl".
class ConfigError : public Error {
public:
  ConfigError(const std::string& pointer, const std::string& message)
      : Error((pointer.empty() ? "/" : pointer) + ": " + message), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

private:
  std::string pointer_;
};

struct OutputOptions {
  /// Relative paths are resolved against $POLYLS_OUTPUT_ROOT, else the working directory.
  std::filesystem::path directory{"output"};
  bool csv{true};
  bool vtk{true};
  /// Write the VTK set of every k-th iteration (1 = all); the final shape is always written.
  int vtk_every{1};
};

struct RunConfig {
  OptimizerConfig optimizer;
  OutputOptions output;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

ConvergenceStudy parse_convergence_config(const std::string& json_text);
ConvergenceStudy load_convergence_config(const std::filesystem::path& path);

std::filesystem::path resolve_output_directory(const std::filesystem::path& directory);

}  // namespace polyls::cli
