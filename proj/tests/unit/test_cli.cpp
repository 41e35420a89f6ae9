#include <doctest.h>

#include "commands.hpp"
#include "run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace polyls;
using namespace polyls::cli;

namespace fs = std::filesystem;

namespace {

std::string error_pointer(const std::string& json_text) {
  try {
    parse_run_config(json_text);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<no error>";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Fresh scratch directory below the system temp dir.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("polyls_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kSmallRun = R"({
  "problem": "unconstrained",
  "mesh": {"shape": "square", "cells": 10},
  "initial": {"shape": "disc", "radius": 0.51},
  "reference": {"shape": "two_foci_ovals"},
  "time_step": {"mode": "cfl", "cfl": 0.1},
  "max_steps": 20,
  "max_iterations": 3,
  "elements": 30,
  "output": {"directory": "run", "vtk_every": 2}
})";

}  // namespace

TEST_CASE("run config: defaults come from the matching setup") {
  const RunConfig u = parse_run_config(R"({"problem": "unconstrained"})");
  CHECK(u.optimizer.problem == ProblemKind::Unconstrained);
  CHECK(u.optimizer.cfl == doctest::Approx(0.05));
  CHECK(u.optimizer.max_steps == 150);
  CHECK(u.optimizer.base_mesh->num_triangles() == 1800);
  CHECK(u.output.csv);

  const RunConfig b = parse_run_config(R"({"problem": "bernoulli", "initial": {"shape": "smiley"}})");
  CHECK(b.optimizer.problem == ProblemKind::Bernoulli);
  CHECK(b.optimizer.dt == doctest::Approx(1e-3));
  CHECK(b.optimizer.cfl == 0.0);
  CHECK(b.optimizer.phi0(Point(0.0, 0.0)) == doctest::Approx(smiley_level_set(Point(0.0, 0.0))));
}

TEST_CASE("run config: values are read where given") {
  const RunConfig c = parse_run_config(R"({
    "problem": "unconstrained", "mesh": {"shape": "square", "cells": 6, "half_width": 2},
    "time_step": {"mode": "fixed", "dt": 0.004}, "scheme": "ssp_rk3", "degree": 1,
    "armijo_c": 0.2, "seed": 7, "output": {"directory": "x", "csv": false, "vtk": false}})");
  CHECK(c.optimizer.base_mesh->num_triangles() == 72);
  CHECK(c.optimizer.dt == 0.004);
  CHECK(c.optimizer.cfl == 0.0);
  CHECK(c.optimizer.scheme == TimeScheme::SspRk3);
  CHECK(c.optimizer.degree == 1);
  CHECK(c.optimizer.armijo_c == 0.2);
  CHECK(c.optimizer.seed == 7);
  CHECK_FALSE(c.output.csv);
  CHECK_FALSE(c.output.vtk);
}

TEST_CASE("run config: errors name the offending value") {
  CHECK(error_pointer(R"({"problem": "unconstrained", "armijo_c": 1.5})") == "/armijo_c");
  CHECK(error_pointer(R"({"problem": "unconstrained", "colour": 1})") == "/colour");
  CHECK(error_pointer(R"({})") == "/problem");
  CHECK(error_pointer(R"({"problem": "elastic"})") == "/problem");
  CHECK(error_pointer(R"({"problem": "unconstrained", "time_step": {"mode": "cfl", "cfl": 0}})") == "/time_step/cfl");
  CHECK(error_pointer(R"({"problem": "unconstrained", "mesh": {"shape": "square", "cells": 0}})") == "/mesh/cells");
  CHECK(error_pointer(R"({"problem": "unconstrained", "initial": {"shape": "disc", "center": [1]}})") ==
        "/initial/center");
  CHECK(error_pointer(R"({"problem": "unconstrained", "max_steps": 4})") == "/max_steps");
  CHECK(error_pointer(R"({"problem": "unconstrained", "degree": 2.5})") == "/degree");
  CHECK(error_pointer(R"({"problem": "unconstrained", "output": {"vtk": "yes"}})") == "/output/vtk");
  CHECK(error_pointer(R"({"problem": "unconstrained", "bernoulli": {"eta": 1}})") == "/bernoulli");
  CHECK(error_pointer("{not json") == "");
  CHECK(error_pointer("[1, 2]") == "");
}

TEST_CASE("convergence config") {
  const ConvergenceStudy s = parse_convergence_config(R"({"elements": [4, 16], "base_cells": 20})");
  CHECK(s.elements == std::vector<int>{4, 16});
  CHECK(s.base_cells == 20);
  CHECK(s.radius == doctest::Approx(0.52));
  try {
    parse_convergence_config(R"({"elements": [4, "x"]})");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(e.pointer() == "/elements/1");
  }
}

TEST_CASE("history and convergence CSV layout") {
  IterationRecord r;
  r.iteration = 3;
  r.time = 0.5;
  r.objective = -0.25;
  r.grad_norm_sq = 1e-3;
  r.dt = 0.001;
  r.accepted_steps = 10;
  r.zls_distance = 0.125;
  r.components_inside = 1;
  r.components_outside = 2;
  r.elements = 200;
  r.grad_phi_median = 1.0;
  std::ostringstream out;
  const IterationRecord rows[] = {r};
  write_history_csv(rows, out);
  CHECK(out.str() ==
        "iteration,n,t,J,grad_norm_sq,m,zls_distance,dt,components_inside,components_outside,elements,"
        "grad_phi_median\r\n3,3,0.5,-0.25,0.001,10,0.125,0.001,1,2,200,1\r\n");

  ConvergenceTable t;
  t.degrees = {1, 2};
  t.rows.push_back({1, 4, {0.5, 0.25}, {std::nan(""), std::nan("")}});
  t.rows.push_back({2, 16, {0.25, 0.0625}, {-0.5, -1.0}});
  std::ostringstream csv;
  write_convergence_csv(t, csv);
  CHECK(csv.str() == "i,N,err_l,rate_l,err_q,rate_q\r\n1,4,0.5,,0.25,\r\n2,16,0.25,-0.5,0.0625,-1\r\n");
}

TEST_CASE("optimize command writes history, VTK and summary, and repeats byte for byte") {
  const fs::path dir = scratch("optimize");
  const fs::path config = dir / "small.json";
  std::ofstream(config) << kSmallRun;
  setenv("POLYLS_OUTPUT_ROOT", (dir / "a").c_str(), 1);
  std::ostringstream log;
  CHECK(run_optimize(config, log) == kExitOk);
  setenv("POLYLS_OUTPUT_ROOT", (dir / "b").c_str(), 1);
  CHECK(run_optimize(config, log) == kExitOk);
  unsetenv("POLYLS_OUTPUT_ROOT");

  const fs::path a = dir / "a" / "run";
  const fs::path b = dir / "b" / "run";
  const std::string history = slurp(a / "history.csv");
  CHECK(history == slurp(b / "history.csv"));
  CHECK(history.rfind("iteration,n,t,J,", 0) == 0);
  CHECK(fs::exists(a / "summary.json"));
  CHECK(fs::exists(a / "final_levelset.vtk"));
  REQUIRE(fs::exists(a / "iter_0001_levelset.vtk"));
  CHECK_FALSE(fs::exists(a / "iter_0002_levelset.vtk"));
  CHECK(slurp(a / "iter_0001_levelset.vtk") == slurp(b / "iter_0001_levelset.vtk"));

  const VtkGrid ls = read_vtk(a / "iter_0001_levelset.vtk");
  REQUIRE(ls.point_data.size() == 2);
  CHECK(ls.point_data[0].name == "phi");
  CHECK(ls.point_data[1].name == "grad_J");
  CHECK(ls.cell_data[0].name == "sign");
  const VtkGrid part = read_vtk(a / "iter_0001_polytopic.vtk");
  CHECK(part.cell_data[0].name == "partition");
  double max_id = 0.0;
  for (double id : part.cell_data[0].values) max_id = std::max(max_id, id);
  CHECK(max_id == 29.0);
}

TEST_CASE("optimize command reports a degenerate start with exit code 2") {
  const fs::path dir = scratch("degenerate");
  const fs::path config = dir / "empty.json";
  std::ofstream(config) << R"({"problem": "unconstrained", "mesh": {"shape": "square", "cells": 6},
    "initial": {"shape": "disc", "radius": 0.001, "center": [0.5, 0.5]},
    "output": {"directory": ")" << (dir / "out").string() << R"("}})";
  std::ostringstream log;
  CHECK(run_optimize(config, log) == kExitDegenerate);
  CHECK(fs::exists(dir / "out" / "summary.json"));
}

TEST_CASE("export-mesh writes a readable base mesh") {
  const fs::path dir = scratch("export");
  const fs::path config = dir / "mesh.json";
  std::ofstream(config) << R"({"problem": "bernoulli", "mesh": {"shape": "disc", "rings": 4},
    "output": {"directory": ")" << (dir / "out").string() << R"("}})";
  std::ostringstream log;
  CHECK(run_export_mesh(config, log) == kExitOk);
  const SimplicialMesh mesh = load_mesh_text((dir / "out" / "base_mesh.txt").string());
  const VtkGrid grid = read_vtk(dir / "out" / "base_mesh.vtk");
  CHECK(grid.points.size() == static_cast<std::size_t>(mesh.num_vertices()));
  CHECK(grid.triangles.size() == static_cast<std::size_t>(mesh.num_triangles()));
  CHECK(fs::exists(dir / "out" / "initial_levelset.vtk"));
}
