#include "commands.hpp"

#include "run_config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace polyls::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string iteration_prefix(int iteration) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "iter_%04d", iteration);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed to write " + path.string());
}

VtkField sign_field(std::span<const Sign> sign) {
  VtkField f{"sign", 1, {}};
  f.values.assign(sign.begin(), sign.end());
  return f;
}

}  // namespace

void write_history_csv(std::span<const IterationRecord> history, std::ostream& out) {
  out << "iteration,n,t,J,grad_norm_sq,m,zls_distance,dt,components_inside,components_outside,elements,"
         "grad_phi_median\r\n";
  for (const IterationRecord& r : history) {
    out << r.iteration << ',' << r.iteration << ',' << num(r.time) << ',' << num(r.objective) << ','
        << num(r.grad_norm_sq) << ',' << r.accepted_steps << ',' << num(r.zls_distance) << ',' << num(r.dt) << ','
        << r.components_inside << ',' << r.components_outside << ',' << r.elements << ',' << num(r.grad_phi_median)
        << "\r\n";
  }
}

void write_convergence_csv(const ConvergenceTable& table, std::ostream& out) {
  out << "i,N";
  for (int p : table.degrees) {
    const char* tag = p == 1 ? "l" : p == 2 ? "q" : nullptr;
    if (!tag) throw Error("convergence table: unexpected degree " + std::to_string(p));
    out << ",err_" << tag << ",rate_" << tag;
  }
  out << "\r\n";
  for (const ConvergenceRow& row : table.rows) {
    out << row.level << ',' << row.elements;
    for (std::size_t k = 0; k < table.degrees.size(); ++k) out << ',' << num(row.errors[k]) << ',' << num(row.rates[k]);
    out << "\r\n";
  }
}

VtkGrid level_set_grid(const FittedMesh& fitted, const ContinuousVectorField* gradient) {
  VtkGrid g = VtkGrid::from_mesh(*fitted.mesh);
  g.title = "polyls level set";
  g.point_data.push_back({"phi", 1, fitted.vertex_phi});
  if (gradient) {
    const int nv = fitted.mesh->num_vertices();
    if (gradient->x.mesh_ptr() != fitted.mesh || gradient->y.mesh_ptr() != fitted.mesh) {
      throw Error("level_set_grid: gradient lives on another mesh");
    }
    VtkField grad{"grad_J", 3, std::vector<double>(3 * static_cast<std::size_t>(nv), 0.0)};
    // Vertex nodes come first in both degrees.
    for (int v = 0; v < nv; ++v) {
      grad.values[3 * v] = gradient->x.values()[v];
      grad.values[3 * v + 1] = gradient->y.values()[v];
    }
    g.point_data.push_back(std::move(grad));
  }
  g.cell_data.push_back(sign_field(fitted.sign));
  return g;
}

VtkGrid partition_grid(const PolytopicMesh& mesh) {
  VtkGrid g = VtkGrid::from_mesh(mesh.fine());
  g.title = "polyls polytopic mesh";
  VtkField part{"partition", 1, {}};
  part.values.assign(mesh.element_of_triangle().begin(), mesh.element_of_triangle().end());
  g.cell_data.push_back(std::move(part));
  const auto& es = mesh.element_sign();
  if (!es.empty()) {
    std::vector<Sign> sign(mesh.fine().num_triangles());
    for (int t = 0; t < mesh.fine().num_triangles(); ++t) sign[t] = es[mesh.element_of(t)];
    g.cell_data.push_back(sign_field(sign));
  }
  return g;
}

VtkGrid state_grid(const BernoulliState& state) {
  const PolytopicMesh& sub = *state.submesh;
  const SimplicialMesh& fine = sub.fine();
  VtkGrid g;
  g.title = "polyls state";
  VtkField u{"u", 1, {}};
  VtkField element{"element", 1, {}};
  for (int t = 0; t < fine.num_triangles(); ++t) {
    const int e = sub.element_of(t);
    std::array<int, 3> tri{};
    for (int k = 0; k < 3; ++k) {
      const Point& p = fine.vertices()[fine.triangles()[t][k]];
      tri[k] = static_cast<int>(g.points.size());
      g.points.push_back(p);
      u.values.push_back(state.u.eval(e, p));
    }
    g.triangles.push_back(tri);
    element.values.push_back(e);
  }
  g.point_data.push_back(std::move(u));
  g.cell_data.push_back(std::move(element));
  return g;
}

FittedMesh fit_level_set(const DgField& phi) {
  FitOptions options;
  options.reject_double_crossings = false;
  return refine_to_fit(recover_nodal_average(phi, -1, BoundaryRule::Average), options);
}

int run_optimize(const fs::path& config_path, std::ostream& log) {
  const RunConfig config = load_run_config(config_path);
  const OutputOptions& out = config.output;
  const fs::path dir = resolve_output_directory(out.directory);
  fs::create_directories(dir);

  IterationObserver observer = [&](const IterationArtifacts& a) {
    const IterationRecord& r = a.record;
    log << "iteration " << r.iteration << "  J = " << num(r.objective) << "  |grad J|^2 = " << num(r.grad_norm_sq)
        << "  zls = " << num(r.zls_distance) << '\n';
    if (!out.vtk || (r.iteration - 1) % out.vtk_every != 0) return;
    const std::string prefix = iteration_prefix(r.iteration);
    write_vtk(level_set_grid(a.fitted, &a.gradient), dir / (prefix + "_levelset.vtk"));
    write_vtk(partition_grid(a.agglomerated), dir / (prefix + "_polytopic.vtk"));
    if (a.state) write_vtk(state_grid(*a.state), dir / (prefix + "_state.vtk"));
  };

  const OptimizationResult result = optimize(config.optimizer, observer);

  if (out.csv) {
    std::ostringstream csv;
    write_history_csv(result.history, csv);
    write_text(dir / "history.csv", csv.str());
  }
  if (out.vtk && result.reason != StopReason::Degenerate) {
    write_vtk(level_set_grid(fit_level_set(result.phi)), dir / "final_levelset.vtk");
  }

  nlohmann::ordered_json summary;
  summary["stop_reason"] = to_string(result.reason);
  summary["message"] = result.message;
  summary["iterations"] = result.history.size();
  summary["pseudo_time"] = result.time;
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
  summary["final_objective"] = finite_or_null(result.final_objective);
  summary["final_zls_distance"] = finite_or_null(result.final_zls_distance);
  summary["final_components_inside"] = result.final_components_inside;
  summary["final_components_outside"] = result.final_components_outside;
  summary["phi_updates"] = result.phi_updates;
  summary["reinitializations"] = result.reinitializations;
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  log << "stopped: " << to_string(result.reason);
  if (!result.message.empty()) log << " (" << result.message << ')';
  log << "\noutput: " << dir.string() << '\n';
  return result.reason == StopReason::Degenerate ? kExitDegenerate : kExitOk;
}

int run_convergence_table(const fs::path& config_path, std::ostream& out) {
  const ConvergenceStudy study = load_convergence_config(config_path);
  write_convergence_csv(shape_gradient_convergence(study), out);
  return kExitOk;
}

int run_export_mesh(const fs::path& config_path, std::ostream& log) {
  const RunConfig config = load_run_config(config_path);
  config.optimizer.validate();
  const fs::path dir = resolve_output_directory(config.output.directory);
  fs::create_directories(dir);
  const MeshPtr& base = config.optimizer.base_mesh;

  std::ostringstream text;
  write_mesh_text(*base, text);
  write_text(dir / "base_mesh.txt", text.str());

  const ContinuousField phi0 = ContinuousField::interpolate(base, 1, config.optimizer.phi0);
  VtkGrid grid = VtkGrid::from_mesh(*base);
  grid.title = "polyls base mesh";
  grid.point_data.push_back({"phi0", 1, std::vector<double>(phi0.vertex_values().begin(), phi0.vertex_values().end())});
  write_vtk(grid, dir / "base_mesh.vtk");

  FitOptions options;
  options.reject_double_crossings = false;
  write_vtk(level_set_grid(refine_to_fit(phi0, options)), dir / "initial_levelset.vtk");

  log << "base mesh: " << base->num_vertices() << " vertices, " << base->num_triangles() << " triangles\n"
      << "output: " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace polyls::cli
