#include "polyls/convergence.hpp"
#include "polyls/optimizer.hpp"
#include "run_config.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace polyls;

namespace {

// pybind11 holders cannot point to const objects; the library only ever reads meshes.
using PyMesh = std::shared_ptr<SimplicialMesh>;

PyMesh to_py(const MeshPtr& m) { return std::const_pointer_cast<SimplicialMesh>(m); }
PyMesh own(SimplicialMesh m) { return std::make_shared<SimplicialMesh>(std::move(m)); }

py::array_t<double> vertex_array(const SimplicialMesh& m) {
  py::array_t<double> out({m.num_vertices(), 2});
  auto a = out.mutable_unchecked<2>();
  for (int v = 0; v < m.num_vertices(); ++v) {
    a(v, 0) = m.vertex(v).x();
    a(v, 1) = m.vertex(v).y();
  }
  return out;
}

py::array_t<int> triangle_array(const SimplicialMesh& m) {
  py::array_t<int> out({m.num_triangles(), 3});
  auto a = out.mutable_unchecked<2>();
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) a(t, k) = m.triangles()[t][k];
  }
  return out;
}

SimplicialMesh from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> vertices,
                           py::array_t<int, py::array::c_style | py::array::forcecast> triangles) {
  if (vertices.ndim() != 2 || vertices.shape(1) != 2) throw Error("vertices must have shape (n, 2)");
  if (triangles.ndim() != 2 || triangles.shape(1) != 3) throw Error("triangles must have shape (m, 3)");
  std::vector<Point> pts(vertices.shape(0));
  auto v = vertices.unchecked<2>();
  for (py::ssize_t i = 0; i < vertices.shape(0); ++i) pts[i] = Point(v(i, 0), v(i, 1));
  std::vector<Triangle> tris(triangles.shape(0));
  auto t = triangles.unchecked<2>();
  for (py::ssize_t i = 0; i < triangles.shape(0); ++i) tris[i] = {t(i, 0), t(i, 1), t(i, 2)};
  return SimplicialMesh(std::move(pts), std::move(tris));
}

const char* problem_name(ProblemKind k) { return k == ProblemKind::Unconstrained ? "unconstrained" : "bernoulli"; }

ProblemKind parse_problem(const std::string& s) {
  if (s == "unconstrained") return ProblemKind::Unconstrained;
  if (s == "bernoulli") return ProblemKind::Bernoulli;
  throw Error("problem must be 'unconstrained' or 'bernoulli'");
}

BernoulliStart parse_start(const std::string& s) {
  if (s == "two_holes") return BernoulliStart::TwoHoles;
  if (s == "smiley") return BernoulliStart::Smiley;
  throw Error("start must be 'two_holes' or 'smiley'");
}

}  // namespace

PYBIND11_MODULE(_polyls, m) {
  m.doc() = "Level-set shape optimization with agglomerated polytopic discontinuous Galerkin";

  // Base class first: translators are tried newest first.
  const auto& error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<cli::ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<DegenerateIterate>(m, "DegenerateIterate", error.ptr());

  py::class_<SimplicialMesh, PyMesh>(m, "Mesh")
      .def(py::init(&from_arrays), py::arg("vertices"), py::arg("triangles"))
      .def_static("square", [](int n, double half_width) { return own(square_mesh(n, half_width)); }, py::arg("cells"),
                  py::arg("half_width") = 1.0, "n x n cells, two triangles each, on [-h, h]^2")
      .def_static("disc", [](int rings, double radius) { return own(disc_mesh(rings, radius)); }, py::arg("rings"),
                  py::arg("radius") = 1.0)
      .def_static("disc_with_about", [](int triangles, double radius) { return own(disc_mesh_with_about(triangles, radius)); },
                  py::arg("triangles"), py::arg("radius") = 1.0)
      .def_static("load", [](const std::string& path) { return own(load_mesh_text(path)); }, py::arg("path"))
      .def("save", [](const SimplicialMesh& mesh, const std::string& path) { save_mesh_text(mesh, path); }, py::arg("path"))
      .def_property_readonly("num_vertices", &SimplicialMesh::num_vertices)
      .def_property_readonly("num_triangles", &SimplicialMesh::num_triangles)
      .def_property_readonly("vertices", &vertex_array)
      .def_property_readonly("triangles", &triangle_array)
      .def("__repr__", [](const SimplicialMesh& mesh) {
        return "<Mesh " + std::to_string(mesh.num_vertices()) + " vertices, " + std::to_string(mesh.num_triangles()) +
               " triangles>";
      });

  py::class_<OptimizerConfig>(m, "OptimizerConfig")
      .def_property(
          "problem", [](const OptimizerConfig& c) { return problem_name(c.problem); },
          [](OptimizerConfig& c, const std::string& s) { c.problem = parse_problem(s); })
      .def_property(
          "mesh", [](const OptimizerConfig& c) { return to_py(c.base_mesh); },
          [](OptimizerConfig& c, const PyMesh& mesh) { c.base_mesh = mesh; })
      .def_property(
          "initial", [](const OptimizerConfig& c) { return c.phi0; },
          [](OptimizerConfig& c, std::function<double(const Point&)> f) { c.phi0 = std::move(f); },
          "Initial level set phi0(x) with x a length-2 array; the shape is {phi0 < 0}")
      .def_property(
          "scheme", [](const OptimizerConfig& c) { return c.scheme == TimeScheme::Heun ? "heun" : "ssp_rk3"; },
          [](OptimizerConfig& c, const std::string& s) {
            if (s != "heun" && s != "ssp_rk3") throw Error("scheme must be 'heun' or 'ssp_rk3'");
            c.scheme = s == "heun" ? TimeScheme::Heun : TimeScheme::SspRk3;
          })
      .def_readwrite("degree", &OptimizerConfig::degree)
      .def_readwrite("dt", &OptimizerConfig::dt)
      .def_readwrite("cfl", &OptimizerConfig::cfl)
      .def_readwrite("max_steps", &OptimizerConfig::max_steps)
      .def_readwrite("armijo_c", &OptimizerConfig::armijo_c)
      .def_readwrite("max_iterations", &OptimizerConfig::max_iterations)
      .def_readwrite("elements", &OptimizerConfig::elements)
      .def_readwrite("seed", &OptimizerConfig::seed)
      .def_readwrite("c_sigma", &OptimizerConfig::c_sigma)
      .def_readwrite("quadrature_order", &OptimizerConfig::quadrature_order)
      .def_readwrite("solver_tol", &OptimizerConfig::solver_tol)
      .def_property(
          "eta", [](const OptimizerConfig& c) { return c.bernoulli.eta; },
          [](OptimizerConfig& c, double v) { c.bernoulli.eta = v; })
      .def("set_reference_circle",
           [](OptimizerConfig& c, double r, double cx, double cy) { c.reference = ReferenceCurve::circle(r, Point(cx, cy)); },
           py::arg("radius"), py::arg("cx") = 0.0, py::arg("cy") = 0.0)
      .def("set_reference_two_foci_ovals", [](OptimizerConfig& c) { c.reference = ReferenceCurve::two_foci_ovals(); })
      .def("clear_reference", [](OptimizerConfig& c) { c.reference.reset(); })
      .def_property_readonly("has_reference", [](const OptimizerConfig& c) { return c.reference.has_value(); })
      .def("validate", &OptimizerConfig::validate);

  m.def("unconstrained_setup", &unconstrained_setup);
  m.def("bernoulli_setup", [](const std::string& start) { return bernoulli_setup(parse_start(start)); },
        py::arg("start") = "two_holes");
  m.def("load_run_config", [](const std::string& path) { return cli::load_run_config(path).optimizer; },
        py::arg("path"), "Optimizer part of a JSON run configuration (as read by the command line tool)");
  m.def("parse_run_config", [](const std::string& text) { return cli::parse_run_config(text).optimizer; },
        py::arg("json_text"));
  m.def("two_hole_level_set", [](double x, double y) { return two_hole_level_set(Point(x, y)); });
  m.def("smiley_level_set", [](double x, double y) { return smiley_level_set(Point(x, y)); });

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("iteration", &IterationRecord::iteration)
      .def_readonly("time", &IterationRecord::time)
      .def_readonly("objective", &IterationRecord::objective)
      .def_readonly("grad_norm_sq", &IterationRecord::grad_norm_sq)
      .def_readonly("dt", &IterationRecord::dt)
      .def_readonly("accepted_steps", &IterationRecord::accepted_steps)
      .def_readonly("zls_distance", &IterationRecord::zls_distance)
      .def_readonly("components_inside", &IterationRecord::components_inside)
      .def_readonly("components_outside", &IterationRecord::components_outside)
      .def_readonly("grad_phi_median", &IterationRecord::grad_phi_median)
      .def_readonly("elements", &IterationRecord::elements)
      .def_readonly("wall_seconds", &IterationRecord::wall_seconds);

  py::class_<OptimizationResult>(m, "OptimizationResult")
      .def_readonly("history", &OptimizationResult::history)
      .def_property_readonly("reason", [](const OptimizationResult& r) { return to_string(r.reason); })
      .def_readonly("message", &OptimizationResult::message)
      .def_readonly("time", &OptimizationResult::time)
      .def_readonly("final_objective", &OptimizationResult::final_objective)
      .def_readonly("final_zls_distance", &OptimizationResult::final_zls_distance)
      .def_readonly("final_components_inside", &OptimizationResult::final_components_inside)
      .def_readonly("final_components_outside", &OptimizationResult::final_components_outside)
      .def_readonly("phi_updates", &OptimizationResult::phi_updates)
      .def_readonly("reinitializations", &OptimizationResult::reinitializations);

  m.def(
      "optimize",
      [](const OptimizerConfig& config, std::function<void(const IterationRecord&)> on_iteration) {
        IterationObserver observer;
        if (on_iteration) observer = [&](const IterationArtifacts& a) { on_iteration(a.record); };
        return optimize(config, observer);
      },
      py::arg("config"), py::arg("on_iteration") = nullptr,
      "Runs the steepest-descent loop; `on_iteration(record)` is called after every gradient solve");

  py::class_<ConvergenceStudy>(m, "ConvergenceStudy")
      .def(py::init<>())
      .def_readwrite("half_width", &ConvergenceStudy::half_width)
      .def_readwrite("radius", &ConvergenceStudy::radius)
      .def_readwrite("base_cells", &ConvergenceStudy::base_cells)
      .def_readwrite("reference_refinements", &ConvergenceStudy::reference_refinements)
      .def_readwrite("elements", &ConvergenceStudy::elements)
      .def_readwrite("degrees", &ConvergenceStudy::degrees)
      .def_readwrite("seed", &ConvergenceStudy::seed)
      .def_readwrite("c_sigma", &ConvergenceStudy::c_sigma)
      .def_readwrite("quadrature_order", &ConvergenceStudy::quadrature_order)
      .def_readwrite("solver_tol", &ConvergenceStudy::solver_tol)
      .def("validate", &ConvergenceStudy::validate);

  py::class_<ConvergenceRow>(m, "ConvergenceRow")
      .def_readonly("level", &ConvergenceRow::level)
      .def_readonly("elements", &ConvergenceRow::elements)
      .def_readonly("errors", &ConvergenceRow::errors)
      .def_readonly("rates", &ConvergenceRow::rates);

  py::class_<ConvergenceTable>(m, "ConvergenceTable")
      .def_readonly("fine_triangles", &ConvergenceTable::fine_triangles)
      .def_readonly("reference_triangles", &ConvergenceTable::reference_triangles)
      .def_readonly("degrees", &ConvergenceTable::degrees)
      .def_readonly("rows", &ConvergenceTable::rows);

  m.def("shape_gradient_convergence", &shape_gradient_convergence, py::arg("study"));
  m.def("convergence_rate", &convergence_rate, py::arg("e0"), py::arg("e1"), py::arg("n0"), py::arg("n1"));
}
