#include "run_config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

namespace polyls::cli {

namespace {

using json = nlohmann::json;

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

/// One JSON object being read; remembers which keys were consumed so that
/// finish() can reject the rest.
class ObjectReader {
public:
  ObjectReader(const json& j, std::string pointer) : j_(j), pointer_(std::move(pointer)) {
    if (!j_.is_object()) throw ConfigError(pointer_, "expected an object");
  }

  std::string at(const std::string& key) const { return pointer_ + "/" + escape_pointer_token(key); }

  const json* get(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double fallback, const std::function<bool(double)>& ok = {},
                const char* range = "") {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(at(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x) || (ok && !ok(x))) throw ConfigError(at(key), std::string("must be ") + range);
    return x;
  }

  long long integer(const std::string& key, long long fallback, long long lo, long long hi) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
    const long long x = v->is_number_unsigned() ? static_cast<long long>(v->get<unsigned long long>())
                                                : v->get<long long>();
    if (x < lo || x > hi) {
      throw ConfigError(at(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return x;
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
    return v->get<bool>();
  }

  std::string choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed) {
    const json* v = get(key);
    if (!v) {
      if (fallback.empty()) throw ConfigError(at(key), "is required");
      return fallback;
    }
    if (!v->is_string()) throw ConfigError(at(key), "expected a string");
    const std::string s = v->get<std::string>();
    for (const auto& a : allowed) {
      if (s == a) return s;
    }
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError(at(key), "must be one of " + list);
  }

  Point point(const std::string& key, const Point& fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
      throw ConfigError(at(key), "expected [x, y]");
    }
    return {(*v)[0].get<double>(), (*v)[1].get<double>()};
  }

  std::vector<int> integers(const std::string& key, const std::vector<int>& fallback, int lo) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_array() || v->empty()) throw ConfigError(at(key), "expected a non-empty array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      const std::string where = at(key) + "/" + std::to_string(i);
      if (!e.is_number_integer()) throw ConfigError(where, "expected an integer");
      const long long x = e.get<long long>();
      if (x < lo || x > 1000000) throw ConfigError(where, "must lie in [" + std::to_string(lo) + ", 1000000]");
      out.push_back(static_cast<int>(x));
    }
    return out;
  }

  /// Sub-object reader, or nullopt when the key is absent.
  std::optional<ObjectReader> object(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    return ObjectReader(*v, at(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(at(it.key()), "unknown key");
    }
  }

private:
  const json& j_;
  std::string pointer_;
  std::set<std::string> used_;
};

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const auto positive = [](double x) { return x > 0.0; };

void read_mesh(ObjectReader& r, OptimizerConfig& c, const std::filesystem::path& base_dir) {
  const std::string shape = r.choice("shape", "", {"square", "disc", "file"});
  if (shape == "square") {
    const int cells = static_cast<int>(r.integer("cells", 30, 1, 2000));
    const double half = r.number("half_width", 1.0, positive, "positive");
    c.base_mesh = std::make_shared<const SimplicialMesh>(square_mesh(cells, half));
  } else if (shape == "disc") {
    const double radius = r.number("radius", 1.0, positive, "positive");
    if (r.has("rings") && r.has("triangles")) throw ConfigError(r.at("rings"), "give either rings or triangles");
    const int rings = static_cast<int>(r.integer("rings", 0, 1, 1000));
    const int triangles = static_cast<int>(r.integer("triangles", 2085, 6, 6000000));
    c.base_mesh = std::make_shared<const SimplicialMesh>(rings > 0 ? disc_mesh(rings, radius)
                                                                   : disc_mesh_with_about(triangles, radius));
  } else {
    const json* p = r.get("path");
    if (!p || !p->is_string()) throw ConfigError(r.at("path"), "expected a mesh file path");
    std::filesystem::path file = p->get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    std::ifstream in(file);
    if (!in) throw ConfigError(r.at("path"), "cannot open " + file.string());
    try {
      c.base_mesh = std::make_shared<const SimplicialMesh>(read_mesh_text(in));
    } catch (const Error& e) {
      throw ConfigError(r.at("path"), e.what());
    }
  }
  r.finish();
}

void read_initial(ObjectReader& r, OptimizerConfig& c) {
  const std::string shape = r.choice("shape", "", {"disc", "two_holes", "smiley"});
  if (shape == "disc") {
    const double radius = r.number("radius", 0.51, positive, "positive");
    const Point center = r.point("center", Point::Zero());
    c.phi0 = [radius, center](const Point& x) { return (x - center).norm() - radius; };
  } else if (shape == "two_holes") {
    c.phi0 = two_hole_level_set;
  } else {
    c.phi0 = smiley_level_set;
  }
  r.finish();
}

void read_reference(ObjectReader& r, OptimizerConfig& c) {
  const std::string shape = r.choice("shape", "", {"none", "circle", "two_foci_ovals"});
  if (shape == "none") {
    c.reference.reset();
  } else if (shape == "circle") {
    const double radius = r.number("radius", 0.55, positive, "positive");
    c.reference = ReferenceCurve::circle(radius, r.point("center", Point::Zero()));
  } else {
    c.reference = ReferenceCurve::two_foci_ovals();
  }
  r.finish();
}

void read_time_step(ObjectReader& r, OptimizerConfig& c) {
  const std::string mode = r.choice("mode", "", {"fixed", "cfl"});
  if (mode == "fixed") {
    const json* dt = r.get("dt");
    if (!dt) throw ConfigError(r.at("dt"), "is required in fixed mode");
    c.dt = r.number("dt", c.dt, positive, "positive");
    c.cfl = 0.0;
  } else {
    const json* cfl = r.get("cfl");
    if (!cfl) throw ConfigError(r.at("cfl"), "is required in cfl mode");
    c.cfl = r.number("cfl", c.cfl, [](double x) { return x > 0.0 && x <= 1.0; }, "in (0, 1]");
  }
  r.finish();
}

}  // namespace

static RunConfig parse_run_config_at(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(text);
  ObjectReader r(doc, "");
  RunConfig rc;
  const std::string problem = r.choice("problem", "", {"unconstrained", "bernoulli"});
  rc.optimizer = problem == "unconstrained" ? unconstrained_setup() : bernoulli_setup();
  OptimizerConfig& c = rc.optimizer;

  if (auto m = r.object("mesh")) read_mesh(*m, c, base_dir);
  if (auto m = r.object("initial")) read_initial(*m, c);
  if (auto m = r.object("reference")) read_reference(*m, c);
  if (auto m = r.object("time_step")) read_time_step(*m, c);
  if (auto m = r.object("bernoulli")) {
    if (problem != "bernoulli") throw ConfigError(r.at("bernoulli"), "only valid for the bernoulli problem");
    c.bernoulli.eta = m->number("eta", c.bernoulli.eta, positive, "positive");
    c.bernoulli.fixed_value = m->number("fixed_value", c.bernoulli.fixed_value);
    c.bernoulli.free_value = m->number("free_value", c.bernoulli.free_value);
    m->finish();
  }
  c.degree = static_cast<int>(r.integer("degree", c.degree, 1, 2));
  c.scheme = r.choice("scheme", "heun", {"heun", "ssp_rk3"}) == "heun" ? TimeScheme::Heun : TimeScheme::SspRk3;
  c.max_steps = static_cast<int>(r.integer("max_steps", c.max_steps, 5, 100000));
  c.armijo_c = r.number("armijo_c", c.armijo_c, [](double x) { return x > 0.0 && x < 1.0; }, "in (0, 1)");
  c.max_iterations = static_cast<int>(r.integer("max_iterations", c.max_iterations, 1, 100000));
  c.elements = static_cast<int>(r.integer("elements", c.elements, 2, 10000000));
  c.seed = static_cast<std::uint64_t>(r.integer("seed", static_cast<long long>(c.seed), 0, (1LL << 62)));
  c.c_sigma = r.number("c_sigma", c.c_sigma, positive, "positive");
  c.quadrature_order = static_cast<int>(r.integer("quadrature_order", c.quadrature_order, 1, 20));
  c.solver_tol = r.number("solver_tol", c.solver_tol, [](double x) { return x > 0.0 && x < 1.0; }, "in (0, 1)");

  if (auto o = r.object("output")) {
    const json* dir = o->get("directory");
    if (dir) {
      if (!dir->is_string() || dir->get<std::string>().empty()) {
        throw ConfigError(o->at("directory"), "expected a non-empty path");
      }
      rc.output.directory = dir->get<std::string>();
    }
    rc.output.csv = o->boolean("csv", rc.output.csv);
    rc.output.vtk = o->boolean("vtk", rc.output.vtk);
    rc.output.vtk_every = static_cast<int>(o->integer("vtk_every", rc.output.vtk_every, 1, 1000000));
    o->finish();
  }
  r.finish();
  c.validate();
  return rc;
}

RunConfig parse_run_config(const std::string& json_text) { return parse_run_config_at(json_text, "."); }

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config_at(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

ConvergenceStudy parse_convergence_config(const std::string& json_text) {
  const json doc = parse_json(json_text);
  ObjectReader r(doc, "");
  ConvergenceStudy s;
  s.radius = r.number("radius", s.radius, positive, "positive");
  s.half_width = r.number("half_width", s.half_width, positive, "positive");
  if (!(s.radius < s.half_width)) throw ConfigError(r.at("radius"), "must be smaller than half_width");
  s.base_cells = static_cast<int>(r.integer("base_cells", s.base_cells, 2, 2000));
  s.reference_refinements = static_cast<int>(r.integer("reference_refinements", s.reference_refinements, 0, 3));
  s.elements = r.integers("elements", s.elements, 2);
  s.seed = static_cast<std::uint64_t>(r.integer("seed", static_cast<long long>(s.seed), 0, (1LL << 62)));
  s.c_sigma = r.number("c_sigma", s.c_sigma, positive, "positive");
  s.quadrature_order = static_cast<int>(r.integer("quadrature_order", s.quadrature_order, 1, 20));
  s.solver_tol = r.number("solver_tol", s.solver_tol, [](double x) { return x > 0.0 && x < 1.0; }, "in (0, 1)");
  r.finish();
  s.degrees = {1, 2};
  s.validate();
  return s;
}

ConvergenceStudy load_convergence_config(const std::filesystem::path& path) {
  return parse_convergence_config(read_file(path));
}

std::filesystem::path resolve_output_directory(const std::filesystem::path& directory) {
  if (directory.is_absolute()) return directory;
  const char* root = std::getenv("POLYLS_OUTPUT_ROOT");
  if (root && *root) return std::filesystem::path(root) / directory;
  return directory;
}

}  // namespace polyls::cli
