#include "polyls/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace polyls {

namespace {

constexpr int kVtkTriangle = 5;

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);  // no "-0"
  out << buf;
}

void write_fields(std::ostream& out, const std::vector<VtkField>& fields) {
  for (const VtkField& f : fields) {
    if (f.components == 1) {
      out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : f.values) {
        put(out, v);
        out << '\n';
      }
    } else {
      out << "VECTORS " << f.name << " double\n";
      for (std::size_t i = 0; i < f.values.size(); i += 3) {
        put(out, f.values[i]);
        out << ' ';
        put(out, f.values[i + 1]);
        out << ' ';
        put(out, f.values[i + 2]);
        out << '\n';
      }
    }
  }
}

std::string expect_word(std::istream& in, const char* what) {
  std::string w;
  if (!(in >> w)) throw Error(std::string("vtk: unexpected end of file, expected ") + what);
  return w;
}

std::size_t expect_count(std::istream& in, const char* what) {
  long long n = -1;
  if (!(in >> n) || n < 0) throw Error(std::string("vtk: bad count for ") + what);
  return static_cast<std::size_t>(n);
}

void read_fields(std::istream& in, std::size_t count, std::vector<VtkField>& out, std::string& next) {
  next.clear();
  std::string word;
  while (in >> word) {
    if (word == "POINT_DATA" || word == "CELL_DATA") {
      next = word;
      return;
    }
    VtkField f;
    if (word == "SCALARS") {
      std::string type;
      int comps = 1;
      in >> f.name >> type;
      // The component count is optional; LOOKUP_TABLE follows either way.
      std::string tok = expect_word(in, "LOOKUP_TABLE");
      if (tok != "LOOKUP_TABLE") {
        comps = std::stoi(tok);
        tok = expect_word(in, "LOOKUP_TABLE");
      }
      if (comps != 1 || tok != "LOOKUP_TABLE") throw Error("vtk: only single-component SCALARS are supported");
      expect_word(in, "lookup table name");
      f.components = 1;
    } else if (word == "VECTORS") {
      std::string type;
      in >> f.name >> type;
      f.components = 3;
    } else {
      throw Error("vtk: unsupported section " + word);
    }
    f.values.resize(count * static_cast<std::size_t>(f.components));
    for (double& v : f.values) {
      if (!(in >> v)) throw Error("vtk: truncated data for field " + f.name);
    }
    out.push_back(std::move(f));
  }
}

}  // namespace

VtkGrid VtkGrid::from_mesh(const SimplicialMesh& mesh) {
  VtkGrid g;
  g.points = mesh.vertices();
  g.triangles.assign(mesh.triangles().begin(), mesh.triangles().end());
  return g;
}

void VtkGrid::check() const {
  const std::size_t np = points.size();
  for (const auto& t : triangles) {
    for (int v : t) {
      if (v < 0 || static_cast<std::size_t>(v) >= np) throw Error("vtk: triangle references a missing point");
    }
  }
  auto check_fields = [](const std::vector<VtkField>& fields, std::size_t n, const char* where) {
    for (const VtkField& f : fields) {
      if (f.name.empty() || f.name.find_first_of(" \t\n") != std::string::npos) {
        throw Error("vtk: field names must be non-empty words");
      }
      if (f.components != 1 && f.components != 3) throw Error("vtk: field " + f.name + " must have 1 or 3 components");
      if (f.values.size() != n * static_cast<std::size_t>(f.components)) {
        throw Error("vtk: " + std::string(where) + " field " + f.name + " has the wrong length");
      }
    }
  };
  check_fields(point_data, np, "point");
  check_fields(cell_data, triangles.size(), "cell");
}

void write_vtk(const VtkGrid& grid, std::ostream& out) {
  grid.check();
  out << "# vtk DataFile Version 2.0\n" << (grid.title.empty() ? "polyls" : grid.title) << "\nASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << grid.points.size() << " double\n";
  for (const Point& p : grid.points) {
    put(out, p.x());
    out << ' ';
    put(out, p.y());
    out << " 0\n";
  }
  out << "CELLS " << grid.triangles.size() << ' ' << 4 * grid.triangles.size() << '\n';
  for (const auto& t : grid.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << grid.triangles.size() << '\n';
  for (std::size_t i = 0; i < grid.triangles.size(); ++i) out << kVtkTriangle << '\n';
  if (!grid.point_data.empty()) {
    out << "POINT_DATA " << grid.points.size() << '\n';
    write_fields(out, grid.point_data);
  }
  if (!grid.cell_data.empty()) {
    out << "CELL_DATA " << grid.triangles.size() << '\n';
    write_fields(out, grid.cell_data);
  }
}

void write_vtk(const VtkGrid& grid, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_vtk(grid, buf);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << buf.str();
  if (!out) throw Error("failed to write " + path.string());
}

VtkGrid read_vtk(std::istream& in) {
  VtkGrid g;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0) throw Error("vtk: missing header");
  if (!std::getline(in, g.title)) throw Error("vtk: missing title");
  std::string word = expect_word(in, "ASCII");
  if (word != "ASCII") throw Error("vtk: only ASCII files are supported");
  if (expect_word(in, "DATASET") != "DATASET" || expect_word(in, "UNSTRUCTURED_GRID") != "UNSTRUCTURED_GRID") {
    throw Error("vtk: only unstructured grids are supported");
  }
  if (expect_word(in, "POINTS") != "POINTS") throw Error("vtk: POINTS section expected");
  g.points.resize(expect_count(in, "POINTS"));
  expect_word(in, "point type");
  for (Point& p : g.points) {
    double z = 0.0;
    if (!(in >> p.x() >> p.y() >> z)) throw Error("vtk: truncated point list");
  }
  if (expect_word(in, "CELLS") != "CELLS") throw Error("vtk: CELLS section expected");
  g.triangles.resize(expect_count(in, "CELLS"));
  expect_count(in, "CELLS size");
  for (auto& t : g.triangles) {
    int n = 0;
    if (!(in >> n >> t[0] >> t[1] >> t[2]) || n != 3) throw Error("vtk: only triangle cells are supported");
  }
  if (expect_word(in, "CELL_TYPES") != "CELL_TYPES") throw Error("vtk: CELL_TYPES section expected");
  if (expect_count(in, "CELL_TYPES") != g.triangles.size()) throw Error("vtk: CELL_TYPES count mismatch");
  for (std::size_t i = 0; i < g.triangles.size(); ++i) {
    int type = 0;
    if (!(in >> type) || type != kVtkTriangle) throw Error("vtk: only triangle cells are supported");
  }
  std::string section;
  in >> section;
  while (!section.empty() && in) {
    const std::size_t n = expect_count(in, section.c_str());
    if (section == "POINT_DATA") {
      if (n != g.points.size()) throw Error("vtk: POINT_DATA count mismatch");
      read_fields(in, n, g.point_data, section);
    } else if (section == "CELL_DATA") {
      if (n != g.triangles.size()) throw Error("vtk: CELL_DATA count mismatch");
      read_fields(in, n, g.cell_data, section);
    } else {
      throw Error("vtk: unsupported section " + section);
    }
  }
  g.check();
  return g;
}

VtkGrid read_vtk(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_vtk(in);
}

}  // namespace polyls
