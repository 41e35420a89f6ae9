#pragma once

#include "polyls/mesh.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace polyls {

/// Named data array; `values` holds components() entries per point or cell.
struct VtkField {
  std::string name;
  int components{1};  ///< 1 (SCALARS) or 3 (VECTORS)
  std::vector<double> values;
};

/// Triangle grid with point and cell data, the subset of legacy VTK that we read and write.
struct VtkGrid {
  std::string title{"polyls"};
  std::vector<Point> points;
  std::vector<std::array<int, 3>> triangles;
  std::vector<VtkField> point_data;
  std::vector<VtkField> cell_data;

  static VtkGrid from_mesh(const SimplicialMesh& mesh);
  /// Throws Error when a field has the wrong length or an index is out of range.
  void check() const;
};

/// Legacy ASCII "DataFile Version 2.0" unstructured grid. Numbers are printed with %.17g,
/// so equal inputs give byte-identical files and a read returns the same doubles.
void write_vtk(const VtkGrid& grid, std::ostream& out);
void write_vtk(const VtkGrid& grid, const std::filesystem::path& path);

VtkGrid read_vtk(std::istream& in);
VtkGrid read_vtk(const std::filesystem::path& path);

}  // namespace polyls
