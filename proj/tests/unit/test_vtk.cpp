#include <doctest.h>

#include "polyls/vtk.hpp"

#include <sstream>

using namespace polyls;

namespace {

VtkGrid two_triangles() {
  VtkGrid g = VtkGrid::from_mesh(square_mesh(1));
  g.title = "unit square";
  VtkField phi{"phi", 1, {}};
  VtkField grad{"grad", 3, {}};
  for (const Point& p : g.points) {
    phi.values.push_back(p.x() / 3.0 - 0.0);
    grad.values.insert(grad.values.end(), {0.1 * p.x(), -p.y() / 7.0, 0.0});
  }
  g.point_data = {phi, grad};
  g.cell_data = {{"sign", 1, {-1.0, 1.0}}};
  return g;
}

std::string text_of(const VtkGrid& g) {
  std::ostringstream out;
  write_vtk(g, out);
  return out.str();
}

}  // namespace

TEST_CASE("vtk round trip keeps every double") {
  const VtkGrid g = two_triangles();
  const std::string text = text_of(g);
  CHECK(text.rfind("# vtk DataFile Version 2.0\nunit square\nASCII\nDATASET UNSTRUCTURED_GRID\n", 0) == 0);
  CHECK(text.find("CELL_TYPES 2\n5\n5\n") != std::string::npos);
  CHECK(text.find("\n-0 ") == std::string::npos);
  CHECK(text.find(" -0\n") == std::string::npos);

  std::istringstream in(text);
  const VtkGrid back = read_vtk(in);
  CHECK(back.title == g.title);
  REQUIRE(back.points.size() == g.points.size());
  for (std::size_t i = 0; i < g.points.size(); ++i) CHECK(back.points[i] == g.points[i]);
  CHECK(back.triangles == g.triangles);
  REQUIRE(back.point_data.size() == 2);
  CHECK(back.point_data[0].values == g.point_data[0].values);
  CHECK(back.point_data[1].components == 3);
  CHECK(back.point_data[1].values == g.point_data[1].values);
  REQUIRE(back.cell_data.size() == 1);
  CHECK(back.cell_data[0].name == "sign");
  CHECK(back.cell_data[0].values == g.cell_data[0].values);
  // Writing what was read gives the same bytes.
  CHECK(text_of(back) == text);
}

TEST_CASE("vtk writer rejects inconsistent grids") {
  VtkGrid g = two_triangles();
  g.cell_data[0].values.pop_back();
  CHECK_THROWS_AS(text_of(g), Error);
  g = two_triangles();
  g.triangles[0][1] = 99;
  CHECK_THROWS_AS(text_of(g), Error);
  g = two_triangles();
  g.point_data[0].name = "two words";
  CHECK_THROWS_AS(text_of(g), Error);
  g = two_triangles();
  g.point_data[1].components = 2;
  CHECK_THROWS_AS(text_of(g), Error);
}

TEST_CASE("vtk reader rejects other datasets") {
  std::istringstream bad_header("not a vtk file\n");
  CHECK_THROWS_AS(read_vtk(bad_header), Error);
  std::istringstream binary("# vtk DataFile Version 2.0\nx\nBINARY\n");
  CHECK_THROWS_AS(read_vtk(binary), Error);
  std::string text = text_of(two_triangles());
  text.resize(text.size() / 2);
  std::istringstream truncated(text);
  CHECK_THROWS_AS(read_vtk(truncated), Error);
}
