#include "mdisp/vtk.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace mdisp {

namespace {

void check_scalars(std::span<const VtkScalar> data, std::size_t expected, const char* where) {
  for (const auto& s : data) {
    if (s.name.empty() || std::any_of(s.name.begin(), s.name.end(), [](unsigned char ch) { return std::isspace(ch); }))
      throw std::invalid_argument(std::string("write_vtk: invalid ") + where + " name '" + s.name + "'");
    if (s.values.size() != expected)
      throw std::invalid_argument(std::string("write_vtk: ") + where + " '" + s.name + "' has " +
                                  std::to_string(s.values.size()) + " values, expected " + std::to_string(expected));
  }
}

void write_scalars(std::ostream& out, std::span<const VtkScalar> data) {
  for (const auto& s : data) {
    out << "SCALARS " << s.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : s.values) out << v << '\n';
  }
}

}  // namespace

void write_vtk(std::ostream& out, const Mesh& mesh, std::span<const VtkScalar> point_data,
               std::span<const VtkScalar> cell_data, const std::string& title) {
  check_scalars(point_data, mesh.vertex_count(), "point scalar");
  check_scalars(cell_data, mesh.triangle_count(), "cell scalar");
  if (title.find('\n') != std::string::npos) throw std::invalid_argument("write_vtk: title must be one line");

  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(std::numeric_limits<double>::max_digits10);

  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertex_count() << " double\n";
  for (const auto& v : mesh.vertices) out << v.x << ' ' << v.y << " 0\n";

  const std::size_t nt = mesh.triangle_count();
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (std::size_t t = 0; t < nt; ++t) out << "5\n";  // VTK_TRIANGLE

  if (!point_data.empty()) {
    out << "POINT_DATA " << mesh.vertex_count() << '\n';
    write_scalars(out, point_data);
  }
  if (!cell_data.empty()) {
    out << "CELL_DATA " << nt << '\n';
    write_scalars(out, cell_data);
  }
  out.flags(flags);
  out.precision(precision);
}

void write_vtk_file(const std::filesystem::path& path, const Mesh& mesh, std::span<const VtkScalar> point_data,
                    std::span<const VtkScalar> cell_data, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_vtk(out, mesh, point_data, cell_data, title);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace mdisp
