#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mdisp/mesh.hpp"

namespace mdisp {

/// A named scalar attached either to mesh vertices or to triangles.
struct VtkScalar {
  std::string name;
  std::vector<double> values;
};

/// Legacy ASCII VTK unstructured grid of a triangle mesh (z = 0) with
/// vertex and cell scalars. Names must be non-empty without whitespace and
/// each array must match the vertex or triangle count.
void write_vtk(std::ostream& out, const Mesh& mesh, std::span<const VtkScalar> point_data,
               std::span<const VtkScalar> cell_data, const std::string& title = "mdisp fields");

void write_vtk_file(const std::filesystem::path& path, const Mesh& mesh, std::span<const VtkScalar> point_data,
                    std::span<const VtkScalar> cell_data, const std::string& title = "mdisp fields");

}  // namespace mdisp
