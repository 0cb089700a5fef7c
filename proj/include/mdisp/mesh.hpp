#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdisp/geometry.hpp"

namespace mdisp {

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

/// Boundary edge (v[0] -> v[1]) in the counterclockwise orientation of its
/// owning triangle; `normal` is the unit outward normal of the straight edge.
struct BoundaryEdge {
  std::array<int, 2> v{};
  int triangle = -1;
  Vec2 normal;
};

/// Conforming triangulation with a polygonal boundary.
///
/// Triangles are counterclockwise. For generated disk meshes `circle` records
/// the domain the polygon approximates and `h_nominal` is 1/M.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::optional<Circle> circle;
  double h_nominal = 0.0;

  [[nodiscard]] std::size_t vertex_count() const { return vertices.size(); }
  [[nodiscard]] std::size_t triangle_count() const { return triangles.size(); }
  [[nodiscard]] double area(std::size_t t) const;
  [[nodiscard]] double total_area() const;

  /// Throws MeshError if any structural invariant is violated.
  void validate() const;
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unique undirected edges of a triangulation together with the per-triangle
/// local edge table (local edge e joins local vertices e and (e+1)%3).
struct EdgeTable {
  std::vector<std::array<int, 2>> edges;          // sorted endpoints
  std::vector<std::array<int, 3>> triangle_edges; // global edge id per local edge
  std::vector<std::array<int, 2>> edge_triangles; // owners; second is -1 on the boundary
};

EdgeTable build_edges(const Mesh& mesh);

/// Rebuilds the boundary edge list (owner, orientation, outward normal) from
/// the triangle connectivity, ordered as a closed cycle.
std::vector<BoundaryEdge> find_boundary_edges(const Mesh& mesh);

/// Ring-based quasi-uniform triangulation of a disk with exactly M equally
/// spaced boundary vertices.
Mesh generate_disk_mesh(Vec2 center, double radius, int boundary_nodes);

struct QualityReport {
  double min_angle_deg = 0.0;
  double h_max = 0.0;  // largest triangle diameter
  double h_min = 0.0;  // smallest triangle diameter
  double shape_regularity = 0.0;  // max over triangles of diameter / inradius
};

QualityReport mesh_quality(const Mesh& mesh);

void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
Mesh load_mesh(const std::filesystem::path& path);

std::string mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const std::string& text);

}  // namespace mdisp
