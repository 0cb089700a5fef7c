#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

#include "mdisp/mesh.hpp"

using namespace mdisp;

namespace {

Mesh single_triangle(Vec2 a, Vec2 b, Vec2 c) {
  Mesh m;
  m.vertices = {a, b, c};
  m.triangles = {{0, 1, 2}};
  m.boundary_edges = find_boundary_edges(m);
  return m;
}

// Independent structural checker, written against the invariants rather than
// the library's own validate().
void check_disk_invariants(const Mesh& mesh, Vec2 center, double radius, int m) {
  for (const auto& t : mesh.triangles) {
    const Vec2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    ASSERT_GT((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x), 0.0);
  }
  std::map<std::pair<int, int>, int> uses;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      const int i = t[e], j = t[(e + 1) % 3];
      uses[{std::min(i, j), std::max(i, j)}] += 1;
    }
  std::set<std::pair<int, int>> boundary;
  for (const auto& [edge, count] : uses) {
    ASSERT_TRUE(count == 1 || count == 2);
    if (count == 1) boundary.insert(edge);
  }
  ASSERT_EQ(boundary.size(), mesh.boundary_edges.size());
  ASSERT_EQ(mesh.boundary_edges.size(), static_cast<std::size_t>(m));
  for (std::size_t k = 0; k < mesh.boundary_edges.size(); ++k) {
    const auto& e = mesh.boundary_edges[k];
    ASSERT_TRUE(boundary.count({std::min(e.v[0], e.v[1]), std::max(e.v[0], e.v[1])}));
    // closed cycle
    ASSERT_EQ(e.v[1], mesh.boundary_edges[(k + 1) % mesh.boundary_edges.size()].v[0]);
    for (int v : e.v) ASSERT_NEAR(norm(mesh.vertices[v] - center), radius, 1e-12 * radius);
    const Vec2 mid = 0.5 * (mesh.vertices[e.v[0]] + mesh.vertices[e.v[1]]);
    ASSERT_NEAR(norm(e.normal), 1.0, 1e-14);
    ASSERT_GT(dot(e.normal, mid - center), 0.0);
  }
}

double diameter(const Mesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles[t];
  double d = 0.0;
  for (int e = 0; e < 3; ++e) d = std::max(d, norm(mesh.vertices[tri[e]] - mesh.vertices[tri[(e + 1) % 3]]));
  return d;
}

}  // namespace

TEST(DiskMesh, SixteenNodesHasDiskTopology) {
  const Mesh mesh = generate_disk_mesh({0.5, 0.5}, 0.5, 16);
  EXPECT_EQ(mesh.boundary_edges.size(), 16u);
  std::set<std::pair<int, int>> edges;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) edges.insert({std::min(t[e], t[(e + 1) % 3]), std::max(t[e], t[(e + 1) % 3])});
  const long euler = static_cast<long>(mesh.vertex_count()) - static_cast<long>(edges.size()) +
                     static_cast<long>(mesh.triangle_count());
  EXPECT_EQ(euler, 1);
}

TEST(DiskMesh, SixtyFourNodesIsQuasiUniform) {
  const Mesh mesh = generate_disk_mesh({0.5, 0.5}, 0.5, 64);
  EXPECT_DOUBLE_EQ(mesh.h_nominal, 1.0 / 64);
  double dmax = 0.0, dmin = 1e300;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    dmax = std::max(dmax, diameter(mesh, t));
    dmin = std::min(dmin, diameter(mesh, t));
  }
  EXPECT_LE(dmax / dmin, 3.0);
}

TEST(DiskMesh, AreaIsTheInscribedPolygonArea) {
  const int m = 16;
  const double r = 0.5;
  const Mesh mesh = generate_disk_mesh({0.5, 0.5}, r, m);
  const double polygon = 0.5 * m * r * r * std::sin(2.0 * std::numbers::pi / m);
  const double deficit = std::numbers::pi * r * r * (1.0 - (m / (2.0 * std::numbers::pi)) * std::sin(2.0 * std::numbers::pi / m));
  EXPECT_NEAR(mesh.total_area(), polygon, 1e-14);
  EXPECT_LE(std::abs(mesh.total_area() - std::numbers::pi * r * r), deficit + 1e-14);
}

TEST(DiskMesh, BoundaryVerticesAreEquallySpacedInAngle) {
  const Vec2 c{0.5, 0.5};
  const int m = 24;
  const Mesh mesh = generate_disk_mesh(c, 0.5, m);
  for (const auto& e : mesh.boundary_edges) {
    const Vec2 a = mesh.vertices[e.v[0]] - c, b = mesh.vertices[e.v[1]] - c;
    const double angle = std::atan2(cross(a, b), dot(a, b));
    EXPECT_NEAR(angle, 2.0 * std::numbers::pi / m, 1e-12);
  }
}

TEST(DiskMesh, InvariantsHoldForEveryBoundaryCountUpTo256) {
  const Vec2 c{0.5, 0.5};
  for (int m = 8; m <= 256; ++m) {
    SCOPED_TRACE("M = " + std::to_string(m));
    const Mesh mesh = generate_disk_mesh(c, 0.5, m);
    check_disk_invariants(mesh, c, 0.5, m);
    EXPECT_NO_THROW(mesh.validate());
    const auto q = mesh_quality(mesh);
    EXPECT_GE(q.h_max, 0.5 / m * std::numbers::pi * 0.5);
    EXPECT_LE(q.h_max, 3.0 * std::numbers::pi * 0.5 / m);
  }
}

TEST(DiskMesh, GenerationIsDeterministic) {
  const Mesh a = generate_disk_mesh({0.5, 0.5}, 0.5, 37);
  const Mesh b = generate_disk_mesh({0.5, 0.5}, 0.5, 37);
  ASSERT_EQ(a.vertex_count(), b.vertex_count());
  for (std::size_t i = 0; i < a.vertex_count(); ++i) {
    EXPECT_EQ(a.vertices[i].x, b.vertices[i].x);
    EXPECT_EQ(a.vertices[i].y, b.vertices[i].y);
  }
  EXPECT_EQ(a.triangles, b.triangles);
}

TEST(DiskMesh, RejectsInvalidArguments) {
  EXPECT_THROW(generate_disk_mesh({0, 0}, 1.0, 7), std::invalid_argument);
  EXPECT_THROW(generate_disk_mesh({0, 0}, 0.0, 16), std::invalid_argument);
  EXPECT_THROW(generate_disk_mesh({0, 0}, -1.0, 16), std::invalid_argument);
}

TEST(DiskMesh, OtherCentersAndRadii) {
  const Vec2 c{-2.0, 3.0};
  const Mesh mesh = generate_disk_mesh(c, 7.5, 40);
  check_disk_invariants(mesh, c, 7.5, 40);
}

TEST(MeshQuality, EquilateralTriangleHasSixtyDegrees) {
  const Mesh m = single_triangle({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2});
  EXPECT_NEAR(mesh_quality(m).min_angle_deg, 60.0, 1e-12);
}

TEST(MeshQuality, RightIsoscelesDiameter) {
  const Mesh m = single_triangle({0, 0}, {1, 0}, {0, 1});
  const auto q = mesh_quality(m);
  EXPECT_NEAR(q.h_max, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(q.min_angle_deg, 45.0, 1e-12);
  // diameter / inradius of the right isosceles unit triangle
  const double inradius = 1.0 / (2.0 + std::sqrt(2.0));
  EXPECT_NEAR(q.shape_regularity, std::sqrt(2.0) / inradius, 1e-12);
}

TEST(MeshQuality, GeneratedMeshesStayWellShaped) {
  // measured 40-47 degrees for M = 8..256; 35 is the frozen regression bound
  const auto q = mesh_quality(generate_disk_mesh({0.5, 0.5}, 0.5, 32));
  EXPECT_GE(q.min_angle_deg, 20.0);
  EXPECT_GE(q.min_angle_deg, 35.0);
  EXPECT_GT(q.h_min, 0.0);
  EXPECT_GT(q.shape_regularity, 0.0);
}

TEST(MeshIo, RoundTripIsExact) {
  const Mesh mesh = generate_disk_mesh({0.5, 0.5}, 0.5, 29);
  const auto path = std::filesystem::temp_directory_path() / "mdisp_roundtrip_mesh.json";
  save_mesh(mesh, path);
  const Mesh back = load_mesh(path);
  std::filesystem::remove(path);
  ASSERT_EQ(back.vertex_count(), mesh.vertex_count());
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    EXPECT_EQ(back.vertices[i].x, mesh.vertices[i].x);
    EXPECT_EQ(back.vertices[i].y, mesh.vertices[i].y);
  }
  EXPECT_EQ(back.triangles, mesh.triangles);
  ASSERT_EQ(back.boundary_edges.size(), mesh.boundary_edges.size());
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    EXPECT_EQ(back.boundary_edges[i].v, mesh.boundary_edges[i].v);
    EXPECT_EQ(back.boundary_edges[i].triangle, mesh.boundary_edges[i].triangle);
    EXPECT_EQ(back.boundary_edges[i].normal.x, mesh.boundary_edges[i].normal.x);
    EXPECT_EQ(back.boundary_edges[i].normal.y, mesh.boundary_edges[i].normal.y);
  }
  EXPECT_EQ(back.h_nominal, mesh.h_nominal);
}

TEST(MeshIo, RejectsOutOfRangeVertexIndex) {
  const std::string text =
      R"({"vertices": [[0,0],[1,0],[0,1]], "triangles": [[0,1,3]], "boundary_edges": [[0,1],[1,2],[2,0]]})";
  try {
    (void)mesh_from_json(text);
    FAIL() << "expected a parse error";
  } catch (const MeshError& e) {
    EXPECT_NE(std::string(e.what()).find("triangles[0]"), std::string::npos) << e.what();
  }
}

TEST(MeshIo, RejectsEmptyInput) {
  EXPECT_THROW((void)mesh_from_json(""), MeshError);
  const auto path = std::filesystem::temp_directory_path() / "mdisp_empty_mesh.json";
  { std::ofstream out(path); }
  EXPECT_THROW((void)load_mesh(path), MeshError);
  std::filesystem::remove(path);
}

TEST(MeshIo, SyntaxErrorsReportTheLine) {
  const std::string text = "{\n\"vertices\": [[0,0],\n[1,0]\n[0,1]]}";
  try {
    (void)mesh_from_json(text);
    FAIL() << "expected a parse error";
  } catch (const MeshError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(MeshIo, RejectsClockwiseTriangles) {
  const std::string text =
      R"({"vertices": [[0,0],[1,0],[0,1]], "triangles": [[0,2,1]], "boundary_edges": [[0,2],[2,1],[1,0]]})";
  EXPECT_THROW((void)mesh_from_json(text), MeshError);
}

TEST(MeshIo, LoadsAMinimalDocument) {
  const std::string text =
      R"({"vertices": [[0,0],[1,0],[0,1]], "triangles": [[0,1,2]], "boundary_edges": [[0,1],[1,2],[2,0]]})";
  const Mesh m = mesh_from_json(text);
  EXPECT_EQ(m.triangle_count(), 1u);
  EXPECT_NEAR(m.total_area(), 0.5, 1e-15);
  ASSERT_EQ(m.boundary_edges.size(), 3u);
  EXPECT_EQ(m.boundary_edges[0].triangle, 0);
}
