#include "mdisp/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace mdisp {

namespace {

constexpr double kPi = std::numbers::pi;

std::array<int, 2> sorted_pair(int a, int b) { return a < b ? std::array{a, b} : std::array{b, a}; }

double angle_at(Vec2 p, Vec2 q, Vec2 r) {
  // angle at p in triangle (p, q, r)
  const Vec2 a = q - p;
  const Vec2 b = r - p;
  return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

double diameter(Vec2 a, Vec2 b, Vec2 c) { return std::max({norm(b - a), norm(c - b), norm(a - c)}); }

// Lawson flips until every interior edge is locally Delaunay. Triangles that
// changed in a sweep are not revisited until the next sweep so the edge table
// stays consistent.
void delaunay_flips(Mesh& mesh) {
  for (int sweep = 0; sweep < 1000; ++sweep) {
    const EdgeTable table = build_edges(mesh);
    std::vector<char> touched(mesh.triangles.size(), 0);
    int flips = 0;
    for (std::size_t e = 0; e < table.edges.size(); ++e) {
      const auto [t1, t2] = table.edge_triangles[e];
      if (t2 < 0 || touched[t1] || touched[t2]) continue;
      const int a = table.edges[e][0];
      const int b = table.edges[e][1];
      auto opposite = [&](int t) {
        for (int v : mesh.triangles[t])
          if (v != a && v != b) return v;
        return -1;
      };
      const int c = opposite(t1);
      const int d = opposite(t2);
      const Vec2 pa = mesh.vertices[a], pb = mesh.vertices[b];
      const Vec2 pc = mesh.vertices[c], pd = mesh.vertices[d];
      if (angle_at(pc, pa, pb) + angle_at(pd, pa, pb) <= kPi + 1e-10) continue;
      std::array<int, 3> n1{c, d, a};
      std::array<int, 3> n2{d, c, b};
      if (orient2d(mesh.vertices[n1[0]], mesh.vertices[n1[1]], mesh.vertices[n1[2]]) < 0) std::swap(n1[1], n1[2]);
      if (orient2d(mesh.vertices[n2[0]], mesh.vertices[n2[1]], mesh.vertices[n2[2]]) < 0) std::swap(n2[1], n2[2]);
      if (orient2d(mesh.vertices[n1[0]], mesh.vertices[n1[1]], mesh.vertices[n1[2]]) <= 0 ||
          orient2d(mesh.vertices[n2[0]], mesh.vertices[n2[1]], mesh.vertices[n2[2]]) <= 0)
        continue;
      mesh.triangles[t1] = n1;
      mesh.triangles[t2] = n2;
      touched[t1] = touched[t2] = 1;
      ++flips;
    }
    if (flips == 0) return;
  }
  throw MeshError("delaunay_flips: no convergence");
}

// Stitches the annulus between two concentric rings of nodes. Ring nodes are
// listed counterclockwise starting from the node with the smallest angle
// offset; the strip closes on itself after n_inner + n_outer triangles.
void stitch_rings(const std::vector<int>& inner, double inner_offset, const std::vector<int>& outer,
                  double outer_offset, std::vector<std::array<int, 3>>& triangles) {
  const auto ni = static_cast<int>(inner.size());
  const auto no = static_cast<int>(outer.size());
  auto inner_angle = [&](int k) { return inner_offset + 2.0 * kPi * k / ni; };
  auto outer_angle = [&](int k) { return outer_offset + 2.0 * kPi * k / no; };
  int ki = 0;
  int ko = 0;
  while (ki < ni || ko < no) {
    const bool advance_inner = ko == no || (ki < ni && inner_angle(ki + 1) < outer_angle(ko + 1));
    if (advance_inner) {
      triangles.push_back({inner[ki % ni], outer[ko % no], inner[(ki + 1) % ni]});
      ++ki;
    } else {
      triangles.push_back({inner[ki % ni], outer[ko % no], outer[(ko + 1) % no]});
      ++ko;
    }
  }
}

}  // namespace

double Mesh::area(std::size_t t) const {
  const auto& tri = triangles[t];
  return 0.5 * orient2d(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) sum += area(t);
  return sum;
}

EdgeTable build_edges(const Mesh& mesh) {
  EdgeTable table;
  table.triangle_edges.resize(mesh.triangles.size());
  std::map<std::array<int, 2>, int> index;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const auto key = sorted_pair(tri[e], tri[(e + 1) % 3]);
      auto [it, inserted] = index.try_emplace(key, static_cast<int>(table.edges.size()));
      if (inserted) {
        table.edges.push_back(key);
        table.edge_triangles.push_back({static_cast<int>(t), -1});
      } else {
        auto& owners = table.edge_triangles[it->second];
        if (owners[1] >= 0) throw MeshError("edge shared by more than two triangles");
        owners[1] = static_cast<int>(t);
      }
      table.triangle_edges[t][e] = it->second;
    }
  }
  return table;
}

std::vector<BoundaryEdge> find_boundary_edges(const Mesh& mesh) {
  const EdgeTable table = build_edges(mesh);
  std::vector<BoundaryEdge> loose;
  for (std::size_t e = 0; e < table.edges.size(); ++e) {
    if (table.edge_triangles[e][1] >= 0) continue;
    const int t = table.edge_triangles[e][0];
    const auto& tri = mesh.triangles[t];
    BoundaryEdge be;
    be.triangle = t;
    for (int k = 0; k < 3; ++k) {
      if (sorted_pair(tri[k], tri[(k + 1) % 3]) == table.edges[e]) be.v = {tri[k], tri[(k + 1) % 3]};
    }
    const Vec2 d = mesh.vertices[be.v[1]] - mesh.vertices[be.v[0]];
    be.normal = (1.0 / norm(d)) * Vec2{d.y, -d.x};
    loose.push_back(be);
  }
  if (loose.empty()) return loose;

  // order as a cycle following v[1] -> next v[0]
  std::map<int, std::size_t> by_start;
  for (std::size_t i = 0; i < loose.size(); ++i) {
    if (!by_start.emplace(loose[i].v[0], i).second) throw MeshError("boundary is not a simple cycle");
  }
  std::vector<BoundaryEdge> cycle;
  cycle.reserve(loose.size());
  std::size_t current = by_start.begin()->second;
  for (std::size_t k = 0; k < loose.size(); ++k) {
    cycle.push_back(loose[current]);
    auto it = by_start.find(loose[current].v[1]);
    if (it == by_start.end()) throw MeshError("boundary cycle is open");
    current = it->second;
  }
  if (cycle.front().v[0] != cycle.back().v[1] || current != by_start.begin()->second)
    throw MeshError("boundary does not form a single closed cycle");
  return cycle;
}

void Mesh::validate() const {
  const auto nv = static_cast<int>(vertices.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int v : triangles[t])
      if (v < 0 || v >= nv) throw MeshError("triangle " + std::to_string(t) + " references a missing vertex");
    if (!(area(t) > 0.0)) throw MeshError("triangle " + std::to_string(t) + " has nonpositive area");
  }
  const auto cycle = find_boundary_edges(*this);
  if (cycle.size() != boundary_edges.size()) throw MeshError("boundary edge list does not match connectivity");
  std::map<std::array<int, 2>, int> stored;
  for (const auto& be : boundary_edges) stored[be.v] += 1;
  for (const auto& be : cycle) {
    if (stored[be.v] != 1) throw MeshError("boundary edge list does not traverse the boundary exactly once");
  }
  if (circle) {
    for (const auto& be : boundary_edges) {
      const double r = norm(vertices[be.v[0]] - circle->center);
      if (std::abs(r - circle->radius) > 1e-12 * circle->radius)
        throw MeshError("boundary vertex " + std::to_string(be.v[0]) + " is off the circle");
    }
  }
}

Mesh generate_disk_mesh(Vec2 center, double radius, int boundary_nodes) {
  if (boundary_nodes < 8) throw std::invalid_argument("generate_disk_mesh: need at least 8 boundary nodes");
  if (!(radius > 0.0)) throw std::invalid_argument("generate_disk_mesh: radius must be positive");

  const int m = boundary_nodes;
  const double spacing = 2.0 * kPi * radius / m;
  // ring spacing of an equilateral layer
  const int rings = std::max(1, static_cast<int>(std::lround(radius / (spacing * std::sqrt(3.0) / 2.0))));

  Mesh mesh;
  mesh.circle = Circle{center, radius};
  mesh.h_nominal = 1.0 / m;
  mesh.vertices.push_back(center);

  std::vector<std::vector<int>> ring_nodes(rings + 1);
  std::vector<double> ring_offset(rings + 1, 0.0);
  ring_nodes[0] = {0};
  for (int i = 1; i <= rings; ++i) {
    const double r = radius * i / rings;
    const int n = i == rings ? m : std::max(6, static_cast<int>(std::lround(2.0 * kPi * r / spacing)));
    ring_offset[i] = (rings - i) % 2 == 1 ? kPi / n : 0.0;
    for (int k = 0; k < n; ++k) {
      const double theta = ring_offset[i] + 2.0 * kPi * k / n;
      ring_nodes[i].push_back(static_cast<int>(mesh.vertices.size()));
      if (i == rings) {
        mesh.vertices.push_back({center.x + radius * std::cos(theta), center.y + radius * std::sin(theta)});
      } else {
        mesh.vertices.push_back({center.x + r * std::cos(theta), center.y + r * std::sin(theta)});
      }
    }
  }

  const auto& first = ring_nodes[1];
  for (std::size_t k = 0; k < first.size(); ++k) mesh.triangles.push_back({0, first[k], first[(k + 1) % first.size()]});
  for (int i = 1; i < rings; ++i)
    stitch_rings(ring_nodes[i], ring_offset[i], ring_nodes[i + 1], ring_offset[i + 1], mesh.triangles);

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (!(mesh.area(t) > 0.0)) throw MeshError("generate_disk_mesh: degenerate triangle during ring stitching");
  }
  delaunay_flips(mesh);

  mesh.boundary_edges = find_boundary_edges(mesh);
  mesh.validate();
  return mesh;
}

QualityReport mesh_quality(const Mesh& mesh) {
  QualityReport q;
  q.min_angle_deg = 180.0;
  q.h_min = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    const double min_angle = std::min({angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
    q.min_angle_deg = std::min(q.min_angle_deg, min_angle * 180.0 / kPi);
    const double diam = diameter(a, b, c);
    q.h_max = std::max(q.h_max, diam);
    q.h_min = std::min(q.h_min, diam);
    const double perimeter = norm(b - a) + norm(c - b) + norm(a - c);
    const double inradius = 2.0 * mesh.area(t) / perimeter;
    q.shape_regularity = std::max(q.shape_regularity, diam / inradius);
  }
  return q;
}

namespace {

void append_number(std::string& out, double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw MeshError("mesh file: " + path + ": " + what);
}

}  // namespace

std::string mesh_to_json(const Mesh& mesh) {
  std::string out = "{\n";
  if (mesh.circle) {
    out += "\"center\": [";
    append_number(out, mesh.circle->center.x);
    out += ", ";
    append_number(out, mesh.circle->center.y);
    out += "],\n\"radius\": ";
    append_number(out, mesh.circle->radius);
    out += ",\n";
  }
  out += "\"h_nominal\": ";
  append_number(out, mesh.h_nominal);
  out += ",\n\"vertices\": [\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    out += "  [";
    append_number(out, mesh.vertices[i].x);
    out += ", ";
    append_number(out, mesh.vertices[i].y);
    out += i + 1 < mesh.vertices.size() ? "],\n" : "]\n";
  }
  out += "],\n\"triangles\": [\n";
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    out += "  [" + std::to_string(t[0]) + ", " + std::to_string(t[1]) + ", " + std::to_string(t[2]) +
           (i + 1 < mesh.triangles.size() ? "],\n" : "]\n");
  }
  out += "],\n\"boundary_edges\": [\n";
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    const auto& e = mesh.boundary_edges[i];
    out += "  [" + std::to_string(e.v[0]) + ", " + std::to_string(e.v[1]) +
           (i + 1 < mesh.boundary_edges.size() ? "],\n" : "]\n");
  }
  out += "]\n}\n";
  return out;
}

Mesh mesh_from_json(const std::string& text) {
  using nlohmann::json;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw MeshError("mesh file: line 1: empty input");
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MeshError(std::string("mesh file: ") + e.what());
  }
  if (!doc.is_object()) schema_error("$", "expected an object");

  Mesh mesh;
  auto read_array = [&](const char* key) -> const json& {
    if (!doc.contains(key) || !doc[key].is_array()) schema_error(key, "missing or not an array");
    return doc[key];
  };
  const auto& verts = read_array("vertices");
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const auto& v = verts[i];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      schema_error("vertices[" + std::to_string(i) + "]", "expected [x, y]");
    mesh.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  const auto nv = static_cast<int>(mesh.vertices.size());
  auto read_indices = [&](const json& arr, std::size_t i, std::size_t count, const char* key) {
    const auto& item = arr[i];
    const std::string path = std::string(key) + "[" + std::to_string(i) + "]";
    if (!item.is_array() || item.size() != count) schema_error(path, "wrong arity");
    std::array<int, 3> idx{};
    for (std::size_t k = 0; k < count; ++k) {
      if (!item[k].is_number_integer()) schema_error(path, "index is not an integer");
      const int value = item[k].get<int>();
      if (value < 0 || value >= nv) schema_error(path, "vertex index " + std::to_string(value) + " out of range");
      idx[k] = value;
    }
    return idx;
  };
  const auto& tris = read_array("triangles");
  for (std::size_t i = 0; i < tris.size(); ++i) mesh.triangles.push_back(read_indices(tris, i, 3, "triangles"));

  // owners and normals follow from connectivity; the stored list pins the order
  const auto derived = find_boundary_edges(mesh);
  std::map<std::array<int, 2>, BoundaryEdge> by_key;
  for (const auto& be : derived) by_key[be.v] = be;
  const auto& bedges = read_array("boundary_edges");
  for (std::size_t i = 0; i < bedges.size(); ++i) {
    const auto idx = read_indices(bedges, i, 2, "boundary_edges");
    auto it = by_key.find({idx[0], idx[1]});
    if (it == by_key.end())
      schema_error("boundary_edges[" + std::to_string(i) + "]", "not a boundary edge of the triangulation");
    mesh.boundary_edges.push_back(it->second);
  }

  if (doc.contains("center") || doc.contains("radius")) {
    if (!doc.contains("center") || !doc.contains("radius")) schema_error("center", "center and radius go together");
    const auto& c = doc["center"];
    if (!c.is_array() || c.size() != 2) schema_error("center", "expected [x, y]");
    mesh.circle = Circle{{c[0].get<double>(), c[1].get<double>()}, doc["radius"].get<double>()};
  }
  if (doc.contains("h_nominal")) mesh.h_nominal = doc["h_nominal"].get<double>();
  mesh.validate();
  return mesh;
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mesh: cannot open " + path.string());
  out << mesh_to_json(mesh);
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mesh: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return mesh_from_json(buffer.str());
}

}  // namespace mdisp
