#include "mdisp/fe.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mdisp {

namespace {

void add_orbit_21(QuadratureRule& rule, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  rule.points.push_back({a, a, b});
  rule.points.push_back({a, b, a});
  rule.points.push_back({b, a, a});
  rule.weights.insert(rule.weights.end(), 3, w);
}

void add_orbit_111(QuadratureRule& rule, double a, double b, double w) {
  const double c = 1.0 - a - b;
  for (const Barycentric& p : {Barycentric{a, b, c}, Barycentric{a, c, b}, Barycentric{b, a, c},
                               Barycentric{b, c, a}, Barycentric{c, a, b}, Barycentric{c, b, a}}) {
    rule.points.push_back(p);
    rule.weights.push_back(w);
  }
}

QuadratureRule make_rule(int degree) {
  QuadratureRule rule;
  rule.degree = degree;
  switch (degree) {
    case 1:
      rule.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
      rule.weights = {0.5};
      break;
    case 2:
      add_orbit_21(rule, 1.0 / 6.0, 1.0 / 6.0);
      break;
    case 3:
    case 4:
      // Dunavant, 6 points
      add_orbit_21(rule, 0.44594849091596488631832925388305199, 0.11169079483900573284750350421656140);
      add_orbit_21(rule, 0.09157621350977074345957146340220151, 0.05497587182766093381916316245010526);
      break;
    case 5: {
      // Radon, 7 points
      const double s = std::sqrt(15.0);
      rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      rule.weights.push_back(9.0 / 80.0);
      add_orbit_21(rule, (6.0 - s) / 21.0, (155.0 - s) / 2400.0);
      add_orbit_21(rule, (6.0 + s) / 21.0, (155.0 + s) / 2400.0);
      break;
    }
    case 6:
      // Dunavant, 12 points
      add_orbit_21(rule, 0.24928674517091042129163855310701908, 0.05839313786318968301264480569278972);
      add_orbit_21(rule, 0.06308901449150222834033160287081916, 0.02542245318510340846046840455343449);
      add_orbit_111(rule, 0.05314504984481694735324967163139815, 0.31035245103378440541660773395655215,
                    0.04142553780918678759677672821022123);
      break;
    default:
      throw std::invalid_argument("quadrature_rule: unsupported degree " + std::to_string(degree));
  }
  return rule;
}

}  // namespace

const QuadratureRule& quadrature_rule(int degree) {
  static const std::array<QuadratureRule, 6> rules = {make_rule(1), make_rule(2), make_rule(3),
                                                      make_rule(4), make_rule(5), make_rule(6)};
  if (degree < 1 || degree > 6) throw std::invalid_argument("quadrature_rule: unsupported degree " + std::to_string(degree));
  return rules[degree - 1];
}

const EdgeQuadrature& edge_quadrature() {
  static const EdgeQuadrature rule = [] {
    const double d = 0.5 * std::sqrt(0.6);
    return EdgeQuadrature{{0.5 - d, 0.5, 0.5 + d}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
  }();
  return rule;
}

BasisValues reference_basis(int order, const Barycentric& p) {
  // reference gradients of the barycentric coordinates
  static constexpr std::array<Vec2, 3> dl = {Vec2{-1.0, -1.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
  BasisValues b;
  if (order == 1) {
    b.size = 3;
    for (int i = 0; i < 3; ++i) {
      b.values[i] = p[i];
      b.gradients[i] = dl[i];
    }
    return b;
  }
  if (order != 2) throw std::invalid_argument("reference_basis: order must be 1 or 2");
  b.size = 6;
  for (int i = 0; i < 3; ++i) {
    b.values[i] = p[i] * (2.0 * p[i] - 1.0);
    b.gradients[i] = (4.0 * p[i] - 1.0) * dl[i];
  }
  for (int e = 0; e < 3; ++e) {
    const int i = e;
    const int j = (e + 1) % 3;
    b.values[3 + e] = 4.0 * p[i] * p[j];
    b.gradients[3 + e] = 4.0 * p[j] * dl[i] + 4.0 * p[i] * dl[j];
  }
  return b;
}

ElementMap::ElementMap(Vec2 a, Vec2 b, Vec2 c) : origin(a) {
  jacobian[0][0] = b.x - a.x;
  jacobian[0][1] = c.x - a.x;
  jacobian[1][0] = b.y - a.y;
  jacobian[1][1] = c.y - a.y;
  det = jacobian[0][0] * jacobian[1][1] - jacobian[0][1] * jacobian[1][0];
  // J^{-T}
  inverse_transpose[0][0] = jacobian[1][1] / det;
  inverse_transpose[0][1] = -jacobian[1][0] / det;
  inverse_transpose[1][0] = -jacobian[0][1] / det;
  inverse_transpose[1][1] = jacobian[0][0] / det;
}

Vec2 ElementMap::to_physical(const Barycentric& p) const {
  return {origin.x + jacobian[0][0] * p[1] + jacobian[0][1] * p[2],
          origin.y + jacobian[1][0] * p[1] + jacobian[1][1] * p[2]};
}

ElementMap element_map(const Mesh& mesh, std::size_t triangle) {
  const auto& t = mesh.triangles.at(triangle);
  return ElementMap(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
}

DofMap::DofMap(const Mesh& mesh, int order) : order_(order) {
  if (order != 1 && order != 2) throw std::invalid_argument("DofMap: order must be 1 or 2");
  coordinates_ = mesh.vertices;
  const int per_cell = dofs_per_cell();
  cells_.reserve(mesh.triangles.size() * per_cell);
  if (order == 1) {
    for (const auto& t : mesh.triangles) cells_.insert(cells_.end(), t.begin(), t.end());
    return;
  }
  const EdgeTable table = build_edges(mesh);
  const auto nv = static_cast<int>(mesh.vertices.size());
  for (const auto& e : table.edges) coordinates_.push_back(0.5 * (mesh.vertices[e[0]] + mesh.vertices[e[1]]));
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    cells_.insert(cells_.end(), mesh.triangles[t].begin(), mesh.triangles[t].end());
    for (int e = 0; e < 3; ++e) cells_.push_back(nv + table.triangle_edges[t][e]);
  }
}

std::vector<double> interpolate(const DofMap& dofs, const ScalarField& f) {
  std::vector<double> coeffs;
  coeffs.reserve(dofs.dof_count());
  for (const Vec2& x : dofs.coordinates()) coeffs.push_back(f(x));
  return coeffs;
}

PointValue evaluate(const Mesh& mesh, const DofMap& dofs, std::span<const double> coeffs, std::size_t triangle,
                    const Barycentric& point) {
  if (triangle >= dofs.cell_count()) throw std::invalid_argument("evaluate: triangle index out of range");
  if (coeffs.size() != dofs.dof_count()) throw std::invalid_argument("evaluate: coefficient vector size mismatch");
  const ElementMap map = element_map(mesh, triangle);
  const BasisValues basis = reference_basis(dofs.order(), point);
  const auto cell = dofs.cell_dofs(triangle);
  PointValue out;
  Vec2 ref_grad;
  for (int i = 0; i < basis.size; ++i) {
    out.value += coeffs[cell[i]] * basis.values[i];
    ref_grad = ref_grad + coeffs[cell[i]] * basis.gradients[i];
  }
  out.gradient = map.physical_gradient(ref_grad);
  return out;
}

TabulatedBasis::TabulatedBasis(int order_, std::span<const Barycentric> points) : order(order_) {
  size = order == 1 ? 3 : 6;
  at.reserve(points.size());
  for (const auto& p : points) at.push_back(reference_basis(order, p));
}

}  // namespace mdisp
