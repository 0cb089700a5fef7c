#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "mdisp/geometry.hpp"
#include "mdisp/mesh.hpp"

namespace mdisp {

using Barycentric = std::array<double, 3>;

/// Rule on the reference triangle (0,0), (1,0), (0,1); weights sum to 1/2.
struct QuadratureRule {
  int degree = 0;
  std::vector<Barycentric> points;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// Smallest built-in rule exact for polynomials of total degree `degree`
/// (1 to 6). All weights are positive.
const QuadratureRule& quadrature_rule(int degree);

/// Gauss-Legendre rule on [0, 1]; weights sum to 1.
struct EdgeQuadrature {
  std::vector<double> points;
  std::vector<double> weights;
};

/// 3-point Gauss-Legendre, exact to degree 5.
const EdgeQuadrature& edge_quadrature();

/// Lagrange basis on the reference triangle. P2 ordering: vertices 0, 1, 2
/// then midpoints of edges (0,1), (1,2), (2,0).
struct BasisValues {
  int size = 0;
  std::array<double, 6> values{};
  std::array<Vec2, 6> gradients{};  // with respect to reference coordinates
};

BasisValues reference_basis(int order, const Barycentric& point);

/// Affine element map x = v0 + J xi.
struct ElementMap {
  Vec2 origin;
  double jacobian[2][2]{};
  double det = 0.0;
  double inverse_transpose[2][2]{};

  ElementMap() = default;
  ElementMap(Vec2 a, Vec2 b, Vec2 c);

  [[nodiscard]] Vec2 to_physical(const Barycentric& p) const;
  [[nodiscard]] Vec2 physical_gradient(Vec2 reference_gradient) const {
    return {inverse_transpose[0][0] * reference_gradient.x + inverse_transpose[0][1] * reference_gradient.y,
            inverse_transpose[1][0] * reference_gradient.x + inverse_transpose[1][1] * reference_gradient.y};
  }
};

ElementMap element_map(const Mesh& mesh, std::size_t triangle);

/// Continuous Lagrange P1/P2 degree-of-freedom numbering. P2 numbers all
/// vertices first, then one dof per edge.
class DofMap {
 public:
  DofMap(const Mesh& mesh, int order);

  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] int dofs_per_cell() const { return order_ == 1 ? 3 : 6; }
  [[nodiscard]] std::size_t dof_count() const { return coordinates_.size(); }
  [[nodiscard]] std::size_t cell_count() const { return cells_.size() / dofs_per_cell(); }
  [[nodiscard]] std::span<const int> cell_dofs(std::size_t triangle) const {
    return {cells_.data() + triangle * dofs_per_cell(), static_cast<std::size_t>(dofs_per_cell())};
  }
  [[nodiscard]] const std::vector<Vec2>& coordinates() const { return coordinates_; }

 private:
  int order_;
  std::vector<int> cells_;
  std::vector<Vec2> coordinates_;
};

using ScalarField = std::function<double(Vec2)>;

/// Nodal interpolation: coefficient i is f at dof coordinate i.
std::vector<double> interpolate(const DofMap& dofs, const ScalarField& f);

struct PointValue {
  double value = 0.0;
  Vec2 gradient;
};

PointValue evaluate(const Mesh& mesh, const DofMap& dofs, std::span<const double> coeffs, std::size_t triangle,
                    const Barycentric& point);

/// Reference basis tabulated at the points of a quadrature rule.
struct TabulatedBasis {
  int order = 0;
  int size = 0;
  std::vector<BasisValues> at;  // one per quadrature point

  TabulatedBasis(int order, std::span<const Barycentric> points);
};

}  // namespace mdisp
