#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mdisp/fe.hpp"
#include "mdisp/mesh.hpp"
#include "mdisp/sparse.hpp"
#include "mdisp/tensor.hpp"

namespace mdisp {

using SpaceTimeField = std::function<double(Vec2, double)>;
/// Boundary datum g(x, t, n) with n the unit outward normal used at x.
using BoundaryData = std::function<double(Vec2, double, Vec2)>;

enum class ConvectionMode {
  skew,    // 1/2 (U.grad c, w) - 1/2 (U c, grad w) with reaction 1/2 (q_I + q_P)
  direct,  // (U.grad c, w) with reaction q_I
};

enum class BoundaryNormal {
  radial,  // direction from the disk center through the point
  edge,    // normal of the straight boundary edge
};

/// Data of the coupled Darcy / transport problem. Empty callables are zero.
struct ProblemCoefficients {
  ScalarField permeability;                 // k(x)
  std::function<double(double)> viscosity;  // mu(c)
  double viscosity_min = 0.0;
  double viscosity_max = 0.0;
  double porosity = 1.0;

  SpaceTimeField injection;               // q_I
  SpaceTimeField production;              // q_P
  SpaceTimeField injected_concentration;  // c_hat

  DispersionModel dispersion = ScalarDispersionParams{};

  SpaceTimeField pressure_source;       // f, added to q_I - q_P
  SpaceTimeField concentration_source;  // g
  BoundaryData boundary_flux;           // f_b = u.n
  BoundaryData dispersive_flux;         // g_b = D(u) grad c . n

  ScalarField initial_concentration;
  BoundaryNormal boundary_normal = BoundaryNormal::radial;
  /// Skew mode adds 1/2 of the boundary flux f_b c w to restore the
  /// integrated-by-parts boundary term.
  bool skew_flux_correction = true;
};

/// Viscosity left the admissible band [mu_min / 2, 2 mu_max].
class CoefficientBlowup : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Darcy velocity at the volume quadrature points of every triangle and at
/// the edge quadrature points of every boundary edge.
struct VelocityField {
  int volume_points = 0;
  int edge_points = 0;
  std::vector<Vec2> volume;    // triangle-major
  std::vector<Vec2> boundary;  // boundary-edge-major

  [[nodiscard]] Vec2 at(std::size_t triangle, int q) const { return volume[triangle * volume_points + q]; }
  [[nodiscard]] Vec2 at_boundary(std::size_t edge, int q) const { return boundary[edge * edge_points + q]; }
};

struct PressureSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  std::vector<double> mass;  // integral of each P2 basis function
  double compatibility_defect = 0.0;  // |sum of rhs|
};

struct ConcentrationSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
};

/// Assembles the pressure and concentration systems on a fixed mesh. Holds
/// the P1 and P2 dof maps, element geometry and sparsity patterns.
class Assembler {
 public:
  explicit Assembler(Mesh mesh, int volume_degree = 4);

  [[nodiscard]] const Mesh& mesh() const { return mesh_; }
  [[nodiscard]] const DofMap& p1() const { return p1_; }
  [[nodiscard]] const DofMap& p2() const { return p2_; }
  [[nodiscard]] const QuadratureRule& rule() const { return rule_; }
  [[nodiscard]] const ElementMap& map(std::size_t triangle) const { return maps_[triangle]; }

  /// Physical coordinates of volume quadrature point q of a triangle.
  [[nodiscard]] Vec2 point(std::size_t triangle, int q) const { return points_[triangle * rule_.size() + q]; }
  /// Quadrature weight times |det J|.
  [[nodiscard]] double weight(std::size_t triangle, int q) const { return weights_[triangle * rule_.size() + q]; }
  [[nodiscard]] Vec2 boundary_point(std::size_t edge, int q) const;
  [[nodiscard]] double boundary_weight(std::size_t edge, int q) const;
  /// Outward normal used for boundary data at edge quadrature point q.
  [[nodiscard]] Vec2 boundary_normal(std::size_t edge, int q, BoundaryNormal mode) const;

  /// Stiffness (k / mu(C_prev)) grad p . grad v with right-hand side
  /// (q_I - q_P + f)(t) minus the boundary flux f_b(t).
  [[nodiscard]] PressureSystem assemble_pressure(std::span<const double> concentration,
                                                 const ProblemCoefficients& coeffs, double t) const;

  /// U = -(k / mu(C)) grad P at every volume and boundary quadrature point.
  [[nodiscard]] VelocityField compute_velocity(std::span<const double> pressure, std::span<const double> concentration,
                                               const ProblemCoefficients& coeffs) const;

  /// Backward-Euler concentration system at time t with lagged velocity.
  [[nodiscard]] ConcentrationSystem assemble_concentration(std::span<const double> previous,
                                                           const VelocityField& velocity,
                                                           const ProblemCoefficients& coeffs, double tau, double t,
                                                           ConvectionMode mode) const;

  /// Individual concentration operators, used by the structural tests.
  [[nodiscard]] SparseMatrix p1_mass() const;
  [[nodiscard]] SparseMatrix convection(const VelocityField& velocity) const;          // (U.grad phi_j, phi_i)
  [[nodiscard]] SparseMatrix adjoint_convection(const VelocityField& velocity) const;  // (U phi_j, grad phi_i)
  [[nodiscard]] SparseMatrix dispersion_stiffness(const VelocityField& velocity, const DispersionModel& model) const;

  /// Samples a prescribed velocity at the quadrature points.
  [[nodiscard]] VelocityField sample_velocity(const std::function<Vec2(Vec2)>& u) const;

  /// P1 or P2 values at the volume quadrature points of a triangle.
  [[nodiscard]] double value_at(const DofMap& dofs, std::span<const double> coeffs, std::size_t triangle, int q) const;

 private:
  template <class Kernel>
  SparseMatrix assemble_p1(Kernel&& kernel) const;

  Mesh mesh_;
  QuadratureRule rule_;
  DofMap p1_;
  DofMap p2_;
  TabulatedBasis p1_basis_;
  TabulatedBasis p2_basis_;
  std::vector<ElementMap> maps_;
  std::vector<Vec2> points_;
  std::vector<double> weights_;
  std::vector<int> boundary_local_edge_;  // local edge index in the owning triangle
  std::vector<BasisValues> p1_edge_basis_;  // [local edge][edge point]
  std::vector<BasisValues> p2_edge_basis_;
  SparseMatrix p1_pattern_;
  SparseMatrix p2_pattern_;
  std::vector<long> p1_scatter_;  // CSR position of local entry (i, j) per triangle
  std::vector<long> p2_scatter_;
};

}  // namespace mdisp
