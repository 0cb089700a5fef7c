#include "mdisp/assembly.hpp"

#include <cmath>
#include <string>

namespace mdisp {

namespace {

double eval_or_zero(const SpaceTimeField& f, Vec2 x, double t) { return f ? f(x, t) : 0.0; }

SparseMatrix pattern_for(const DofMap& dofs) {
  std::vector<Triplet> entries;
  const int per = dofs.dofs_per_cell();
  entries.reserve(dofs.cell_count() * per * per);
  for (std::size_t t = 0; t < dofs.cell_count(); ++t) {
    const auto cell = dofs.cell_dofs(t);
    for (int i = 0; i < per; ++i)
      for (int j = 0; j < per; ++j) entries.push_back({cell[i], cell[j], 0.0});
  }
  const auto n = static_cast<int>(dofs.dof_count());
  return SparseMatrix::from_pattern(n, n, entries);
}

std::vector<long> scatter_for(const DofMap& dofs, const SparseMatrix& pattern) {
  const int per = dofs.dofs_per_cell();
  std::vector<long> positions;
  positions.reserve(dofs.cell_count() * per * per);
  for (std::size_t t = 0; t < dofs.cell_count(); ++t) {
    const auto cell = dofs.cell_dofs(t);
    for (int i = 0; i < per; ++i)
      for (int j = 0; j < per; ++j) positions.push_back(pattern.find(cell[i], cell[j]));
  }
  return positions;
}

Barycentric edge_barycentric(int local_edge, double s) {
  Barycentric b{0.0, 0.0, 0.0};
  b[local_edge] = 1.0 - s;
  b[(local_edge + 1) % 3] = s;
  return b;
}

}  // namespace

Assembler::Assembler(Mesh mesh, int volume_degree)
    : mesh_(std::move(mesh)),
      rule_(quadrature_rule(volume_degree)),
      p1_(mesh_, 1),
      p2_(mesh_, 2),
      p1_basis_(1, rule_.points),
      p2_basis_(2, rule_.points) {
  const std::size_t nt = mesh_.triangle_count();
  maps_.reserve(nt);
  points_.reserve(nt * rule_.size());
  weights_.reserve(nt * rule_.size());
  for (std::size_t t = 0; t < nt; ++t) {
    maps_.push_back(element_map(mesh_, t));
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      points_.push_back(maps_[t].to_physical(rule_.points[q]));
      weights_.push_back(rule_.weights[q] * std::abs(maps_[t].det));
    }
  }

  const auto& edge_rule = edge_quadrature();
  for (int e = 0; e < 3; ++e) {
    for (double s : edge_rule.points) {
      p1_edge_basis_.push_back(reference_basis(1, edge_barycentric(e, s)));
      p2_edge_basis_.push_back(reference_basis(2, edge_barycentric(e, s)));
    }
  }
  for (const auto& be : mesh_.boundary_edges) {
    const auto& tri = mesh_.triangles[be.triangle];
    int local = -1;
    for (int e = 0; e < 3; ++e)
      if (tri[e] == be.v[0] && tri[(e + 1) % 3] == be.v[1]) local = e;
    if (local < 0) throw MeshError("boundary edge orientation does not match its triangle");
    boundary_local_edge_.push_back(local);
  }

  p1_pattern_ = pattern_for(p1_);
  p2_pattern_ = pattern_for(p2_);
  p1_scatter_ = scatter_for(p1_, p1_pattern_);
  p2_scatter_ = scatter_for(p2_, p2_pattern_);
}

Vec2 Assembler::boundary_point(std::size_t edge, int q) const {
  const auto& be = mesh_.boundary_edges[edge];
  const double s = edge_quadrature().points[q];
  return (1.0 - s) * mesh_.vertices[be.v[0]] + s * mesh_.vertices[be.v[1]];
}

double Assembler::boundary_weight(std::size_t edge, int q) const {
  const auto& be = mesh_.boundary_edges[edge];
  return edge_quadrature().weights[q] * norm(mesh_.vertices[be.v[1]] - mesh_.vertices[be.v[0]]);
}

Vec2 Assembler::boundary_normal(std::size_t edge, int q, BoundaryNormal mode) const {
  if (mode == BoundaryNormal::radial && mesh_.circle) {
    const Vec2 r = boundary_point(edge, q) - mesh_.circle->center;
    return (1.0 / norm(r)) * r;
  }
  return mesh_.boundary_edges[edge].normal;
}

double Assembler::value_at(const DofMap& dofs, std::span<const double> coeffs, std::size_t triangle, int q) const {
  const auto& basis = dofs.order() == 1 ? p1_basis_.at[q] : p2_basis_.at[q];
  const auto cell = dofs.cell_dofs(triangle);
  double v = 0.0;
  for (int i = 0; i < basis.size; ++i) v += coeffs[cell[i]] * basis.values[i];
  return v;
}

namespace {

double checked_viscosity(const ProblemCoefficients& coeffs, double c) {
  const double mu = coeffs.viscosity(c);
  if (!(mu >= 0.5 * coeffs.viscosity_min && mu <= 2.0 * coeffs.viscosity_max))
    throw CoefficientBlowup("viscosity " + std::to_string(mu) + " at concentration " + std::to_string(c) +
                            " is outside [mu_min/2, 2 mu_max]");
  return mu;
}

}  // namespace

PressureSystem Assembler::assemble_pressure(std::span<const double> concentration, const ProblemCoefficients& coeffs,
                                            double t) const {
  if (concentration.size() != p1_.dof_count()) throw std::invalid_argument("assemble_pressure: concentration size");
  PressureSystem sys;
  sys.matrix = p2_pattern_;
  const std::size_t n = p2_.dof_count();
  sys.rhs.assign(n, 0.0);
  sys.mass.assign(n, 0.0);
  auto& values = sys.matrix.values();

  const std::size_t nq = rule_.size();
  for (std::size_t tri = 0; tri < mesh_.triangle_count(); ++tri) {
    const auto cell = p2_.cell_dofs(tri);
    const ElementMap& fmap = maps_[tri];
    double local[6][6] = {};
    for (std::size_t q = 0; q < nq; ++q) {
      const int qi = static_cast<int>(q);
      const Vec2 x = point(tri, qi);
      const double w = weight(tri, qi);
      const double c = value_at(p1_, concentration, tri, qi);
      const double mobility = coeffs.permeability(x) / checked_viscosity(coeffs, c);
      const double source = eval_or_zero(coeffs.injection, x, t) - eval_or_zero(coeffs.production, x, t) +
                            eval_or_zero(coeffs.pressure_source, x, t);
      const auto& basis = p2_basis_.at[q];
      std::array<Vec2, 6> grad;
      for (int i = 0; i < 6; ++i) grad[i] = fmap.physical_gradient(basis.gradients[i]);
      for (int i = 0; i < 6; ++i) {
        sys.rhs[cell[i]] += w * source * basis.values[i];
        sys.mass[cell[i]] += w * basis.values[i];
        for (int j = 0; j < 6; ++j) local[i][j] += w * mobility * mdisp::dot(grad[j], grad[i]);
      }
    }
    const long* pos = p2_scatter_.data() + tri * 36;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) values[pos[i * 6 + j]] += local[i][j];
  }

  if (coeffs.boundary_flux) {
    const auto& edge_rule = edge_quadrature();
    for (std::size_t e = 0; e < mesh_.boundary_edges.size(); ++e) {
      const auto cell = p2_.cell_dofs(mesh_.boundary_edges[e].triangle);
      const int local = boundary_local_edge_[e];
      for (std::size_t q = 0; q < edge_rule.points.size(); ++q) {
        const int qi = static_cast<int>(q);
        const Vec2 x = boundary_point(e, qi);
        const double flux = coeffs.boundary_flux(x, t, boundary_normal(e, qi, coeffs.boundary_normal));
        const auto& basis = p2_edge_basis_[local * edge_rule.points.size() + q];
        for (int i = 0; i < 6; ++i) sys.rhs[cell[i]] -= boundary_weight(e, qi) * flux * basis.values[i];
      }
    }
  }
  double sum = 0.0;
  for (double v : sys.rhs) sum += v;
  sys.compatibility_defect = std::abs(sum);
  return sys;
}

VelocityField Assembler::compute_velocity(std::span<const double> pressure, std::span<const double> concentration,
                                          const ProblemCoefficients& coeffs) const {
  if (pressure.size() != p2_.dof_count() || concentration.size() != p1_.dof_count())
    throw std::invalid_argument("compute_velocity: coefficient vector size");
  VelocityField field;
  field.volume_points = static_cast<int>(rule_.size());
  field.edge_points = static_cast<int>(edge_quadrature().points.size());
  field.volume.reserve(mesh_.triangle_count() * rule_.size());

  auto velocity_from = [&](std::size_t tri, const BasisValues& p2b, const BasisValues& p1b, Vec2 x) {
    const auto pcell = p2_.cell_dofs(tri);
    const auto ccell = p1_.cell_dofs(tri);
    Vec2 ref_grad;
    for (int i = 0; i < 6; ++i) ref_grad = ref_grad + pressure[pcell[i]] * p2b.gradients[i];
    double c = 0.0;
    for (int i = 0; i < 3; ++i) c += concentration[ccell[i]] * p1b.values[i];
    const double mobility = coeffs.permeability(x) / coeffs.viscosity(c);
    return -mobility * maps_[tri].physical_gradient(ref_grad);
  };

  for (std::size_t tri = 0; tri < mesh_.triangle_count(); ++tri) {
    for (std::size_t q = 0; q < rule_.size(); ++q)
      field.volume.push_back(velocity_from(tri, p2_basis_.at[q], p1_basis_.at[q], point(tri, static_cast<int>(q))));
  }
  const std::size_t ne = edge_quadrature().points.size();
  for (std::size_t e = 0; e < mesh_.boundary_edges.size(); ++e) {
    const int local = boundary_local_edge_[e];
    for (std::size_t q = 0; q < ne; ++q) {
      field.boundary.push_back(velocity_from(mesh_.boundary_edges[e].triangle, p2_edge_basis_[local * ne + q],
                                             p1_edge_basis_[local * ne + q], boundary_point(e, static_cast<int>(q))));
    }
  }
  return field;
}

template <class Kernel>
SparseMatrix Assembler::assemble_p1(Kernel&& kernel) const {
  SparseMatrix m = p1_pattern_;
  auto& values = m.values();
  for (std::size_t tri = 0; tri < mesh_.triangle_count(); ++tri) {
    const ElementMap& fmap = maps_[tri];
    double local[3][3] = {};
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      const auto& basis = p1_basis_.at[q];
      std::array<Vec2, 3> grad;
      for (int i = 0; i < 3; ++i) grad[i] = fmap.physical_gradient(basis.gradients[i]);
      kernel(tri, static_cast<int>(q), basis, grad, local);
    }
    const long* pos = p1_scatter_.data() + tri * 9;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) values[pos[i * 3 + j]] += local[i][j];
  }
  return m;
}

SparseMatrix Assembler::p1_mass() const {
  return assemble_p1([&](std::size_t tri, int q, const BasisValues& b, const std::array<Vec2, 3>&, double (*local)[3]) {
    const double w = weight(tri, q);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) local[i][j] += w * b.values[j] * b.values[i];
  });
}

SparseMatrix Assembler::convection(const VelocityField& velocity) const {
  return assemble_p1([&](std::size_t tri, int q, const BasisValues& b, const std::array<Vec2, 3>& g, double (*local)[3]) {
    const double w = weight(tri, q);
    const Vec2 u = velocity.at(tri, q);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) local[i][j] += w * mdisp::dot(u, g[j]) * b.values[i];
  });
}

SparseMatrix Assembler::adjoint_convection(const VelocityField& velocity) const {
  return assemble_p1([&](std::size_t tri, int q, const BasisValues& b, const std::array<Vec2, 3>& g, double (*local)[3]) {
    const double w = weight(tri, q);
    const Vec2 u = velocity.at(tri, q);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) local[i][j] += w * b.values[j] * mdisp::dot(u, g[i]);
  });
}

SparseMatrix Assembler::dispersion_stiffness(const VelocityField& velocity, const DispersionModel& model) const {
  return assemble_p1([&](std::size_t tri, int q, const BasisValues&, const std::array<Vec2, 3>& g, double (*local)[3]) {
    const double w = weight(tri, q);
    const SymMat2 d = evaluate_dispersion(model, velocity.at(tri, q));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) local[i][j] += w * mdisp::dot(d * g[j], g[i]);
  });
}

ConcentrationSystem Assembler::assemble_concentration(std::span<const double> previous, const VelocityField& velocity,
                                                      const ProblemCoefficients& coeffs, double tau, double t,
                                                      ConvectionMode mode) const {
  if (!(tau > 0.0)) throw std::invalid_argument("assemble_concentration: time step must be positive");
  if (previous.size() != p1_.dof_count()) throw std::invalid_argument("assemble_concentration: concentration size");
  if (velocity.volume.size() != mesh_.triangle_count() * rule_.size())
    throw std::invalid_argument("assemble_concentration: velocity field does not match the quadrature");

  ConcentrationSystem sys;
  sys.rhs.assign(p1_.dof_count(), 0.0);
  const double mass_scale = coeffs.porosity / tau;
  const bool skew = mode == ConvectionMode::skew;

  sys.matrix = assemble_p1([&](std::size_t tri, int q, const BasisValues& b, const std::array<Vec2, 3>& g,
                               double (*local)[3]) {
    const double w = weight(tri, q);
    const Vec2 x = point(tri, q);
    const Vec2 u = velocity.at(tri, q);
    const SymMat2 d = evaluate_dispersion(coeffs.dispersion, u);
    const double q_in = eval_or_zero(coeffs.injection, x, t);
    const double reaction = skew ? 0.5 * (q_in + eval_or_zero(coeffs.production, x, t)) : q_in;
    const double load = eval_or_zero(coeffs.injected_concentration, x, t) * q_in +
                        eval_or_zero(coeffs.concentration_source, x, t);
    const auto cell = p1_.cell_dofs(tri);
    double c_prev = 0.0;
    for (int j = 0; j < 3; ++j) c_prev += previous[cell[j]] * b.values[j];
    for (int i = 0; i < 3; ++i) {
      sys.rhs[cell[i]] += w * (mass_scale * c_prev + load) * b.values[i];
      for (int j = 0; j < 3; ++j) {
        const double mass = b.values[j] * b.values[i];
        double conv = mdisp::dot(u, g[j]) * b.values[i];
        if (skew) conv = 0.5 * conv - 0.5 * b.values[j] * mdisp::dot(u, g[i]);
        local[i][j] += w * ((mass_scale + reaction) * mass + mdisp::dot(d * g[j], g[i]) + conv);
      }
    }
  });

  const auto& edge_rule = edge_quadrature();
  const std::size_t ne = edge_rule.points.size();
  const bool flux_correction = skew && coeffs.skew_flux_correction && static_cast<bool>(coeffs.boundary_flux);
  if (flux_correction || coeffs.dispersive_flux) {
    for (std::size_t e = 0; e < mesh_.boundary_edges.size(); ++e) {
      const int tri = mesh_.boundary_edges[e].triangle;
      const auto cell = p1_.cell_dofs(tri);
      const int local = boundary_local_edge_[e];
      for (std::size_t q = 0; q < ne; ++q) {
        const int qi = static_cast<int>(q);
        const Vec2 x = boundary_point(e, qi);
        const Vec2 n = boundary_normal(e, qi, coeffs.boundary_normal);
        const double w = boundary_weight(e, qi);
        const auto& b = p1_edge_basis_[local * ne + q];
        if (coeffs.dispersive_flux) {
          const double gb = coeffs.dispersive_flux(x, t, n);
          for (int i = 0; i < 3; ++i) sys.rhs[cell[i]] += w * gb * b.values[i];
        }
        if (flux_correction) {
          const double fb = coeffs.boundary_flux(x, t, n);
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) sys.matrix.add(cell[i], cell[j], 0.5 * w * fb * b.values[j] * b.values[i]);
        }
      }
    }
  }
  return sys;
}

VelocityField Assembler::sample_velocity(const std::function<Vec2(Vec2)>& u) const {
  VelocityField field;
  field.volume_points = static_cast<int>(rule_.size());
  field.edge_points = static_cast<int>(edge_quadrature().points.size());
  for (std::size_t tri = 0; tri < mesh_.triangle_count(); ++tri)
    for (int q = 0; q < field.volume_points; ++q) field.volume.push_back(u(point(tri, q)));
  for (std::size_t e = 0; e < mesh_.boundary_edges.size(); ++e)
    for (int q = 0; q < field.edge_points; ++q) field.boundary.push_back(u(boundary_point(e, q)));
  return field;
}

}  // namespace mdisp
