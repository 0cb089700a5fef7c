#pragma once

#include <functional>

#include "mdisp/assembly.hpp"
#include "mdisp/geometry.hpp"
#include "mdisp/mesh.hpp"
#include "mdisp/tensor.hpp"

namespace mdisp {

using VectorField = std::function<Vec2(Vec2)>;
using SpaceTimeVectorField = std::function<Vec2(Vec2, double)>;

/// Closed-form pressure and concentration together with the material laws
/// that turn them into an exact solution of the coupled system.
struct ManufacturedSolution {
  Circle domain;
  double porosity = 1.0;
  ScalarField permeability;
  std::function<double(double)> viscosity;
  double viscosity_min = 0.0;
  double viscosity_max = 0.0;
  DispersionModel dispersion;

  SpaceTimeField pressure;
  SpaceTimeField concentration;
  SpaceTimeVectorField pressure_gradient;
  SpaceTimeVectorField concentration_gradient;
  SpaceTimeField concentration_rate;  // dc/dt

  /// u = -(k / mu(c)) grad p
  [[nodiscard]] Vec2 velocity(Vec2 x, double t) const;
  /// D(u) grad c
  [[nodiscard]] Vec2 dispersive_flux(Vec2 x, double t) const;
};

/// p = 100 (x - t)^2 e^{-t}, c = 0.5 + 0.2 e^{-t} cos(x) sin(y) on the disk of
/// radius 0.5 centred at (0.5, 0.5), with k = 2, mu(c) = 1 + c and
/// D(u) = 1 + 0.1 |u|.
ManufacturedSolution section6_solution();

struct ManufacturedSources {
  SpaceTimeField pressure_source;       // f = div u
  SpaceTimeField concentration_source;  // g = gamma c_t - div(D grad c) + u . grad c
  BoundaryData boundary_flux;           // f_b = u . n
  BoundaryData dispersive_flux;         // g_b = D(u) grad c . n
};

/// Central-difference divergence of a vector field.
double fd_divergence(const VectorField& flux, Vec2 point, double step);

/// Sources obtained by central differencing the analytic fluxes with the
/// given step (in domain units, within [1e-7, 1e-4]).
ManufacturedSources manufacture_sources(const ManufacturedSolution& solution, double fd_step = 1e-5);

/// Problem data whose exact solution is `solution` under the given
/// convection form. For the direct form the sources are used as they are.
/// The skew form discretizes c div(u) / 2 and the boundary term
/// (u . n) c / 2 differently from the advective equation, so its data carry
/// them explicitly: g + f c / 2 in the volume and g_b - f_b c / 2 on the
/// boundary, with the assembler's own flux correction switched off. Both
/// forms then hold exactly for the manufactured fields. The time stepper
/// convects with the velocity of the previous level; `velocity_lag` (the
/// time step) evaluates f and f_b in those two terms at that level, so
/// they cancel the divergence of the velocity actually used.
ProblemCoefficients manufactured_problem(const ManufacturedSolution& solution, const ManufacturedSources& sources,
                                         ConvectionMode form = ConvectionMode::direct, double velocity_lag = 0.0);

}  // namespace mdisp
