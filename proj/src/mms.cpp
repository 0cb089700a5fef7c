#include "mdisp/mms.hpp"

#include <algorithm>

#include <cmath>
#include <stdexcept>

namespace mdisp {

Vec2 ManufacturedSolution::velocity(Vec2 x, double t) const {
  const double mobility = permeability(x) / viscosity(concentration(x, t));
  return -mobility * pressure_gradient(x, t);
}

Vec2 ManufacturedSolution::dispersive_flux(Vec2 x, double t) const {
  return evaluate_dispersion(dispersion, velocity(x, t)) * concentration_gradient(x, t);
}

ManufacturedSolution section6_solution() {
  ManufacturedSolution s;
  s.domain = Circle{{0.5, 0.5}, 0.5};
  s.porosity = 1.0;
  s.permeability = [](Vec2) { return 2.0; };
  s.viscosity = [](double c) { return 1.0 + c; };
  s.viscosity_min = 1.0;
  s.viscosity_max = 2.0;
  s.dispersion = ScalarDispersionParams{1.0, 0.1};
  s.pressure = [](Vec2 x, double t) { return 100.0 * (x.x - t) * (x.x - t) * std::exp(-t); };
  s.pressure_gradient = [](Vec2 x, double t) { return Vec2{200.0 * (x.x - t) * std::exp(-t), 0.0}; };
  s.concentration = [](Vec2 x, double t) { return 0.5 + 0.2 * std::exp(-t) * std::cos(x.x) * std::sin(x.y); };
  s.concentration_gradient = [](Vec2 x, double t) {
    const double a = 0.2 * std::exp(-t);
    return Vec2{-a * std::sin(x.x) * std::sin(x.y), a * std::cos(x.x) * std::cos(x.y)};
  };
  s.concentration_rate = [](Vec2 x, double t) { return -0.2 * std::exp(-t) * std::cos(x.x) * std::sin(x.y); };
  return s;
}

double fd_divergence(const VectorField& flux, Vec2 p, double step) {
  // actual representable offsets, so rounding of p +- step does not bias the quotient
  const double xp = p.x + step, xm = p.x - step;
  const double yp = p.y + step, ym = p.y - step;
  const double dx = flux({xp, p.y}).x - flux({xm, p.y}).x;
  const double dy = flux({p.x, yp}).y - flux({p.x, ym}).y;
  return dx / (xp - xm) + dy / (yp - ym);
}

ManufacturedSources manufacture_sources(const ManufacturedSolution& solution, double fd_step) {
  if (!(fd_step >= 1e-7 && fd_step <= 1e-4))
    throw std::invalid_argument("manufacture_sources: fd_step must lie in [1e-7, 1e-4]");
  ManufacturedSources out;
  // the lambdas own a copy of the solution
  out.pressure_source = [solution, fd_step](Vec2 x, double t) {
    return fd_divergence([&](Vec2 y) { return solution.velocity(y, t); }, x, fd_step);
  };
  out.concentration_source = [solution, fd_step](Vec2 x, double t) {
    const double div = fd_divergence([&](Vec2 y) { return solution.dispersive_flux(y, t); }, x, fd_step);
    return solution.porosity * solution.concentration_rate(x, t) - div +
           dot(solution.velocity(x, t), solution.concentration_gradient(x, t));
  };
  out.boundary_flux = [solution](Vec2 x, double t, Vec2 n) { return dot(solution.velocity(x, t), n); };
  out.dispersive_flux = [solution](Vec2 x, double t, Vec2 n) { return dot(solution.dispersive_flux(x, t), n); };
  return out;
}

ProblemCoefficients manufactured_problem(const ManufacturedSolution& solution, const ManufacturedSources& sources,
                                         ConvectionMode form, double velocity_lag) {
  if (!(velocity_lag >= 0.0)) throw std::invalid_argument("manufactured_problem: velocity lag must be nonnegative");
  ProblemCoefficients c;
  c.permeability = solution.permeability;
  c.viscosity = solution.viscosity;
  c.viscosity_min = solution.viscosity_min;
  c.viscosity_max = solution.viscosity_max;
  c.porosity = solution.porosity;
  c.dispersion = solution.dispersion;
  c.pressure_source = sources.pressure_source;
  c.concentration_source = sources.concentration_source;
  c.boundary_flux = sources.boundary_flux;
  c.dispersive_flux = sources.dispersive_flux;
  c.initial_concentration = [conc = solution.concentration](Vec2 x) { return conc(x, 0.0); };
  if (form == ConvectionMode::skew) {
    // f and f_b stand in for div U and U . n of the velocity the step
    // actually uses, so they are taken at that velocity's time level.
    const auto lagged = [velocity_lag](double t) { return std::max(t - velocity_lag, 0.0); };
    c.concentration_source = [g = sources.concentration_source, f = sources.pressure_source,
                              conc = solution.concentration, lagged](Vec2 x, double t) {
      return g(x, t) + 0.5 * f(x, lagged(t)) * conc(x, t);
    };
    c.dispersive_flux = [gb = sources.dispersive_flux, fb = sources.boundary_flux, conc = solution.concentration,
                         lagged](Vec2 x, double t, Vec2 n) {
      return gb(x, t, n) - 0.5 * fb(x, lagged(t), n) * conc(x, t);
    };
    c.skew_flux_correction = false;
  }
  return c;
}

}  // namespace mdisp
