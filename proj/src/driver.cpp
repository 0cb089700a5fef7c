#include "mdisp/driver.hpp"

#include <chrono>
#include <cmath>

#include "mdisp/fe.hpp"

namespace mdisp {

TimeGrid TimeGrid::from_step(double final_time, double tau) {
  if (!(final_time > 0.0) || !(tau > 0.0)) throw std::invalid_argument("TimeGrid: T and tau must be positive");
  const double ratio = final_time / tau;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio)
    throw std::invalid_argument("TimeGrid: tau does not divide T");
  return TimeGrid{final_time, static_cast<int>(rounded)};
}

void TimeGrid::validate() const {
  if (!(final_time > 0.0) || steps < 1) throw std::invalid_argument("TimeGrid: need T > 0 and N >= 1");
}

Simulation::Simulation(const Assembler& assembler, ProblemCoefficients coeffs, TimeGrid grid, DriverOptions options)
    : assembler_(assembler),
      coeffs_(std::move(coeffs)),
      grid_(grid),
      options_(options),
      mass_(assembler.p1_mass()) {
  grid_.validate();
  if (!coeffs_.permeability || !coeffs_.viscosity || !coeffs_.initial_concentration)
    throw std::invalid_argument("Simulation: permeability, viscosity and initial concentration are required");
}

double Simulation::concentration_l2(const std::vector<double>& c) const {
  const std::vector<double> mc = mass_ * c;
  return std::sqrt(std::max(0.0, dot(c, mc)));
}

void Simulation::solve_pressure(TimeStepState& state, const std::vector<double>& initial_guess) const {
  PressureSystem sys = assembler_.assemble_pressure(state.concentration, coeffs_, state.time);
  const double rhs_norm = norm2(sys.rhs);
  state.compatibility_defect = rhs_norm > 0.0 ? sys.compatibility_defect / rhs_norm : 0.0;
  if (state.compatibility_defect > 1e-2 && options_.warn)
    options_.warn("step " + std::to_string(state.step) + ": pressure data compatibility defect " +
                  std::to_string(state.compatibility_defect) + " relative to the right-hand side");
  state.pressure = initial_guess;
  state.pressure.resize(assembler_.p2().dof_count(), 0.0);
  state.pressure_report = cg_deflated(sys.matrix, sys.rhs, state.pressure, Deflation{sys.mass, {}},
                                      options_.pressure_solver);
  if (!state.pressure_report.converged)
    throw StepFailure(state.step, state.pressure_report, "pressure solve did not converge");
  const double mean = dot(sys.mass, state.pressure);
  if (std::abs(mean) > 1e-9 * norm2(sys.mass) * norm2(state.pressure))
    throw StepFailure(state.step, state.pressure_report, "pressure lost its zero mean");
  state.velocity = assembler_.compute_velocity(state.pressure, state.concentration, coeffs_);
}

TimeStepState Simulation::initialize() const {
  const auto start = std::chrono::steady_clock::now();
  TimeStepState state;
  state.step = 0;
  state.time = 0.0;
  state.concentration = interpolate(assembler_.p1(), coeffs_.initial_concentration);
  try {
    solve_pressure(state, {});
  } catch (const CoefficientBlowup& e) {
    throw StepFailure(0, SolveReport{}, e.what());
  }
  state.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return state;
}

TimeStepState Simulation::step(const TimeStepState& previous) const {
  try {
    return advance(previous);
  } catch (const CoefficientBlowup& e) {
    throw StepFailure(previous.step + 1, SolveReport{}, e.what());
  }
}

TimeStepState Simulation::advance(const TimeStepState& previous) const {
  const auto start = std::chrono::steady_clock::now();
  TimeStepState state;
  state.step = previous.step + 1;
  state.time = grid_.time(state.step);

  ConcentrationSystem sys = assembler_.assemble_concentration(previous.concentration, previous.velocity, coeffs_,
                                                              grid_.tau(), state.time, options_.mode);
  state.concentration = previous.concentration;
  state.concentration_report =
      gmres(sys.matrix, sys.rhs, state.concentration, options_.gmres_restart, options_.concentration_solver);
  if (!state.concentration_report.converged)
    throw StepFailure(state.step, state.concentration_report, "concentration solve did not converge");

  solve_pressure(state, previous.pressure);
  state.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return state;
}

RunResult Simulation::run(const std::vector<Observer>& observers) const {
  RunResult result;
  TimeStepState state = initialize();
  result.concentration_l2.push_back(concentration_l2(state.concentration));
  for (const auto& observe : observers) observe(state);
  for (int n = 1; n <= grid_.steps; ++n) {
    state = step(state);
    result.concentration_l2.push_back(concentration_l2(state.concentration));
    for (const auto& observe : observers) observe(state);
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace mdisp
