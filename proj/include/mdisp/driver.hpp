#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdisp/assembly.hpp"
#include "mdisp/sparse.hpp"

namespace mdisp {

/// Uniform partition 0 = t_0 < ... < t_N = T.
struct TimeGrid {
  double final_time = 1.0;
  int steps = 1;

  /// Throws unless final_time / tau is an integer (to 1e-9 relative).
  static TimeGrid from_step(double final_time, double tau);

  [[nodiscard]] double tau() const { return final_time / steps; }
  [[nodiscard]] double time(int n) const { return n == steps ? final_time : n * tau(); }
  void validate() const;
};

struct DriverOptions {
  ConvectionMode mode = ConvectionMode::direct;
  SolverOptions pressure_solver{1e-11, 20000};
  SolverOptions concentration_solver{1e-10, 5000};
  int gmres_restart = 30;
  /// Receives a message when the pressure data are far from compatible
  /// (|sum rhs| > 1e-2 ||rhs||); the deflated solve then drops that part.
  std::function<void(const std::string&)> warn;
};

/// Fields at one time level: C^n, and the pressure P^n (mean zero) and
/// velocity U^n computed from C^n at t_n. U^n is the lagged velocity of the
/// next concentration step.
struct TimeStepState {
  int step = 0;
  double time = 0.0;
  std::vector<double> concentration;  // P1
  std::vector<double> pressure;       // P2
  VelocityField velocity;
  SolveReport pressure_report;
  SolveReport concentration_report;
  double compatibility_defect = 0.0;  // |sum rhs| / ||rhs|| of the pressure system
  double wall_seconds = 0.0;
};

/// A step failed, either because a linear solve did not converge or because
/// the viscosity left its admissible band; `step` is the time level that
/// could not be computed.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(int step, SolveReport report, const std::string& what)
      : std::runtime_error(what), step_(step), report_(report) {}
  [[nodiscard]] int step() const { return step_; }
  [[nodiscard]] const SolveReport& report() const { return report_; }

 private:
  int step_;
  SolveReport report_;
};

struct RunResult {
  TimeStepState final_state;
  std::vector<double> concentration_l2;  // ||C^n||_{L2} for n = 0..N
};

/// Linearized time marching: per step, the concentration system with the
/// lagged velocity, then the pressure and velocity at the new level.
class Simulation {
 public:
  using Observer = std::function<void(const TimeStepState&)>;

  Simulation(const Assembler& assembler, ProblemCoefficients coeffs, TimeGrid grid, DriverOptions options = {});

  /// C^0 by nodal interpolation, then P^0 and U^0.
  [[nodiscard]] TimeStepState initialize() const;
  [[nodiscard]] TimeStepState step(const TimeStepState& previous) const;
  /// Runs all N steps; observers see every state including n = 0.
  [[nodiscard]] RunResult run(const std::vector<Observer>& observers = {}) const;

  [[nodiscard]] double concentration_l2(const std::vector<double>& c) const;
  [[nodiscard]] const TimeGrid& grid() const { return grid_; }
  [[nodiscard]] const Assembler& assembler() const { return assembler_; }

 private:
  TimeStepState advance(const TimeStepState& previous) const;
  void solve_pressure(TimeStepState& state, const std::vector<double>& initial_guess) const;

  const Assembler& assembler_;
  ProblemCoefficients coeffs_;
  TimeGrid grid_;
  DriverOptions options_;
  SparseMatrix mass_;
};

}  // namespace mdisp
