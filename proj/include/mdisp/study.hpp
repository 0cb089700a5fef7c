#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdisp/assembly.hpp"
#include "mdisp/driver.hpp"

namespace mdisp {

/// Configuration of a single run or a convergence study. See README.md for
/// the JSON schema; every key is optional and unknown keys are rejected.
struct StudyConfig {
  std::string case_name = "section6";
  std::vector<int> meshes{16};             // boundary node counts M, h = 1/M
  std::vector<double> time_steps{0.03125};  // tau values
  double final_time = 1.0;
  ConvectionMode mode = ConvectionMode::skew;
  BoundaryNormal boundary_normal = BoundaryNormal::edge;
  SolverOptions pressure_solver{1e-11, 20000};
  SolverOptions concentration_solver{1e-10, 5000};
  int gmres_restart = 30;
  double fd_step = 1e-5;
  std::filesystem::path output_dir = "out";
  bool dump_fields = false;
  int dump_every = 0;  // 0: final step only

  /// Throws ConfigError on a violated invariant.
  void validate() const;
};

/// Invalid configuration; `path` is the JSON pointer of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Parses a config document on top of `defaults`. Time steps may be numbers
/// or strings of the form "1/32" or "2^-12".
StudyConfig parse_config(const nlohmann::json& document, StudyConfig defaults = {});
StudyConfig load_config(const std::filesystem::path& path, StudyConfig defaults = {});
nlohmann::json config_to_json(const StudyConfig& config);

/// Final-time errors of one simulation together with solver statistics.
struct ErrorRecord {
  int boundary_nodes = 0;
  double h = 0.0;
  double tau = 0.0;
  int steps = 0;
  std::size_t vertices = 0;
  std::size_t triangles = 0;
  double time = 0.0;  // t_N
  double c_l2 = 0.0;
  double u_l2 = 0.0;
  double c_linf = 0.0;
  double u_linf = 0.0;
  double c_h1 = 0.0;       // H1 seminorm
  double p_l2 = 0.0;       // against the exact pressure shifted to zero mean
  double p_grad_l2 = 0.0;  // gradient L2 error of the pressure
  bool converged = false;
  int max_pressure_iterations = 0;
  int max_concentration_iterations = 0;
  double max_compatibility_defect = 0.0;
  double wall_seconds = 0.0;
};

enum class StudyKind { single, spatial, temporal };

struct ConvergenceReport {
  StudyKind kind = StudyKind::spatial;
  std::string note;  // protocol summary written into the report header
  std::vector<ErrorRecord> rows;
  /// orders[column][i] between rows i and i + 1; columns are c L2, u L2,
  /// c Linf, u Linf.
  std::vector<std::vector<double>> orders;
  /// Order of the finest pair of rows, per column.
  std::vector<double> headline;
};

inline constexpr const char* kErrorColumns[] = {"c_L2", "u_L2", "c_Linf", "u_Linf"};

/// One simulation of the configured case on M boundary nodes with step tau.
/// Writes fields_step<N>.vtk into `dump_dir` when field dumps are enabled.
/// Solver failures propagate as StepFailure.
ErrorRecord run_single(const StudyConfig& config, int boundary_nodes, double tau,
                       const std::optional<std::filesystem::path>& dump_dir = std::nullopt);

/// Rows over the mesh list at the single configured tau.
ConvergenceReport run_spatial_study(const StudyConfig& config);
/// Rows over the tau list on the single configured mesh.
ConvergenceReport run_temporal_study(const StudyConfig& config);

/// Pairwise and headline orders of the rows (needs at least two rows).
void compute_orders(ConvergenceReport& report);

/// CSV with the table columns first, then order rows. Contains no timing
/// data, so identical configurations give identical bytes.
std::string report_to_csv(const ConvergenceReport& report);
nlohmann::json report_to_json(const ConvergenceReport& report);
nlohmann::json record_to_json(const ErrorRecord& record);

/// Five significant digits in the tables' style, e.g. 1.3995E-04.
std::string format_error(double value);
/// Orders with five significant digits.
std::string format_order(double value);

}  // namespace mdisp
