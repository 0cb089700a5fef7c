// Command-line front end: single runs, spatial and temporal convergence
// studies of the manufactured disk case, and mesh generation.
//
// Exit codes: 0 success, 1 unexpected error, 2 invalid configuration or
// usage, 3 solver failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdisp/mesh.hpp"
#include "mdisp/study.hpp"
#include "mdisp/vtk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

enum class Preset { unset, fast, paper_exact };

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  bool fast = false;
  bool paper_exact = false;
  bool dump_fields = false;

  [[nodiscard]] Preset preset() const {
    if (paper_exact) return Preset::paper_exact;
    if (fast) return Preset::fast;
    return Preset::unset;
  }
};

void add_common(CLI::App* cmd, CommonOptions& o, bool presets) {
  cmd->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out_dir, "output directory (overrides the config)");
  if (presets) {
    auto* fast = cmd->add_flag("--fast", o.fast, "desk-scale protocol (default)");
    auto* exact = cmd->add_flag("--paper-exact", o.paper_exact, "published protocol (much slower)");
    fast->excludes(exact);
  }
  cmd->add_flag("--dump-fields", o.dump_fields, "write fields_step<N>.vtk files");
}

mdisp::StudyConfig load(const CommonOptions& o, mdisp::StudyConfig defaults) {
  mdisp::StudyConfig c = o.config_path.empty() ? defaults : mdisp::load_config(o.config_path, defaults);
  if (!o.out_dir.empty()) c.output_dir = o.out_dir;
  if (o.dump_fields) c.dump_fields = true;
  c.validate();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_outputs(const mdisp::StudyConfig& config, const mdisp::ConvergenceReport& report) {
  write_text(config.output_dir / "report.csv", mdisp::report_to_csv(report));
  json doc = mdisp::report_to_json(report);
  doc["config"] = mdisp::config_to_json(config);
  write_text(config.output_dir / "report.json", doc.dump(2) + "\n");
}

void echo_config(const mdisp::StudyConfig& config) {
  fs::create_directories(config.output_dir);
  write_text(config.output_dir / "config-echo.json", mdisp::config_to_json(config).dump(2) + "\n");
}

void print_report(const mdisp::ConvergenceReport& report) {
  std::cout << mdisp::report_to_csv(report);
  for (const auto& r : report.rows)
    std::cout << "# M=" << r.boundary_nodes << " steps=" << r.steps << " wall=" << r.wall_seconds << "s\n";
}

int cmd_run(const CommonOptions& o) {
  mdisp::StudyConfig defaults;
  defaults.output_dir = "out/run";
  mdisp::StudyConfig config = load(o, defaults);
  if (config.meshes.size() != 1) throw mdisp::ConfigError("/meshes", "run takes exactly one mesh");
  if (config.time_steps.size() != 1) throw mdisp::ConfigError("/time_steps", "run takes exactly one tau");
  echo_config(config);
  mdisp::ConvergenceReport report;
  report.kind = mdisp::StudyKind::single;
  std::ostringstream note;
  note << "single run, M = " << config.meshes.front() << ", tau = " << config.time_steps.front()
       << ", errors at T = " << config.final_time;
  report.note = note.str();
  report.rows.push_back(
      mdisp::run_single(config, config.meshes.front(), config.time_steps.front(), config.output_dir));
  write_outputs(config, report);
  std::cout << mdisp::record_to_json(report.rows.front()).dump(2) << "\n";
  return 0;
}

int cmd_study_spatial(const CommonOptions& o) {
  mdisp::StudyConfig defaults;
  defaults.meshes = {16, 32, 64};
  defaults.time_steps = {std::ldexp(1.0, -12)};
  defaults.output_dir = "out/spatial";
  mdisp::StudyConfig config = load(o, defaults);
  if (o.preset() != Preset::unset) config.time_steps = {std::ldexp(1.0, o.preset() == Preset::fast ? -12 : -14)};
  config.validate();
  echo_config(config);
  const auto report = mdisp::run_spatial_study(config);
  write_outputs(config, report);
  print_report(report);
  return 0;
}

int cmd_study_temporal(const CommonOptions& o) {
  mdisp::StudyConfig defaults;
  defaults.meshes = {128};
  defaults.time_steps = {1.0 / 32, 1.0 / 64, 1.0 / 128};
  defaults.output_dir = "out/temporal";
  mdisp::StudyConfig config = load(o, defaults);
  if (o.preset() != Preset::unset) config.meshes = {o.preset() == Preset::fast ? 128 : 256};
  config.validate();
  echo_config(config);
  const auto report = mdisp::run_temporal_study(config);
  write_outputs(config, report);
  print_report(report);
  return 0;
}

int cmd_mesh_gen(const CommonOptions& o, const std::vector<int>& sizes) {
  mdisp::StudyConfig defaults;
  defaults.output_dir = "out/mesh";
  mdisp::StudyConfig config = load(o, defaults);
  if (!sizes.empty()) config.meshes = sizes;
  config.validate();
  echo_config(config);
  json summary = json::array();
  for (int m : config.meshes) {
    const mdisp::Mesh mesh = mdisp::generate_disk_mesh({0.5, 0.5}, 0.5, m);
    const auto q = mdisp::mesh_quality(mesh);
    const std::string stem = "mesh_M" + std::to_string(m);
    mdisp::save_mesh(mesh, config.output_dir / (stem + ".json"));
    mdisp::write_vtk_file(config.output_dir / (stem + ".vtk"), mesh, {}, {}, stem);
    summary.push_back({{"M", m},
                       {"vertices", mesh.vertex_count()},
                       {"triangles", mesh.triangle_count()},
                       {"min_angle_deg", q.min_angle_deg},
                       {"h_max", q.h_max},
                       {"h_min", q.h_min},
                       {"shape_regularity", q.shape_regularity}});
  }
  write_text(config.output_dir / "report.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Miscible displacement in a disk: finite element runs and convergence studies"};
  app.require_subcommand(1);

  CommonOptions run_opts, spatial_opts, temporal_opts, mesh_opts;
  std::vector<int> mesh_sizes;
  auto* run = app.add_subcommand("run", "one simulation (first entries of meshes and time_steps)");
  add_common(run, run_opts, false);
  auto* spatial = app.add_subcommand("study-spatial", "mesh refinement at fixed tau");
  add_common(spatial, spatial_opts, true);
  auto* temporal = app.add_subcommand("study-temporal", "time step refinement on a fixed mesh");
  add_common(temporal, temporal_opts, true);
  auto* mesh = app.add_subcommand("mesh-gen", "generate disk meshes as JSON and VTK");
  add_common(mesh, mesh_opts, false);
  mesh->add_option("-M,--boundary-nodes", mesh_sizes, "boundary node counts (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*spatial) return cmd_study_spatial(spatial_opts);
    if (*temporal) return cmd_study_temporal(temporal_opts);
    if (*mesh) return cmd_mesh_gen(mesh_opts, mesh_sizes);
  } catch (const mdisp::ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return kExitConfig;
  } catch (const mdisp::StepFailure& e) {
    std::cerr << "solver failure at step " << e.step() << ": " << e.what() << " (iterations "
              << e.report().iterations << ", relative residual " << e.report().relative_residual << ")\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
