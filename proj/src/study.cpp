#include "mdisp/study.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <limits>
#include <sstream>

#include "mdisp/mms.hpp"
#include "mdisp/norms.hpp"
#include "mdisp/vtk.hpp"

namespace mdisp {

using nlohmann::json;

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const char* mode_name(ConvectionMode m) { return m == ConvectionMode::skew ? "skew" : "direct"; }
const char* normal_name(BoundaryNormal n) { return n == BoundaryNormal::edge ? "edge" : "radial"; }

// "0.25", "1/32" or "2^-12"
std::optional<double> parse_step_text(const std::string& text) {
  auto number = [](std::string_view s) -> std::optional<double> {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
  };
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const auto num = number(std::string_view(text).substr(0, slash));
    const auto den = number(std::string_view(text).substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
  }
  if (const auto caret = text.find('^'); caret != std::string::npos) {
    const auto base = number(std::string_view(text).substr(0, caret));
    const auto exponent = number(std::string_view(text).substr(caret + 1));
    if (!base || !exponent) return std::nullopt;
    return std::pow(*base, *exponent);
  }
  return number(text);
}

class Reader {
 public:
  Reader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [key, value] : object_.items()) {
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) throw ConfigError(path_ + "/" + key, "unknown key");
    }
  }

  [[nodiscard]] const json* find(const char* key) const {
    const auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }
  [[nodiscard]] std::string at(const char* key) const { return path_ + "/" + key; }

  void number(const char* key, double& out) const {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(at(key), "expected a number");
      out = v->get<double>();
    }
  }
  void integer(const char* key, int& out) const {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
      const auto value = v->get<long long>();
      if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max())
        throw ConfigError(at(key), "integer out of range");
      out = static_cast<int>(value);
    }
  }
  void boolean(const char* key, bool& out) const {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void string(const char* key, std::string& out) const {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }

 private:
  const json& object_;
  std::string path_;
};

void read_solver(const Reader& parent, const char* key, SolverOptions& out) {
  const json* v = parent.find(key);
  if (!v) return;
  Reader r(*v, parent.at(key));
  r.allow({"relative_tolerance", "max_iterations"});
  r.number("relative_tolerance", out.relative_tolerance);
  r.integer("max_iterations", out.max_iterations);
}

json solver_json(const SolverOptions& s) {
  return json{{"relative_tolerance", s.relative_tolerance}, {"max_iterations", s.max_iterations}};
}

}  // namespace

void StudyConfig::validate() const {
  if (case_name != "section6") throw ConfigError("/case", "unknown case '" + case_name + "' (available: section6)");
  if (meshes.empty()) throw ConfigError("/meshes", "list must not be empty");
  for (std::size_t i = 0; i < meshes.size(); ++i)
    if (meshes[i] < 8) throw ConfigError("/meshes/" + std::to_string(i), "need at least 8 boundary nodes");
  if (!(final_time > 0.0) || !std::isfinite(final_time)) throw ConfigError("/final_time", "must be positive");
  if (time_steps.empty()) throw ConfigError("/time_steps", "list must not be empty");
  for (std::size_t i = 0; i < time_steps.size(); ++i) {
    const std::string path = "/time_steps/" + std::to_string(i);
    if (!(time_steps[i] > 0.0) || !std::isfinite(time_steps[i])) throw ConfigError(path, "must be positive");
    try {
      (void)TimeGrid::from_step(final_time, time_steps[i]);
    } catch (const std::invalid_argument&) {
      throw ConfigError(path, "tau = " + shortest(time_steps[i]) + " does not divide T = " + shortest(final_time));
    }
  }
  auto check_solver = [](const SolverOptions& s, const std::string& path) {
    if (!(s.relative_tolerance > 0.0 && s.relative_tolerance < 1.0))
      throw ConfigError(path + "/relative_tolerance", "must lie in (0, 1)");
    if (s.max_iterations < 1) throw ConfigError(path + "/max_iterations", "must be at least 1");
  };
  check_solver(pressure_solver, "/solver/pressure");
  check_solver(concentration_solver, "/solver/concentration");
  if (gmres_restart < 1) throw ConfigError("/solver/gmres_restart", "must be at least 1");
  if (!(fd_step >= 1e-7 && fd_step <= 1e-4)) throw ConfigError("/fd_step", "must lie in [1e-7, 1e-4]");
  if (dump_every < 0) throw ConfigError("/dump/every", "must be nonnegative");
}

StudyConfig parse_config(const json& document, StudyConfig config) {
  Reader root(document, "");
  root.allow({"case", "meshes", "time_steps", "final_time", "convection", "boundary_normal", "solver", "fd_step",
              "output", "dump"});
  root.string("case", config.case_name);

  if (const json* v = root.find("meshes")) {
    if (!v->is_array()) throw ConfigError("/meshes", "expected an array of integers");
    config.meshes.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& m = (*v)[i];
      if (!m.is_number_integer()) throw ConfigError("/meshes/" + std::to_string(i), "expected an integer");
      const auto value = m.get<long long>();
      if (value < 8 || value > 1 << 20) throw ConfigError("/meshes/" + std::to_string(i), "need 8 <= M <= 2^20");
      config.meshes.push_back(static_cast<int>(value));
    }
  }
  if (const json* v = root.find("time_steps")) {
    if (!v->is_array()) throw ConfigError("/time_steps", "expected an array");
    config.time_steps.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& t = (*v)[i];
      const std::string path = "/time_steps/" + std::to_string(i);
      if (t.is_number()) {
        config.time_steps.push_back(t.get<double>());
      } else if (t.is_string()) {
        const auto parsed = parse_step_text(t.get<std::string>());
        if (!parsed) throw ConfigError(path, "cannot parse '" + t.get<std::string>() + "' (use 0.25, 1/32 or 2^-12)");
        config.time_steps.push_back(*parsed);
      } else {
        throw ConfigError(path, "expected a number or a string");
      }
    }
  }
  root.number("final_time", config.final_time);

  if (const json* v = root.find("convection")) {
    if (*v == "skew") {
      config.mode = ConvectionMode::skew;
    } else if (*v == "direct") {
      config.mode = ConvectionMode::direct;
    } else {
      throw ConfigError("/convection", "expected \"skew\" or \"direct\"");
    }
  }
  if (const json* v = root.find("boundary_normal")) {
    if (*v == "edge") {
      config.boundary_normal = BoundaryNormal::edge;
    } else if (*v == "radial") {
      config.boundary_normal = BoundaryNormal::radial;
    } else {
      throw ConfigError("/boundary_normal", "expected \"edge\" or \"radial\"");
    }
  }
  if (const json* v = root.find("solver")) {
    Reader solver(*v, "/solver");
    solver.allow({"pressure", "concentration", "gmres_restart"});
    read_solver(solver, "pressure", config.pressure_solver);
    read_solver(solver, "concentration", config.concentration_solver);
    solver.integer("gmres_restart", config.gmres_restart);
  }
  root.number("fd_step", config.fd_step);
  if (const json* v = root.find("output")) {
    if (!v->is_string()) throw ConfigError("/output", "expected a string");
    config.output_dir = v->get<std::string>();
  }
  if (const json* v = root.find("dump")) {
    Reader dump(*v, "/dump");
    dump.allow({"enabled", "every"});
    dump.boolean("enabled", config.dump_fields);
    dump.integer("every", config.dump_every);
  }
  config.validate();
  return config;
}

StudyConfig load_config(const std::filesystem::path& path, StudyConfig defaults) {
  std::ifstream in(path);
  if (!in) throw ConfigError("/", "cannot open config file " + path.string());
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(document, std::move(defaults));
}

json config_to_json(const StudyConfig& c) {
  return json{{"case", c.case_name},
              {"meshes", c.meshes},
              {"time_steps", c.time_steps},
              {"final_time", c.final_time},
              {"convection", mode_name(c.mode)},
              {"boundary_normal", normal_name(c.boundary_normal)},
              {"solver",
               {{"pressure", solver_json(c.pressure_solver)},
                {"concentration", solver_json(c.concentration_solver)},
                {"gmres_restart", c.gmres_restart}}},
              {"fd_step", c.fd_step},
              {"output", c.output_dir.string()},
              {"dump", {{"enabled", c.dump_fields}, {"every", c.dump_every}}}};
}

namespace {

void dump_state(const std::filesystem::path& dir, const Assembler& a, const TimeStepState& s,
                const ManufacturedSolution& exact) {
  const Mesh& mesh = a.mesh();
  const std::size_t nv = mesh.vertex_count();
  std::vector<VtkScalar> points(3);
  points[0].name = "C";
  points[0].values.assign(s.concentration.begin(), s.concentration.begin() + static_cast<long>(nv));
  points[1].name = "P";  // the first P2 dofs are the vertex values
  points[1].values.assign(s.pressure.begin(), s.pressure.begin() + static_cast<long>(nv));
  points[2].name = "C_error";
  for (std::size_t i = 0; i < nv; ++i)
    points[2].values.push_back(s.concentration[i] - exact.concentration(mesh.vertices[i], s.time));

  std::vector<VtkScalar> cells(1);
  cells[0].name = "U_magnitude";  // mean over the element's quadrature points
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    double sum = 0.0;
    for (int q = 0; q < s.velocity.volume_points; ++q) sum += norm(s.velocity.at(t, q));
    cells[0].values.push_back(sum / s.velocity.volume_points);
  }
  write_vtk_file(dir / ("fields_step" + std::to_string(s.step) + ".vtk"), mesh, points, cells,
                 "step " + std::to_string(s.step) + " t = " + shortest(s.time));
}

}  // namespace

ErrorRecord run_single(const StudyConfig& config, int boundary_nodes, double tau,
                       const std::optional<std::filesystem::path>& dump_dir) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const ManufacturedSolution exact = section6_solution();
  const TimeGrid grid = TimeGrid::from_step(config.final_time, tau);
  ProblemCoefficients coeffs =
      manufactured_problem(exact, manufacture_sources(exact, config.fd_step), config.mode, grid.tau());
  coeffs.boundary_normal = config.boundary_normal;

  const Assembler assembler(generate_disk_mesh(exact.domain.center, exact.domain.radius, boundary_nodes));
  DriverOptions options;
  options.mode = config.mode;
  options.pressure_solver = config.pressure_solver;
  options.concentration_solver = config.concentration_solver;
  options.gmres_restart = config.gmres_restart;
  auto warned = std::make_shared<bool>(false);
  options.warn = [warned](const std::string& message) {
    if (*warned) return;  // once per run; the defect changes slowly between steps
    *warned = true;
    std::cerr << "warning: " << message << "\n";
  };
  const Simulation simulation(assembler, coeffs, grid, options);

  ErrorRecord record;
  record.boundary_nodes = boundary_nodes;
  record.h = 1.0 / boundary_nodes;
  record.tau = grid.tau();
  record.steps = grid.steps;
  record.vertices = assembler.mesh().vertex_count();
  record.triangles = assembler.mesh().triangle_count();

  const bool dumping = config.dump_fields && dump_dir.has_value();
  if (dumping) std::filesystem::create_directories(*dump_dir);
  const Simulation::Observer observe = [&](const TimeStepState& s) {
    record.max_pressure_iterations = std::max(record.max_pressure_iterations, s.pressure_report.iterations);
    record.max_concentration_iterations =
        std::max(record.max_concentration_iterations, s.concentration_report.iterations);
    record.max_compatibility_defect = std::max(record.max_compatibility_defect, s.compatibility_defect);
    const bool selected = s.step == grid.steps || (config.dump_every > 0 && s.step % config.dump_every == 0);
    if (dumping && selected) dump_state(*dump_dir, assembler, s, exact);
  };
  const RunResult result = simulation.run({observe});
  const TimeStepState& last = result.final_state;

  const double t = last.time;
  const ScalarField c = [&](Vec2 x) { return exact.concentration(x, t); };
  const std::function<Vec2(Vec2)> u = [&](Vec2 x) { return exact.velocity(x, t); };
  record.c_l2 = error_scalar(assembler, assembler.p1(), last.concentration, c, Norm::l2);
  record.c_linf = error_scalar(assembler, assembler.p1(), last.concentration, c, Norm::linf);
  record.u_l2 = error_velocity(assembler, last.velocity, u, Norm::l2);
  record.u_linf = error_velocity(assembler, last.velocity, u, Norm::linf);
  record.c_h1 = error_scalar(assembler, assembler.p1(), last.concentration, c, Norm::h1_semi,
                             [&](Vec2 x) { return exact.concentration_gradient(x, t); });
  const double p_mean = domain_mean(assembler, [&](Vec2 x) { return exact.pressure(x, t); });
  record.p_l2 = error_scalar(assembler, assembler.p2(), last.pressure,
                             [&](Vec2 x) { return exact.pressure(x, t) - p_mean; }, Norm::l2);
  record.p_grad_l2 = gradient_lq_error(assembler, assembler.p2(), last.pressure,
                                       [&](Vec2 x) { return exact.pressure_gradient(x, t); }, 2.0);
  record.time = t;
  record.converged = true;  // a failed solve throws StepFailure
  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

namespace {

std::string row_dir_name(const ErrorRecord& r) {
  return "M" + std::to_string(r.boundary_nodes) + "_N" + std::to_string(r.steps);
}

std::optional<std::filesystem::path> row_dump_dir(const StudyConfig& config, int m, double tau) {
  if (!config.dump_fields) return std::nullopt;
  ErrorRecord r;
  r.boundary_nodes = m;
  r.steps = TimeGrid::from_step(config.final_time, tau).steps;
  return config.output_dir / row_dir_name(r);
}

}  // namespace

ConvergenceReport run_spatial_study(const StudyConfig& config) {
  config.validate();
  if (config.time_steps.size() != 1) throw ConfigError("/time_steps", "a spatial study uses exactly one tau");
  if (config.meshes.size() < 2) throw ConfigError("/meshes", "a spatial study needs at least two meshes");
  for (std::size_t i = 1; i < config.meshes.size(); ++i)
    if (config.meshes[i] <= config.meshes[i - 1])
      throw ConfigError("/meshes/" + std::to_string(i), "meshes must be increasing");
  ConvergenceReport report;
  report.kind = StudyKind::spatial;
  const double tau = config.time_steps.front();
  report.note = "spatial convergence: tau = " + shortest(tau) + " fixed, h = 1/M, errors at T = " +
                shortest(config.final_time) + "; the O(tau) time error is common to all rows, so orders reflect h^2 " +
                "only while it stays below the spatial error";
  for (int m : config.meshes) report.rows.push_back(run_single(config, m, tau, row_dump_dir(config, m, tau)));
  compute_orders(report);
  return report;
}

ConvergenceReport run_temporal_study(const StudyConfig& config) {
  config.validate();
  if (config.meshes.size() != 1) throw ConfigError("/meshes", "a temporal study uses exactly one mesh");
  if (config.time_steps.size() < 2) throw ConfigError("/time_steps", "a temporal study needs at least two steps");
  for (std::size_t i = 1; i < config.time_steps.size(); ++i)
    if (config.time_steps[i] >= config.time_steps[i - 1])
      throw ConfigError("/time_steps/" + std::to_string(i), "time steps must be decreasing");
  ConvergenceReport report;
  report.kind = StudyKind::temporal;
  const int m = config.meshes.front();
  report.note = "temporal convergence: M = " + std::to_string(m) + " fixed (h = 1/" + std::to_string(m) +
                "), errors at T = " + shortest(config.final_time) +
                "; the O(h^2) spatial error is common to all rows, so orders reflect tau only while it stays "
                "below the time error";
  for (double tau : config.time_steps) report.rows.push_back(run_single(config, m, tau, row_dump_dir(config, m, tau)));
  compute_orders(report);
  return report;
}

void compute_orders(ConvergenceReport& report) {
  if (report.rows.size() < 2) throw std::invalid_argument("compute_orders: need at least two rows");
  report.orders.assign(4, {});
  report.headline.assign(4, 0.0);
  for (int col = 0; col < 4; ++col) {
    std::vector<double> errors;
    for (const auto& r : report.rows) {
      const double values[] = {r.c_l2, r.u_l2, r.c_linf, r.u_linf};
      errors.push_back(values[col]);
    }
    bool positive = true;
    for (double e : errors) positive = positive && e > 0.0;
    if (positive) {
      report.orders[col] = observed_orders(errors);
    } else {
      report.orders[col].assign(errors.size() - 1, std::numeric_limits<double>::quiet_NaN());
    }
    report.headline[col] = report.orders[col].back();
  }
}

std::string format_error(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4E", value);
  return buf;
}

std::string format_order(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5g", value);
  return buf;
}

std::string report_to_csv(const ConvergenceReport& report) {
  const bool temporal = report.kind == StudyKind::temporal;
  std::ostringstream out;
  out << "# " << report.note << '\n';
  out << (temporal ? "tau" : "h")
      << ",c_L2,u_L2,c_Linf,u_Linf,c_H1_semi,p_L2,grad_p_L2,M,tau,steps,vertices,triangles,"
         "max_pressure_iterations,max_concentration_iterations,max_compatibility_defect\n";
  for (const auto& r : report.rows) {
    out << shortest(temporal ? r.tau : r.h) << ',' << format_error(r.c_l2) << ',' << format_error(r.u_l2) << ','
        << format_error(r.c_linf) << ',' << format_error(r.u_linf) << ',' << format_error(r.c_h1) << ','
        << format_error(r.p_l2) << ',' << format_error(r.p_grad_l2) << ',' << r.boundary_nodes << ','
        << shortest(r.tau) << ',' << r.steps << ',' << r.vertices << ',' << r.triangles << ','
        << r.max_pressure_iterations << ',' << r.max_concentration_iterations << ','
        << format_error(r.max_compatibility_defect) << '\n';
  }
  if (!report.orders.empty()) {
    for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
      const auto& a = report.rows[i];
      const auto& b = report.rows[i + 1];
      out << "order " << (temporal ? "N" + std::to_string(a.steps) : "M" + std::to_string(a.boundary_nodes)) << '-'
          << (temporal ? "N" + std::to_string(b.steps) : "M" + std::to_string(b.boundary_nodes));
      for (int col = 0; col < 4; ++col) out << ',' << format_order(report.orders[col][i]);
      out << ",,,,,,,,,,,\n";
    }
    out << "order";
    for (int col = 0; col < 4; ++col) out << ',' << format_order(report.headline[col]);
    out << ",,,,,,,,,,,\n";
  }
  return out.str();
}

json record_to_json(const ErrorRecord& r) {
  return json{{"M", r.boundary_nodes},
              {"h", r.h},
              {"tau", r.tau},
              {"steps", r.steps},
              {"vertices", r.vertices},
              {"triangles", r.triangles},
              {"time", r.time},
              {"errors",
               {{"c_L2", r.c_l2},
                {"u_L2", r.u_l2},
                {"c_Linf", r.c_linf},
                {"u_Linf", r.u_linf},
                {"c_H1_semi", r.c_h1},
                {"p_L2", r.p_l2},
                {"grad_p_L2", r.p_grad_l2}}},
              {"converged", r.converged},
              {"max_pressure_iterations", r.max_pressure_iterations},
              {"max_concentration_iterations", r.max_concentration_iterations},
              {"max_compatibility_defect", r.max_compatibility_defect},
              {"wall_seconds", r.wall_seconds}};
}

json report_to_json(const ConvergenceReport& report) {
  json out;
  out["kind"] = report.kind == StudyKind::spatial ? "spatial" : report.kind == StudyKind::temporal ? "temporal" : "single";
  out["note"] = report.note;
  out["rows"] = json::array();
  for (const auto& r : report.rows) out["rows"].push_back(record_to_json(r));
  if (!report.orders.empty()) {
    json orders;
    json headline;
    for (int col = 0; col < 4; ++col) {
      json pairwise = json::array();
      for (double o : report.orders[col]) pairwise.push_back(std::isnan(o) ? json(nullptr) : json(o));
      orders[kErrorColumns[col]] = pairwise;
      headline[kErrorColumns[col]] = std::isnan(report.headline[col]) ? json(nullptr) : json(report.headline[col]);
    }
    out["orders"] = orders;
    out["headline_orders"] = headline;
  }
  return out;
}

}  // namespace mdisp
