// epicon: scenario runner for the epidemic optimal-control toolkit.
//
//   presets    list built-in scenarios
//   validate   check a scenario file or preset
//   simulate   forward integration under a prescribed control
//   solve      optimal-control solve (forward-backward sweep or projected gradient)
//   analyze    re-run structure analysis on a saved run directory
//
// Exit codes: 0 success, 1 invalid input, 2 solver did not converge
// (artifacts still written), 3 I/O failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epicon/analysis.hpp"
#include "epicon/dynamics.hpp"
#include "epicon/io.hpp"
#include "epicon/model.hpp"
#include "epicon/pmp.hpp"
#include "epicon/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace epicon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitIO = 3;

struct Source {
  std::string source;  // preset name or scenario file path, for the manifest
  std::string label;   // directory-friendly name
  Scenario sc;
};

struct CommonOpts {
  std::vector<std::string> presets;
  std::string scenario_path;
  std::string out;
  std::string method = "fbsm";
  int grid = 0;
  double tol = 0.0;
  int jobs = 1;
  std::string control = "zero";
};

std::vector<Source> gather_sources(const CommonOpts& opts) {
  std::vector<Source> out;
  for (const std::string& name : opts.presets) out.push_back({name, name, preset(name)});
  if (!opts.scenario_path.empty()) {
    Scenario sc = load_scenario(opts.scenario_path);
    out.push_back({opts.scenario_path, fs::path(opts.scenario_path).stem().string(), sc});
  }
  if (out.empty()) throw ValidationError("no scenario given; use --preset or --scenario");
  if (opts.grid < 0)
    throw ValidationError("--grid " + std::to_string(opts.grid) + " must be a positive integer");
  for (Source& src : out) {
    if (opts.grid > 0) src.sc.grid_points = opts.grid;
    const ValidationReport rep = validate_scenario(src.sc);
    if (!rep.ok) {
      std::string msg = src.source + ":";
      for (const std::string& v : rep.violations) msg += " " + v + ";";
      throw ValidationError(msg);
    }
  }
  return out;
}

fs::path run_dir_for(const CommonOpts& opts, const Source& src, size_t n_sources) {
  if (!opts.out.empty() && n_sources == 1) return opts.out;
  fs::path base = opts.out;
  if (base.empty()) {
    if (const char* env = std::getenv("EPICON_OUT")) base = env;
    if (base.empty()) base = "runs";
  }
  return base / src.label;
}

SolverConfig solver_config(const CommonOpts& opts) {
  SolverConfig cfg;
  if (opts.method == "fbsm")
    cfg.method = SolveMethod::fbsm;
  else if (opts.method == "pg")
    cfg.method = SolveMethod::projected_gradient;
  else
    throw ValidationError("unknown method \"" + opts.method + "\" (expected fbsm or pg)");
  if (opts.tol > 0.0) cfg.tol_rel = opts.tol;
  return cfg;
}

json interval_json(const LabeledInterval& iv) {
  return json{{"t_a", iv.t_a}, {"t_b", iv.t_b},   {"k_a", iv.k_a},
              {"k_b", iv.k_b}, {"label", to_string(iv.label)}};
}

json structure_json(const ControlStructure& st) {
  json comps = json::array();
  for (const auto& list : st.intervals) {
    json arr = json::array();
    for (const LabeledInterval& iv : list) arr.push_back(interval_json(iv));
    comps.push_back(arr);
  }
  return json{{"sequence", st.sequence_string},
              {"switch_times", st.switch_times},
              {"intervals", comps}};
}

void write_json_file(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IOError("failed while writing " + path.string());
}

void write_report_json(const Scenario& sc, const SolveReport& rep, const std::string& method,
                       const fs::path& path) {
  const json j{
      {"method", method},
      {"grid_points", sc.grid_points},
      {"t_f", sc.t_f},
      {"converged", rep.converged},
      {"iterations", rep.iterations},
      {"cost_value", rep.cost_value},
      {"hamiltonian_deviation", rep.hamiltonian_deviation},
      {"structure", structure_json(rep.structure)},
      {"residual_history", rep.residual_history},
  };
  write_json_file(j, path);
}

void emit_manifest(const fs::path& dir, const Source& src, const std::string& command,
                   const std::string& method, const std::vector<std::string>& names) {
  RunManifest m;
  m.scenario_source = src.source;
  m.command = command;
  m.method = method;
  m.out_dir = dir.string();
  for (const std::string& name : names)
    m.files.emplace_back(name, checksum_hex(fnv1a64_file(dir / name)));
  write_manifest(m, dir / "manifest.json");
}

ControlTrajectory control_from_option(const Scenario& sc, const std::string& option) {
  if (option.empty() || option == "zero") return make_zero_control(sc);
  if (option.rfind("const:", 0) == 0) {
    double value = 0.0;
    try {
      value = std::stod(option.substr(6));
    } catch (const std::exception&) {
      throw ValidationError("bad --control value \"" + option + "\"");
    }
    return make_constant_control(sc, VectorXd::Constant(sc.model.n, value));
  }
  const ControlTrajectory file_u = read_control_csv(option);
  if (file_u.u.cols() != sc.model.n)
    throw ValidationError("control file has " + std::to_string(file_u.u.cols()) +
                          " components, scenario needs " + std::to_string(sc.model.n));
  return resample_control(file_u, uniform_grid(sc.t_f, sc.grid_points));
}

int cmd_presets() {
  for (const std::string& name : preset_names()) {
    const Scenario sc = preset(name);
    std::printf("%-18s n=%d rho=%g t_f=%g N=%d\n", name.c_str(), sc.model.n, sc.model.rho,
                sc.t_f, sc.grid_points);
  }
  return kExitOk;
}

int cmd_validate(const CommonOpts& opts) {
  const std::vector<Source> sources = gather_sources(opts);
  for (const Source& src : sources)
    std::printf("%s: valid (n=%d, t_f=%g, N=%d)\n", src.source.c_str(), src.sc.model.n,
                src.sc.t_f, src.sc.grid_points);
  return kExitOk;
}

int cmd_simulate(const CommonOpts& opts) {
  const std::vector<Source> sources = gather_sources(opts);
  for (const Source& src : sources) {
    const ControlTrajectory u = control_from_option(src.sc, opts.control);
    const Trajectory traj = simulate_forward(src.sc, u);
    const EpidemicMetrics metrics = epidemic_metrics(traj);

    const fs::path dir = run_dir_for(opts, src, sources.size());
    fs::create_directories(dir);
    save_scenario(src.sc, dir / "scenario.json");
    write_trajectory_csv(traj, dir / "trajectory.csv");
    write_control_csv(u, dir / "control.csv");
    emit_manifest(dir, src, "simulate", "-",
                  {"scenario.json", "trajectory.csv", "control.csv"});

    std::printf("simulate %s: peak infected %.6f at t=%.1f, final s %.6f, deceased %.6f, "
                "mass drift %.2e\n",
                src.label.c_str(), metrics.peak_infected, metrics.peak_time,
                metrics.final_susceptible, metrics.total_deceased,
                mass_conservation_error(traj));
    std::printf("wrote %s\n", dir.string().c_str());
  }
  return kExitOk;
}

int cmd_solve(const CommonOpts& opts) {
  const std::vector<Source> sources = gather_sources(opts);
  const SolverConfig cfg = solver_config(opts);

  struct Outcome {
    SolveReport rep;
    std::string error;
  };
  std::vector<Outcome> outcomes(sources.size());
  const size_t pool =
      std::max<size_t>(1, std::min<size_t>(opts.jobs > 0 ? opts.jobs : 1,
                                           std::max(1u, std::thread::hardware_concurrency())));
  std::vector<std::pair<size_t, std::future<Outcome>>> active;
  auto drain_front = [&] {
    outcomes[active.front().first] = active.front().second.get();
    active.erase(active.begin());
  };
  for (size_t i = 0; i < sources.size(); ++i) {
    if (active.size() == pool) drain_front();
    const Scenario sc = sources[i].sc;
    active.emplace_back(i, std::async(std::launch::async, [sc, cfg] {
                          Outcome o;
                          try {
                            o.rep = solve(sc, cfg);
                          } catch (const std::exception& e) {
                            o.error = e.what();
                          }
                          return o;
                        }));
  }
  while (!active.empty()) drain_front();

  bool any_invalid = false, any_unconverged = false;
  for (size_t i = 0; i < sources.size(); ++i) {
    const Source& src = sources[i];
    Outcome& o = outcomes[i];
    if (!o.error.empty()) {
      std::fprintf(stderr, "solve %s failed: %s\n", src.label.c_str(), o.error.c_str());
      any_invalid = true;
      continue;
    }
    const fs::path dir = run_dir_for(opts, src, sources.size());
    fs::create_directories(dir);
    save_scenario(src.sc, dir / "scenario.json");
    write_trajectory_csv(o.rep.traj, dir / "trajectory.csv");
    write_control_csv(o.rep.u_opt, dir / "control.csv");
    write_costates_csv(src.sc, o.rep.traj, o.rep.u_opt, o.rep.costates, dir / "costates.csv");
    write_report_json(src.sc, o.rep, opts.method, dir / "report.json");
    emit_manifest(dir, src, "solve", opts.method,
                  {"scenario.json", "trajectory.csv", "control.csv", "costates.csv",
                   "report.json"});

    std::printf("solve %s [%s]: converged=%d iters=%d J=%.9f Hdev=%.2e structure=%s\n",
                src.label.c_str(), opts.method.c_str(), o.rep.converged ? 1 : 0,
                o.rep.iterations, o.rep.cost_value, o.rep.hamiltonian_deviation,
                o.rep.structure.sequence_string.c_str());
    std::printf("wrote %s\n", dir.string().c_str());
    if (!o.rep.converged) {
      std::fprintf(stderr, "solve %s did not converge within %d iterations\n",
                   src.label.c_str(), cfg.max_iters);
      any_unconverged = true;
    }
  }
  if (any_invalid) return kExitInvalid;
  if (any_unconverged) return kExitNotConverged;
  return kExitOk;
}

int cmd_analyze(const CommonOpts& opts) {
  if (opts.out.empty()) throw ValidationError("analyze needs --out pointing at a run directory");
  const fs::path dir = opts.out;
  Scenario sc = load_scenario(dir / "scenario.json");
  const ControlTrajectory u =
      resample_control(read_control_csv(dir / "control.csv"), uniform_grid(sc.t_f, sc.grid_points));
  const Trajectory traj = simulate_forward(sc, u);
  const CostateTrajectory costates = integrate_adjoint(sc, traj, u);
  const ControlStructure structure =
      classify_structure(u, sc.model.u_bar, costates, sc.cost);
  const double cost = cost_evaluate(sc, traj, u);
  const bool deactivated = terminal_deactivation_check(u, costates, sc.cost);

  json arcs = json::array();
  std::vector<ArcInterval> detected;
  try {
    detected = detect_singular_arcs(costates, sc.cost);
  } catch (const NoLinearComponents&) {
  }
  SolveReport rep;
  rep.u_opt = u;
  rep.traj = traj;
  rep.costates = costates;
  for (const ArcInterval& arc : detected) {
    const ArcDiagnostics diag = verify_singular_arc(sc, rep, arc);
    arcs.push_back(json{{"component", arc.component},
                        {"t_a", arc.t_a},
                        {"t_b", arc.t_b},
                        {"applicable", diag.applicable},
                        {"reason", diag.reason},
                        {"feedback_residual_max", diag.feedback_residual_max},
                        {"x_monotone_decreasing", diag.x_monotone_decreasing},
                        {"s_at_entry", diag.s_at_entry},
                        {"entry_jump", diag.discontinuity_jump_at_entry},
                        {"exit_jump", diag.discontinuity_jump_at_exit},
                        {"core_t_a", diag.core_t_a},
                        {"core_t_b", diag.core_t_b}});
  }
  const json j{{"structure", structure_json(structure)},
               {"singular_arcs", arcs},
               {"terminal_deactivation", deactivated},
               {"cost_value", cost}};
  write_json_file(j, dir / "structure.json");

  std::printf("analyze %s: cost %.9f, structure %s, %zu singular arc(s), "
              "terminal deactivation %s\n",
              dir.string().c_str(), cost, structure.sequence_string.c_str(), detected.size(),
              deactivated ? "true" : "false");
  for (double t : structure.switch_times) std::printf("  switch at t=%.4f\n", t);
  std::printf("wrote %s\n", (dir / "structure.json").string().c_str());
  return kExitOk;
}

int dispatch(const std::string& command, const CommonOpts& opts) {
  try {
    if (command == "presets") return cmd_presets();
    if (command == "validate") return cmd_validate(opts);
    if (command == "simulate") return cmd_simulate(opts);
    if (command == "solve") return cmd_solve(opts);
    if (command == "analyze") return cmd_analyze(opts);
    throw ValidationError("unknown command");
  } catch (const IOError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIO;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIO;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal control of compartmental epidemic models"};
  app.require_subcommand(1);
  CommonOpts opts;

  auto add_scenario_flags = [&](CLI::App* cmd) {
    cmd->add_option("--preset", opts.presets, "built-in scenario name (repeatable)");
    cmd->add_option("--scenario", opts.scenario_path, "scenario JSON file");
    cmd->add_option("--grid", opts.grid, "override grid point count");
  };
  auto add_output_flags = [&](CLI::App* cmd) {
    cmd->add_option("--out", opts.out,
                    "output directory (default: $EPICON_OUT or ./runs, plus scenario name)");
  };

  CLI::App* presets = app.add_subcommand("presets", "list built-in scenarios");
  (void)presets;

  CLI::App* validate = app.add_subcommand("validate", "check a scenario and exit");
  add_scenario_flags(validate);

  CLI::App* simulate = app.add_subcommand("simulate", "forward integration only");
  add_scenario_flags(simulate);
  add_output_flags(simulate);
  simulate->add_option("--control", opts.control,
                       "zero | const:<value> | <file.csv> (resampled onto the grid)");

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve for the optimal control");
  add_scenario_flags(solve_cmd);
  add_output_flags(solve_cmd);
  solve_cmd->add_option("--method", opts.method, "fbsm | pg")->capture_default_str();
  solve_cmd->add_option("--tol", opts.tol, "relative L1 convergence tolerance");
  solve_cmd->add_option("--jobs", opts.jobs, "concurrent solves across scenarios")
      ->capture_default_str();

  CLI::App* analyze = app.add_subcommand("analyze", "re-run analysis on a saved run");
  add_output_flags(analyze);

  CLI11_PARSE(app, argc, argv);
  return dispatch(app.get_subcommands().front()->get_name(), opts);
}
