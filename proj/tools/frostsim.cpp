// frostsim: fine-grid and multiscale runs for artificial ground freezing.
//
// Subcommands
//   run-fine     solve on the fine grid, store the trajectory
//   build-bases  build the offline multiscale spaces and cache them
//   run-ms       reduced run with optional online enrichment
//   compare      error table of a stored reduced run against the fine one
//   sweep        fine run + full basis-count / enrichment grid in one go
//
// All artifacts land in the configured output directory, which the
// FROST_OUTPUT_DIR environment variable overrides.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "frost/analysis.hpp"
#include "frost/config.hpp"
#include "frost/fine_solver.hpp"
#include "frost/io.hpp"
#include "frost/msfem_offline.hpp"
#include "frost/msfem_online.hpp"

namespace {

using namespace frost;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CommonOpts {
  std::string config_path;
  std::string output_dir;  // overrides the config when set
  int test_case = -1;      // overrides the config when >= 0
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_path,
                  "configuration file (defaults apply when omitted)");
  cmd->add_option("-o,--output", opts.output_dir, "output directory override");
  cmd->add_option("--test", opts.test_case,
                  "boundary test override: 0 none, 1 left-right, 2 top-bottom");
}

SimulationConfig load_config(const CommonOpts& opts) {
  SimulationConfig cfg = opts.config_path.empty()
                             ? SimulationConfig{}
                             : parse_config(opts.config_path);
  if (opts.test_case >= 0) cfg.test_case = opts.test_case;
  if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
  if (const char* env = std::getenv("FROST_OUTPUT_DIR"); env && *env)
    cfg.output_dir = env;
  cfg.validate();
  return cfg;
}

std::string fine_prefix(const SimulationConfig& cfg) {
  return cfg.output_dir + "/fine_t" + std::to_string(cfg.test_case);
}

std::string ms_tag(const SimulationConfig& cfg, int m, int l) {
  return "ms_t" + std::to_string(cfg.test_case) + "_m" + std::to_string(m) +
         "_l" + std::to_string(l);
}

std::string basis_path(const SimulationConfig& cfg) {
  return cfg.output_dir + "/bases.bin";
}

void write_snapshots(const SimulationConfig& cfg, const Problem& problem,
                     const Trajectory& traj, const std::string& tag) {
  if (cfg.snapshot_layers.empty()) return;
  ensure_directory(cfg.output_dir + "/vtk");
  for (int layer : cfg.snapshot_layers) {
    if (layer >= traj.n_layers()) continue;
    char name[128];
    std::snprintf(name, sizeof name, "%s/vtk/%s_layer%03d.vtk",
                  cfg.output_dir.c_str(), tag.c_str(), layer);
    const Eigen::VectorXd p = traj.p.empty() ? Eigen::VectorXd() : traj.p[layer];
    write_vtk(name, problem.mesh, problem.materials, traj.T[layer], p);
  }
}

// Loads the cached offline space when its fingerprint matches and it holds
// enough bases; otherwise builds (and caches) a fresh one.
MultiscaleSpace obtain_space(const Problem& problem, int m_needed, bool rebuild) {
  const std::string path = basis_path(problem.config);
  const std::uint64_t print = problem.config.offline_fingerprint();
  if (!rebuild) {
    try {
      MultiscaleSpace space = load_basis(path, print);
      if (space.m_offline >= m_needed) {
        std::printf("[bases] reusing cache %s (m=%d)\n", path.c_str(),
                    space.m_offline);
        return space;
      }
    } catch (const std::exception&) {
      // stale or absent cache, rebuild below
    }
  }
  const auto start = Clock::now();
  MultiscaleSpace space = problem.offline_space(m_needed);
  ensure_directory(problem.config.output_dir);
  save_basis(path, space, print);
  std::printf("[bases] built m=%d over %d neighborhoods (%d pipe profiles) "
              "in %.1f s -> %s\n",
              space.m_offline, space.n_omega(),
              static_cast<int>(space.pipe_omegas.size()), seconds_since(start),
              path.c_str());
  return space;
}

// Small text sidecar for a reduced run so compare can report the reduced
// dimension without redoing the solve.
void save_run_summary(const std::string& prefix, int m, int l, int dof_T,
                      int dof_p) {
  std::ofstream out(prefix + ".run");
  if (!out) throw std::runtime_error("cannot write " + prefix + ".run");
  out << "m_offline " << m << "\n"
      << "n_online " << l << "\n"
      << "dof_T " << dof_T << "\n"
      << "dof_p " << dof_p << "\n";
}

void load_run_summary(const std::string& prefix, ErrorRow& row) {
  std::ifstream in(prefix + ".run");
  if (!in) return;  // optional
  std::string key;
  int value = 0;
  while (in >> key >> value) {
    if (key == "m_offline") row.m_offline = value;
    if (key == "n_online") row.n_online = value;
    if (key == "dof_T") row.dof_T = value;
    if (key == "dof_p") row.dof_p = value;
  }
}

void print_row(const ErrorRow& row) {
  std::printf("[errors m=%d l=%d] T: L2 %.3f%% H1 %.3f%%", row.m_offline,
              row.n_online, row.t_l2, row.t_h1);
  if (row.p_l2 != 0.0 || row.p_h1 != 0.0)
    std::printf(" | p: L2 %.3f%% H1 %.3f%%", row.p_l2, row.p_h1);
  std::printf(" | dof_T %d\n", row.dof_T);
}

Trajectory run_fine_stage(const SimulationConfig& cfg, const Problem& problem,
                          const StepContext& ctx) {
  ensure_directory(cfg.output_dir);
  const auto start = Clock::now();
  Trajectory traj = run_fine(ctx, problem.time, problem.initial_temperature());
  std::printf("[fine] %d layers on %d nodes in %.1f s\n", problem.time.n_steps,
              problem.mesh.n_nodes(), seconds_since(start));
  save_trajectory(fine_prefix(cfg), traj);
  write_snapshots(cfg, problem, traj, "fine_t" + std::to_string(cfg.test_case));
  return traj;
}

struct ReducedRun {
  MultiscaleResult result;
  double wall = 0.0;
};

ReducedRun run_ms_stage(const SimulationConfig& cfg, const Problem& problem,
                        const StepContext& ctx, const MultiscaleSpace& space,
                        int m, int l) {
  EnrichmentSchedule schedule;
  schedule.period = cfg.period;
  schedule.iterations = l;
  schedule.accumulate = cfg.accumulate_online;
  const auto start = Clock::now();
  ReducedRun run;
  run.result = run_multiscale(ctx, problem.time, problem.neighborhoods,
                              problem.pou, space, m, schedule,
                              problem.initial_temperature());
  run.wall = seconds_since(start);
  const std::string tag = ms_tag(cfg, m, l);
  const std::string prefix = cfg.output_dir + "/" + tag;
  save_trajectory(prefix, run.result.traj);
  save_run_summary(prefix, m, l, run.result.dof_T, run.result.dof_p);
  write_snapshots(cfg, problem, run.result.traj, tag);
  std::printf("[ms m=%d l=%d] dof_T %d dof_p %d, %d enrichment events, %.1f s\n",
              m, l, run.result.dof_T, run.result.dof_p,
              static_cast<int>(run.result.events.size()), run.wall);
  return run;
}

int cmd_run_fine(const CommonOpts& opts) {
  const SimulationConfig cfg = load_config(opts);
  const auto problem = build_problem(cfg);
  const StepContext ctx = problem->context();
  const Trajectory traj = run_fine_stage(cfg, *problem, ctx);
  const double area = frozen_area(problem->mesh, traj.T.back(),
                                  cfg.phase.t_star);
  std::printf("[fine] final frozen area %.3f of %.1f m^2 -> %s\n", area,
              cfg.lx * cfg.ly, fine_prefix(cfg).c_str());
  return 0;
}

int cmd_build_bases(const CommonOpts& opts, int m_override) {
  const SimulationConfig cfg = load_config(opts);
  const auto problem = build_problem(cfg);
  const int m = m_override > 0 ? m_override : cfg.offline_bases;
  const MultiscaleSpace space = obtain_space(*problem, m, /*rebuild=*/true);
  const SparseMat r_t = assemble_projection_T(space, space.m_offline, {});
  std::printf("[bases] temperature projection: %d rows over %d nodes\n",
              static_cast<int>(r_t.rows()), space.n_nodes);
  if (space.has_pressure()) {
    const SparseMat r_p = assemble_projection_p(space, space.m_offline, {});
    std::printf("[bases] pressure projection: %d rows\n",
                static_cast<int>(r_p.rows()));
  }
  return 0;
}

int cmd_run_ms(const CommonOpts& opts, int m_override, int l_override,
               int period_override, bool accumulate) {
  SimulationConfig cfg = load_config(opts);
  if (period_override > 0) cfg.period = period_override;
  if (accumulate) cfg.accumulate_online = true;
  cfg.validate();
  const auto problem = build_problem(cfg);
  const StepContext ctx = problem->context();
  const int m = m_override > 0 ? m_override : cfg.offline_bases;
  const int l = l_override >= 0 ? l_override : cfg.online_bases;
  ensure_directory(cfg.output_dir);
  const MultiscaleSpace space = obtain_space(*problem, m, /*rebuild=*/false);
  run_ms_stage(cfg, *problem, ctx, space, m, l);
  return 0;
}

int cmd_compare(const CommonOpts& opts, std::string fine_path,
                std::string ms_path, int m_flag, int l_flag) {
  const SimulationConfig cfg = load_config(opts);
  const auto problem = build_problem(cfg);
  const int m = m_flag > 0 ? m_flag : cfg.offline_bases;
  const int l = l_flag >= 0 ? l_flag : cfg.online_bases;
  if (fine_path.empty()) fine_path = fine_prefix(cfg);
  if (ms_path.empty()) ms_path = cfg.output_dir + "/" + ms_tag(cfg, m, l);

  const Trajectory fine = load_trajectory(fine_path);
  const Trajectory ms = load_trajectory(ms_path);
  ErrorRow row = summarize_errors(fine, ms, problem->mesh);
  row.m_offline = m;
  row.n_online = l;
  load_run_summary(ms_path, row);
  print_row(row);

  const ErrorSeries series = build_error_series(fine, ms, problem->mesh);
  const std::string series_path =
      cfg.output_dir + "/series_" + ms_tag(cfg, row.m_offline, row.n_online) +
      ".csv";
  write_series_csv(series_path, series);
  const std::string table_path =
      cfg.output_dir + "/compare_" + ms_tag(cfg, row.m_offline, row.n_online) +
      ".csv";
  write_error_csv(table_path, {row});
  std::printf("[compare] wrote %s and %s\n", table_path.c_str(),
              series_path.c_str());
  return 0;
}

int cmd_sweep(const CommonOpts& opts, std::vector<int> offline_list,
              std::vector<int> online_list) {
  const SimulationConfig cfg = load_config(opts);
  if (offline_list.empty()) offline_list = {2, 4, 6, 8};
  if (online_list.empty()) online_list = {0, 1, 2};
  std::sort(offline_list.begin(), offline_list.end());
  std::sort(online_list.begin(), online_list.end());

  const auto problem = build_problem(cfg);
  const StepContext ctx = problem->context();
  const Trajectory fine = run_fine_stage(cfg, *problem, ctx);
  const MultiscaleSpace space =
      obtain_space(*problem, offline_list.back(), /*rebuild=*/false);

  std::vector<ErrorRow> rows;
  for (int m : offline_list) {
    for (int l : online_list) {
      const ReducedRun run = run_ms_stage(cfg, *problem, ctx, space, m, l);
      ErrorRow row = summarize_errors(fine, run.result.traj, problem->mesh);
      row.m_offline = m;
      row.n_online = l;
      row.dof_T = run.result.dof_T;
      row.dof_p = run.result.dof_p;
      print_row(row);
      rows.push_back(row);

      const ErrorSeries series =
          build_error_series(fine, run.result.traj, problem->mesh);
      write_series_csv(cfg.output_dir + "/series_" + ms_tag(cfg, m, l) + ".csv",
                       series);
    }
  }
  const std::string table =
      cfg.output_dir + "/errors_t" + std::to_string(cfg.test_case) + ".csv";
  write_error_csv(table, rows);
  std::printf("[sweep] wrote %s (%d rows)\n", table.c_str(),
              static_cast<int>(rows.size()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground freezing with filtration: fine and multiscale solvers"};
  app.require_subcommand(1);

  CommonOpts fine_opts;
  CLI::App* fine = app.add_subcommand("run-fine", "fine-grid reference run");
  add_common(fine, fine_opts);

  CommonOpts bases_opts;
  int bases_m = 0;
  CLI::App* bases =
      app.add_subcommand("build-bases", "build and cache the offline spaces");
  add_common(bases, bases_opts);
  bases->add_option("-m,--offline", bases_m, "offline bases per neighborhood");

  CommonOpts ms_opts;
  int ms_m = 0, ms_l = -1, ms_period = 0;
  bool ms_accumulate = false;
  CLI::App* ms = app.add_subcommand("run-ms", "reduced multiscale run");
  add_common(ms, ms_opts);
  ms->add_option("-m,--offline", ms_m, "offline bases per neighborhood");
  ms->add_option("-l,--online", ms_l, "online bases per enrichment event");
  ms->add_option("--period", ms_period, "layers between enrichment events");
  ms->add_flag("--accumulate", ms_accumulate,
               "keep online bases from earlier events");

  CommonOpts cmp_opts;
  std::string cmp_fine, cmp_ms;
  int cmp_m = 0, cmp_l = -1;
  CLI::App* cmp =
      app.add_subcommand("compare", "errors of a reduced run vs the fine one");
  add_common(cmp, cmp_opts);
  cmp->add_option("--fine", cmp_fine, "fine trajectory prefix");
  cmp->add_option("--ms", cmp_ms, "reduced trajectory prefix");
  cmp->add_option("-m,--offline", cmp_m, "basis count used for default paths");
  cmp->add_option("-l,--online", cmp_l, "online count used for default paths");

  CommonOpts sweep_opts;
  std::vector<int> sweep_m, sweep_l;
  CLI::App* sweep =
      app.add_subcommand("sweep", "fine run plus the full (m, l) error table");
  add_common(sweep, sweep_opts);
  sweep->add_option("--offline-list", sweep_m, "offline basis counts")
      ->delimiter(',');
  sweep->add_option("--online-list", sweep_l, "online basis counts")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (fine->parsed()) return cmd_run_fine(fine_opts);
    if (bases->parsed()) return cmd_build_bases(bases_opts, bases_m);
    if (ms->parsed())
      return cmd_run_ms(ms_opts, ms_m, ms_l, ms_period, ms_accumulate);
    if (cmp->parsed())
      return cmd_compare(cmp_opts, cmp_fine, cmp_ms, cmp_m, cmp_l);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, sweep_m, sweep_l);
  } catch (const std::exception& e) {
    std::cerr << "frostsim: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
