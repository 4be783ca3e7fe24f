#include "relax/cli.hpp"

#include "relax/config.hpp"
#include "relax/io.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace relax {

namespace {

std::string numbered(const std::string& stem, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%04zu.csv", i);
  return stem + buf;
}

ValidationReport validate_experiment(const Experiment& ex, const ExperimentConfig& config) {
  const SampleSet samples = SampleSet::make(ex.grid, ex.box, config.directions, config.sample_points);
  const ParabolicTarget* target = ex.target ? &*ex.target : nullptr;
  return validate_all(ex.system, target, nullptr, samples);
}

void print_failures(const ValidationReport& report, std::ostream& log) {
  for (const auto& e : report.entries) {
    if (e.passed) continue;
    log << "  failed: " << e.name << " (margin " << format_double(e.margin) << ")";
    if (!e.note.empty()) log << " " << e.note;
    log << '\n';
  }
}

// Runs `body`, translating library exceptions into exit codes.
int guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const SolverError& e) {
    log << "solver error: " << e.what() << '\n';
    return kExitSolverError;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
}

bool admit(const Experiment& ex, const ExperimentConfig& config, const CliOptions& opts,
           std::ostream& log) {
  const ValidationReport report = validate_experiment(ex, config);
  if (report.passed()) return true;
  if (opts.allow_invalid) {
    log << "warning: system " << ex.name << " fails validation; continuing (--allow-invalid)\n";
    print_failures(report, log);
    return true;
  }
  log << "system " << ex.name << " fails validation; rerun with --allow-invalid to proceed\n";
  print_failures(report, log);
  return false;
}

}  // namespace

int cmd_validate(const std::filesystem::path& config_path, const CliOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const ExperimentConfig config = load_config(config_path);
    const Experiment ex = build_experiment(config);
    const ValidationReport report = validate_experiment(ex, config);
    write_file(opts.out / "report.csv", [&](std::ostream& os) { write_report_csv(os, report); });
    const int failed = report.failures();
    log << ex.name << ": " << report.entries.size() - failed << " passed, " << failed << " failed\n";
    print_failures(report, log);
    return report.passed() ? kExitOk : kExitCheckFailed;
  });
}

int cmd_run(const std::filesystem::path& config_path, const CliOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const ExperimentConfig config = load_config(config_path);
    const Experiment ex = build_experiment(config);
    if (!admit(ex, config, opts, log)) return kExitCheckFailed;

    FieldState init = config.well_prepared ? well_prepared(ex.system, ex.grid, ex.initial_uI, config.eps)
                                           : FieldState::zeros(ex.system, ex.grid, config.eps);
    init.uI = ex.initial_uI;
    const Trajectory traj = run(ex.system, ex.grid, init, config.T, config.solver);

    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
      write_file(opts.out / numbered("snapshot", i),
                 [&](std::ostream& os) { write_snapshot_csv(os, ex.grid, traj.snapshots[i]); });
    }
    write_file(opts.out / "step_log.csv", [&](std::ostream& os) { write_step_log_csv(os, traj); });

    if (config.reference && ex.target) {
      HyperbolicStepper probe(ex.system, ex.grid, config.solver);
      ReferenceOptions ropts;
      ropts.dt = probe.time_step_limit(config.eps) / config.reference_refinement;
      ropts.snapshot_stride = config.solver.snapshot_stride;
      const ReferenceTrajectory ref = run_reference(*ex.target, ex.initial_uI, ex.grid, config.T, ropts);
      for (std::size_t i = 0; i < ref.states.size(); ++i) {
        write_file(opts.out / numbered("reference", i),
                   [&](std::ostream& os) { write_reference_csv(os, ex.grid, ref.states[i]); });
      }
    }

    const StepRecord& last = traj.steps.back();
    log << ex.name << ": t=" << format_double(last.t) << " steps=" << traj.steps.size() - 1
        << " energy=" << format_double(last.energy) << " |uI|=" << format_double(last.norm_uI);
    if (traj.clamp_events) log << " clamp_events=" << traj.clamp_events;
    log << '\n';
    return kExitOk;
  });
}

int cmd_converge(const std::filesystem::path& config_path, const CliOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const ExperimentConfig config = load_config(config_path);
    if (config.ladder.empty()) throw ConfigError(config_path.string() + ": missing required field 'experiment.ladder'");
    const Experiment ex = build_experiment(config);
    if (!admit(ex, config, opts, log)) return kExitCheckFailed;

    LadderSetup setup;
    setup.system = ex.system;
    // A system without the conserved-block structure relaxes to zero.
    if (validate_experiment(ex, config).find("conserved_block")->passed) setup.reference = ex.target;
    setup.initial_uI = ex.initial_uI;
    setup.well_prepared = config.well_prepared;
    setup.T = config.T;
    setup.epsilons = config.ladder;
    setup.solver = config.solver;
    setup.reference_refinement = config.reference_refinement;
    setup.threads = opts.threads;
    const ConvergenceTable table = convergence_study(setup, ex.grid);
    write_file(opts.out / "convergence.csv", [&](std::ostream& os) { write_convergence_csv(os, table); });

    for (const auto& r : table.rows) {
      log << "eps=" << format_double(r.eps) << " errI=" << format_double(r.errI)
          << " errII_weak=" << format_double(r.errII_weak) << '\n';
    }
    const bool ok = table.errI_strictly_decreasing();
    log << (ok ? "errI strictly decreasing\n" : "errI not strictly decreasing\n");
    return ok ? kExitOk : kExitCheckFailed;
  });
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperbolic relaxation workbench"};
  app.require_subcommand(1);
  CliOptions opts;
  std::string out_dir = "out";
  int threads = 0;
  std::string config;

  std::vector<CLI::App*> subs;
  for (const char* name : {"validate", "run", "converge"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("config", config, "Experiment file")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_flag("--allow-invalid", opts.allow_invalid, "Proceed even if validation fails");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kExitBadInput;
  }

  opts.out = out_dir;
  if (threads > 0) {
    opts.threads = threads;
  } else if (const char* env = std::getenv("RELAXBENCH_THREADS")) {
    const std::string s = env;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) {
      err << "RELAXBENCH_THREADS must be a positive integer, got '" << s << "'\n";
      return kExitBadInput;
    }
    opts.threads = v;
  }

  std::ostream& log = out;
  if (subs[0]->parsed()) return cmd_validate(config, opts, log);
  if (subs[1]->parsed()) return cmd_run(config, opts, log);
  return cmd_converge(config, opts, log);
}

}  // namespace relax
