// Command-line front end: single runs with CSV ledgers and snapshots, the
// positivity table sweep, and mesh-refinement convergence studies.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chemo1d/experiments.hpp"

namespace {

using namespace chemo1d;

struct RunCli {
  std::string preset;
  std::string config_path;
  std::string scheme;
  double h = 0.0;
  double dt = 0.0;
  std::string out = "run-out";
};

struct Table1Cli {
  std::vector<double> dt_list{1e-7, 1e-8};
  std::vector<double> h_list{1.0 / 100, 1.0 / 500, 1.0 / 1000, 1.0 / 5000,
                             1.0 / 10000};
  std::string out = "table1-out";
};

struct EocCli {
  std::string scheme;
  bool self_reference = false;
  bool paper_reference = false;
  std::vector<double> h_list{1.0 / 200, 1.0 / 400, 1.0 / 600, 1.0 / 800,
                             1.0 / 1000};
  double ref_h = 0.0;  // 0: pick by reference mode
  double dt = 0.0;     // 0: pick by reference mode
  std::string out = "eoc-out";
};

int do_run(const RunCli& a) {
  RunConfig cfg;
  if (!a.config_path.empty())
    cfg = load_config(a.config_path);
  else if (!a.preset.empty())
    cfg = preset_config(a.preset);
  else
    throw ConfigError("run: pass --preset <name> or --config <path>");
  if (!a.scheme.empty()) cfg.scheme = scheme_from_string(a.scheme);
  if (a.h > 0.0) {
    cfg.h = a.h;
    cfg.num_nodes = 0;
  }
  if (a.dt > 0.0) cfg.dt = a.dt;
  const RunArtifacts art = cmd_run(cfg, a.out);
  if (art.ledger.failed)
    std::fprintf(stderr, "run failed at step %d: %s\n",
                 art.ledger.failure_step, art.ledger.failure_reason.c_str());
  std::printf("wrote %s (%zu records, min u over run = %s)\n",
              (a.out + "/ledger.csv").c_str(), art.ledger.records.size(),
              format_g17(art.ledger.min_u_over_run).c_str());
  return art.exit_code;
}

int do_table1(const Table1Cli& a) {
  const Table1Result res = cmd_table1(a.h_list, a.dt_list, a.out);
  int failures = 0;
  for (const Table1Cell& c : res.cells)
    if (!c.min_u) ++failures;
  std::printf("wrote %s (%zu cells, %d recorded failures)\n",
              (a.out + "/table1.csv").c_str(), res.cells.size(), failures);
  return 0;
}

int do_eoc(const EocCli& a) {
  const SchemeId scheme = scheme_from_string(a.scheme);
  double ref_h = a.ref_h, dt = a.dt;
  if (ref_h <= 0.0) ref_h = a.paper_reference ? 1e-5 : 1.0 / 10000;
  if (dt <= 0.0) dt = a.paper_reference ? 1e-9 : 1e-8;
  const EocResult res =
      cmd_eoc(scheme, a.h_list, ref_h, dt, a.self_reference, a.out);
  if (res.reference_failed) {
    std::fprintf(stderr, "reference run failed: %s\n",
                 res.reference_failure.c_str());
    return 2;
  }
  std::printf("wrote %s (%zu rungs)\n", (a.out + "/eoc.csv").c_str(),
              res.rungs.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Finite-element schemes for the 1D chemo-attraction/consumption "
      "system: runs, positivity tables, and convergence studies"};
  app.require_subcommand(1);
  // --h is a scheme parameter here, so help hangs off --help alone
  app.set_help_flag("--help", "Print help and exit");

  RunCli run_args;
  CLI::App* run = app.add_subcommand(
      "run", "One configured run; writes ledger.csv, snapshots, summary.txt");
  run->set_help_flag("--help", "Print help and exit");
  run->add_option("--preset", run_args.preset,
                  "Built-in experiment: example-i .. example-iv");
  run->add_option("--config", run_args.config_path,
                  "Config file with key = value lines");
  run->add_option("--scheme", run_args.scheme,
                  "Override scheme: uv, uv-nd, uv-ns, uvs, uv-ad");
  run->add_option("--h", run_args.h, "Override mesh size");
  run->add_option("--dt", run_args.dt, "Override time step");
  run->add_option("--out", run_args.out, "Output directory");

  Table1Cli t1_args;
  CLI::App* t1 = app.add_subcommand(
      "table1",
      "Minimum-of-u sweep over (scheme, dt, h) on the sharp-dip data");
  t1->set_help_flag("--help", "Print help and exit");
  t1->add_option("--dt-list", t1_args.dt_list, "Time steps to sweep");
  t1->add_option("--h-list", t1_args.h_list, "Mesh sizes to sweep");
  t1->add_option("--out", t1_args.out, "Output directory");

  EocCli eoc_args;
  CLI::App* eoc = app.add_subcommand(
      "eoc", "Mesh-refinement convergence study on the smooth data");
  eoc->set_help_flag("--help", "Print help and exit");
  eoc->add_option("--scheme", eoc_args.scheme, "Scheme under test")
      ->required();
  eoc->add_flag("--self-reference", eoc_args.self_reference,
                "Compute the reference with the scheme under test");
  eoc->add_flag("--paper-reference", eoc_args.paper_reference,
                "Fine reference resolution (h = 1e-5, dt = 1e-9); slow");
  eoc->add_option("--h-list", eoc_args.h_list, "Ladder mesh sizes");
  eoc->add_option("--ref-h", eoc_args.ref_h, "Reference mesh size");
  eoc->add_option("--dt", eoc_args.dt, "Time step for every run");
  eoc->add_option("--out", eoc_args.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or the help text
    return code == 0 ? 0 : 1;     // any parse failure is a config error
  }

  try {
    if (run->parsed()) return do_run(run_args);
    if (t1->parsed()) return do_table1(t1_args);
    if (eoc->parsed()) return do_eoc(eoc_args);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
