#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "chemo1d/config.hpp"
#include "chemo1d/runner.hpp"

namespace chemo1d {

/// Fixed-width decimal rendering used for every CSV cell; 17 significant
/// digits make the round trip through text bit-exact for doubles.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string format_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Runs jobs [0, n) on up to `threads` workers pulling from a shared index.
/// Each job must touch only its own slot of any shared output.
inline void parallel_for(int n, int threads, const std::function<void(int)>& job) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) job(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

inline int worker_count_from_env() {
  if (const char* env = std::getenv("THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace detail

/// Writes the per-step ledger: one row per recorded step, nan marking the
/// columns a scheme does not certify.
inline void write_ledger_csv(const std::filesystem::path& path,
                             const RunLedger& led) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "t,mass,min_u,min_v,max_v,E_uv,E_usigma,D1,D2,D3,energy_residual,"
         "picard_iters\n";
  for (const StepRecord& r : led.records) {
    out << format_g17(r.t) << ',' << format_g17(r.mass) << ','
        << format_g17(r.min_u) << ',' << format_g17(r.min_v) << ','
        << format_g17(r.max_v) << ',' << format_g17(r.e_uv) << ','
        << format_g17(r.e_usigma) << ',' << format_g17(r.d1) << ','
        << format_g17(r.d2) << ',' << format_g17(r.d3) << ','
        << format_g17(r.energy_residual) << ',' << r.picard_iters << '\n';
  }
}

inline void write_snapshot_csv(const std::filesystem::path& path,
                               const NodalField& f) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "x,value\n";
  for (int j = 0; j < f.size(); ++j)
    out << format_g17(f.mesh().node(j)) << ',' << format_g17(f[j]) << '\n';
}

struct RunArtifacts {
  RunLedger ledger;
  SchemeState final_state{NodalField(), NodalField(), std::nullopt, 0.0, 0};
  int exit_code = 0;
};

/// Executes one configured run, writing ledger.csv, snapshot pairs
/// u_t{time}.csv / v_t{time}.csv at the configured frame times, and
/// summary.txt. Returns exit code 0, or 2 when the solver failed partway
/// (the artifacts still cover the completed steps).
inline RunArtifacts cmd_run(const RunConfig& cfg,
                            const std::filesystem::path& out_dir) {
  const ResolvedConfig rc = resolve(cfg);
  std::filesystem::create_directories(out_dir);

  SchemeState state = make_initial_state(rc.cfg.scheme, rc.u0, rc.v0,
                                         rc.solver.v_floor);

  // Snapshot frames: emit the first state whose time has reached each target.
  std::vector<double> targets = rc.snapshot_times;
  std::size_t next_target = 0;
  auto emit_frames_through = [&](const SchemeState& s) {
    while (next_target < targets.size() &&
           s.t >= targets[next_target] * (1.0 - 1e-12)) {
      const std::string stamp = detail::format_g6(s.t);
      write_snapshot_csv(out_dir / ("u_t" + stamp + ".csv"), s.u);
      write_snapshot_csv(out_dir / ("v_t" + stamp + ".csv"), s.v);
      ++next_target;
    }
  };
  emit_frames_through(state);

  SchemeState final_state = state;
  RunLedger led = run(rc.cfg.scheme, state, rc.physics, rc.solver, rc.cfg.T,
                      [&](const SchemeState&, const SchemeState& next,
                          const StepReport&) {
                        emit_frames_through(next);
                        final_state = next;
                      });

  // Accumulated step times can land a few ulps short of the last target;
  // a completed run has reached T by construction, so any remaining targets
  // get the final state.
  if (!led.failed && next_target < targets.size()) {
    const std::string stamp = detail::format_g6(final_state.t);
    write_snapshot_csv(out_dir / ("u_t" + stamp + ".csv"), final_state.u);
    write_snapshot_csv(out_dir / ("v_t" + stamp + ".csv"), final_state.v);
    next_target = targets.size();
  }

  write_ledger_csv(out_dir / "ledger.csv", led);

  std::ofstream summary(out_dir / "summary.txt");
  summary << "scheme = " << to_string(rc.cfg.scheme) << '\n'
          << "preset = " << (cfg.preset.empty() ? "(none)" : cfg.preset) << '\n'
          << "h = " << format_g17(rc.mesh.h) << '\n'
          << "dt = " << format_g17(rc.solver.dt) << '\n'
          << "T = " << format_g17(rc.cfg.T) << '\n'
          << "eps = " << format_g17(rc.solver.eps) << '\n'
          << "status = " << (led.failed ? "failed" : "completed") << '\n';
  if (led.failed) {
    summary << "failure_step = " << led.failure_step << '\n'
            << "failure_reason = " << led.failure_reason << '\n';
  }
  summary << "steps_recorded = " << led.records.size() << '\n'
          << "min_u_over_run = " << format_g17(led.min_u_over_run) << '\n'
          << "entropy_floor_events = " << led.entropy_floor_events << '\n'
          << "v_floor_activations = " << led.v_floor_activations << '\n'
          << "dt_condition_violations = " << led.dt_condition_violations << '\n'
          << "max_picard_iters = " << led.max_picard_iters << '\n'
          << "weak_estimate_lhs = " << format_g17(led.weak_lhs) << '\n'
          << "weak_estimate_rhs = " << format_g17(led.v0_lumped_sq) << '\n'
          << "snapshot_frames = first state at or past each target time; "
             "targets default to t = 0 and seven log-spaced times up to T\n";

  const int exit_code = led.failed ? 2 : 0;
  return RunArtifacts{std::move(led), std::move(final_state), exit_code};
}

/// One cell of the positivity table: the minimum of u over a whole run, or
/// absent when the run failed.
struct Table1Cell {
  std::optional<double> min_u;
  std::string failure;
};

struct Table1Result {
  std::vector<double> h_list;
  std::vector<double> dt_list;
  std::vector<SchemeId> schemes;
  // cell index: (scheme_i * dt_count + dt_i) * h_count + h_i
  std::vector<Table1Cell> cells;

  const Table1Cell& cell(int scheme_i, int dt_i, int h_i) const {
    return cells[(scheme_i * static_cast<int>(dt_list.size()) + dt_i) *
                     static_cast<int>(h_list.size()) +
                 h_i];
  }
};

/// Runs the sharp-dip positivity experiment over a (scheme, dt, h) grid and
/// tabulates min u per run; failed runs are recorded, not propagated.
inline Table1Result cmd_table1(const std::vector<double>& h_list,
                               const std::vector<double>& dt_list,
                               const std::filesystem::path& out_dir,
                               int threads = detail::worker_count_from_env()) {
  Table1Result res;
  res.h_list = h_list;
  res.dt_list = dt_list;
  res.schemes.assign(std::begin(all_schemes), std::end(all_schemes));
  const int n_h = static_cast<int>(h_list.size());
  const int n_dt = static_cast<int>(dt_list.size());
  const int n = static_cast<int>(res.schemes.size()) * n_dt * n_h;
  res.cells.resize(n);

  detail::parallel_for(n, threads, [&](int i) {
    const int h_i = i % n_h;
    const int dt_i = (i / n_h) % n_dt;
    const int s_i = i / (n_h * n_dt);
    RunConfig cfg = preset_config("example-ii");
    cfg.scheme = res.schemes[s_i];
    cfg.h = h_list[h_i];
    cfg.dt = dt_list[dt_i];
    cfg.eps = 0.0;  // eps = h^2 per cell
    const ResolvedConfig rc = resolve(cfg);
    const SchemeState s0 = make_initial_state(cfg.scheme, rc.u0, rc.v0,
                                              rc.solver.v_floor);
    const RunLedger led = run(cfg.scheme, s0, rc.physics, rc.solver, cfg.T);
    if (led.failed)
      res.cells[i].failure = led.failure_reason;
    else
      res.cells[i].min_u = led.min_u_over_run;
  });

  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir / "table1.csv");
  if (!out) throw Error("cannot write table1.csv");
  out << "scheme,dt";
  for (double h : h_list) out << ",h=" << format_g17(h);
  out << '\n';
  for (int s_i = 0; s_i < static_cast<int>(res.schemes.size()); ++s_i) {
    for (int dt_i = 0; dt_i < n_dt; ++dt_i) {
      out << to_string(res.schemes[s_i]) << ',' << format_g17(dt_list[dt_i]);
      for (int h_i = 0; h_i < n_h; ++h_i) {
        const Table1Cell& c = res.cell(s_i, dt_i, h_i);
        out << ',' << (c.min_u ? format_g17(*c.min_u) : std::string("x"));
      }
      out << '\n';
    }
  }

  std::ofstream summary(out_dir / "summary.txt");
  summary << "cells = " << n << '\n';
  int failures = 0;
  for (const Table1Cell& c : res.cells)
    if (!c.min_u) ++failures;
  summary << "failed_cells = " << failures << '\n';
  for (int s_i = 0; s_i < static_cast<int>(res.schemes.size()); ++s_i)
    for (int dt_i = 0; dt_i < n_dt; ++dt_i)
      for (int h_i = 0; h_i < n_h; ++h_i) {
        const Table1Cell& c = res.cell(s_i, dt_i, h_i);
        if (!c.min_u)
          summary << "failed: scheme=" << to_string(res.schemes[s_i])
                  << " dt=" << format_g17(dt_list[dt_i])
                  << " h=" << format_g17(h_list[h_i]) << " reason="
                  << c.failure << '\n';
      }
  return res;
}

struct EocRung {
  double h = 0.0;
  bool failed = false;
  std::string failure;
  SolutionErrors errors;
  double r_u = 0.0, r_v = 0.0, r_vx = 0.0;  // nan on the first rung
};

struct EocResult {
  double ref_h = 0.0;
  SchemeId scheme = SchemeId::uv;
  SchemeId reference_scheme = SchemeId::uv;
  bool reference_failed = false;
  std::string reference_failure;
  std::vector<EocRung> rungs;
};

/// Convergence study on the smooth-oscillation data: each ladder rung is
/// compared against a fine reference solution (computed with the plain
/// scheme, or with the scheme under test in self-reference mode) and
/// consecutive rungs yield experimental orders.
inline EocResult cmd_eoc(SchemeId scheme, const std::vector<double>& h_list,
                         double ref_h, double dt, bool self_reference,
                         const std::filesystem::path& out_dir,
                         int threads = detail::worker_count_from_env()) {
  EocResult res;
  res.scheme = scheme;
  res.reference_scheme = self_reference ? scheme : SchemeId::uv;
  res.ref_h = ref_h;
  res.rungs.resize(h_list.size());
  for (std::size_t i = 0; i < h_list.size(); ++i) res.rungs[i].h = h_list[i];

  auto final_state_for = [&](SchemeId sid, double h,
                             std::string* fail) -> std::optional<SchemeState> {
    RunConfig cfg = preset_config("example-iv");
    cfg.scheme = sid;
    cfg.h = h;
    cfg.dt = dt;
    cfg.eps = 0.0;
    const ResolvedConfig rc = resolve(cfg);
    SchemeState out = make_initial_state(sid, rc.u0, rc.v0, rc.solver.v_floor);
    const RunLedger led =
        run(sid, out, rc.physics, rc.solver, cfg.T,
            [&](const SchemeState&, const SchemeState& next,
                const StepReport&) { out = next; });
    if (led.failed) {
      *fail = led.failure_reason;
      return std::nullopt;
    }
    return out;
  };

  const std::optional<SchemeState> ref =
      final_state_for(res.reference_scheme, ref_h, &res.reference_failure);
  if (!ref) {
    res.reference_failed = true;
  } else {
    detail::parallel_for(
        static_cast<int>(h_list.size()), threads, [&](int i) {
          EocRung& rung = res.rungs[i];
          std::string fail;
          const std::optional<SchemeState> approx =
              final_state_for(scheme, rung.h, &fail);
          if (!approx) {
            rung.failed = true;
            rung.failure = fail;
            return;
          }
          rung.errors = solution_errors(*ref, *approx);
        });
    for (std::size_t i = 0; i < res.rungs.size(); ++i) {
      EocRung& r = res.rungs[i];
      if (i == 0 || r.failed || res.rungs[i - 1].failed) {
        r.r_u = r.r_v = r.r_vx = quiet_nan();
        continue;
      }
      const EocRung& p = res.rungs[i - 1];
      r.r_u = eoc_rate(p.errors.e_u, r.errors.e_u, p.h, r.h);
      r.r_v = eoc_rate(p.errors.e_v, r.errors.e_v, p.h, r.h);
      r.r_vx = eoc_rate(p.errors.e_vx, r.errors.e_vx, p.h, r.h);
    }
  }

  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir / "eoc.csv");
  if (!out) throw Error("cannot write eoc.csv");
  out << "h,e_u,r_u,e_v,r_v,e_vx,r_vx\n";
  for (const EocRung& r : res.rungs) {
    out << format_g17(r.h);
    if (r.failed || res.reference_failed) {
      out << ",x,nan,x,nan,x,nan";
    } else {
      out << ',' << format_g17(r.errors.e_u) << ',' << format_g17(r.r_u) << ','
          << format_g17(r.errors.e_v) << ',' << format_g17(r.r_v) << ','
          << format_g17(r.errors.e_vx) << ',' << format_g17(r.r_vx);
    }
    out << '\n';
  }

  std::ofstream summary(out_dir / "summary.txt");
  summary << "scheme = " << to_string(scheme) << '\n'
          << "reference_scheme = " << to_string(res.reference_scheme) << '\n'
          << "reference_h = " << format_g17(ref_h) << '\n'
          << "dt = " << format_g17(dt) << '\n'
          << "reference_status = "
          << (res.reference_failed ? "failed" : "completed") << '\n';
  if (res.reference_failed)
    summary << "reference_failure = " << res.reference_failure << '\n';
  for (const EocRung& r : res.rungs)
    if (r.failed)
      summary << "failed: h=" << format_g17(r.h) << " reason=" << r.failure
              << '\n';
  return res;
}

}  // namespace chemo1d
