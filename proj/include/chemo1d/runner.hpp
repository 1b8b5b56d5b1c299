#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "chemo1d/diagnostics.hpp"
#include "chemo1d/schemes.hpp"

namespace chemo1d {

/// Called after every completed step with the previous state, the new state,
/// and the step report.
using StepObserver = std::function<void(const SchemeState&, const SchemeState&,
                                        const StepReport&)>;

namespace detail {

inline void append_record(RunLedger& led, const SchemeState& s,
                          const StepReport& rep, const SchemeState* prev,
                          double step_dt, const PhysicalParams& pp,
                          const SolverParams& sp) {
  StepRecord r;
  r.t = s.t;
  r.mass = lumped_integral(s.u);
  r.min_u = min_value(s.u);
  r.min_v = min_value(s.v);
  r.max_v = max_value(s.v);
  const EnergyUV e = energy_uv(s.u, s.v, pp);
  r.e_uv = e.value;
  led.entropy_floor_events += e.floor_events;

  r.e_usigma = r.d1 = r.d2 = r.d3 = r.energy_residual = quiet_nan();
  if (s.sigma) {
    r.e_usigma = energy_usigma(s.u, *s.sigma, pp, sp.eps);
    if (prev) {
      r.d1 = dissipation_d1(s.u, sp.eps);
      r.d2 = dissipation_d2(prev->v, *s.sigma, sp.v_floor);
      r.d3 = dissipation_d3(s.u, *s.sigma);
      r.energy_residual = energy_residual_uvs(*prev, s, pp, sp, step_dt);
    }
  } else if (prev) {
    if (led.scheme == SchemeId::uv_nd)
      r.energy_residual =
          energy_residual_uvnd(prev->u, s.u, s.v, pp, sp, step_dt);
    else if (led.scheme == SchemeId::uv_ns)
      r.energy_residual =
          energy_residual_uvns(prev->u, s.u, s.v, pp, sp, step_dt);
  }

  r.picard_iters = rep.picard_iters;
  r.dt_condition_ok = rep.dt_condition_ok;
  led.min_u_over_run = std::min(led.min_u_over_run, r.min_u);
  if (prev) {
    led.weak_lhs += step_dt * grad_l2_sq(s.v);
    if (!rep.dt_condition_ok) ++led.dt_condition_violations;
    led.max_picard_iters = std::max(led.max_picard_iters, rep.picard_iters);
    led.v_floor_activations += rep.v_floor_activations;
  }
  led.records.push_back(r);
}

}  // namespace detail

/// Time loop from t = 0 to T: floor(T/dt) full steps plus one short step for
/// the remainder. A SolverError ends the run early and is recorded in the
/// ledger rather than propagated.
inline RunLedger run(SchemeId scheme, SchemeState state,
                     const PhysicalParams& pp, SolverParams sp, double T,
                     const StepObserver& observer = {}) {
  sp.validate(scheme);
  if (!(T > 0.0)) throw ConfigError("run: T must be positive");

  RunLedger led;
  led.scheme = scheme;
  led.v0_lumped_sq = lumped_inner(state.v, state.v);
  StepReport initial;
  initial.dt_condition_ok = dt_condition_holds(state.v, pp.chi, sp.dt);
  detail::append_record(led, state, initial, nullptr, sp.dt, pp, sp);

  const long n_full = static_cast<long>(std::floor(T / sp.dt + 1e-9));
  const double rem = T - static_cast<double>(n_full) * sp.dt;
  const bool has_short = rem > 1e-9 * sp.dt;
  const long n_total = n_full + (has_short ? 1 : 0);

  for (long k = 0; k < n_total; ++k) {
    SolverParams step_sp = sp;
    if (k == n_full) step_sp.dt = rem;
    try {
      StepResult r = advance(scheme, state, pp, step_sp);
      detail::append_record(led, r.state, r.report, &state, step_sp.dt, pp, sp);
      if (observer) observer(state, r.state, r.report);
      state = std::move(r.state);
    } catch (const SolverError& err) {
      led.failed = true;
      led.failure_step = err.step;
      led.failure_reason = err.what();
      break;
    }
  }
  return led;
}

}  // namespace chemo1d
