#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "chemo1d/schemes.hpp"

namespace chemo1d {

constexpr double k_entropy_floor = 1e-12;

inline double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

/// ||grad f||^2 with the cell-constant gradient.
inline double grad_l2_sq(const NodalField& f) {
  const double g = cell_l2_norm(gradient(f));
  return g * g;
}

struct EnergyUV {
  double value = 0.0;
  int floor_events = 0;
};

/// Exact-model energy (mu/4) int I_h F(u) + (chi/2) ||grad I_h sqrt(v)||^2
/// with F(s) = s log s - s + 1; u is floored at 1e-12 inside the log (events
/// counted), v is clamped at 0 before the square root.
inline EnergyUV energy_uv(const NodalField& u, const NodalField& v,
                          const PhysicalParams& pp) {
  EnergyUV e;
  double s = 0.0;
  for (int j = 0; j < u.size(); ++j) {
    double uj = u[j];
    if (uj < k_entropy_floor) {
      ++e.floor_events;
      uj = k_entropy_floor;
    }
    s += u.mesh().lumped_weight(j) * entropy(uj);
  }
  const NodalField sv =
      map_nodal(v, [](double x) { return std::sqrt(std::max(x, 0.0)); });
  e.value = 0.25 * pp.mu * s + 0.5 * pp.chi * grad_l2_sq(sv);
  return e;
}

/// Regularized energy (mu/4) int I_h F_eps(u) + (chi/2) ||sigma||^2 with the
/// consistent L2 norm for sigma.
inline double energy_usigma(const NodalField& u, const NodalField& sigma,
                            const PhysicalParams& pp, double eps) {
  double s = 0.0;
  for (int j = 0; j < u.size(); ++j)
    s += u.mesh().lumped_weight(j) * f_eps(u[j], eps);
  const double l2 = l2_norm(sigma);
  return 0.25 * pp.mu * s + 0.5 * pp.chi * l2 * l2;
}

/// D1 = (1/4) int u_x (I_h F_eps'(u))_x; nonnegative by convexity of F_eps.
inline double dissipation_d1(const NodalField& u, double eps) {
  const Mesh1D& m = u.mesh();
  double s = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) {
    const double du = u[e + 1] - u[e];
    const double dfp = f_eps_prime(u[e + 1], eps) - f_eps_prime(u[e], eps);
    s += du * dfp / m.h;
  }
  return 0.25 * s;
}

/// D2 = ||grad sigma||^2 + (1/3) int sigma^4 / v, the integral by two-point
/// Gauss on the interpolants with v floored nodally.
inline double dissipation_d2(const NodalField& v_old, const NodalField& sigma,
                             double v_floor) {
  const Mesh1D& m = sigma.mesh();
  const NodalField vfl =
      map_nodal(v_old, [&](double v) { return std::max(v, v_floor); });
  const double tg[2] = {detail::kGaussA, detail::kGaussB};
  double q = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) {
    for (double t : tg) {
      const double sg = detail::lerp_on(sigma, e, t);
      const double vg = detail::lerp_on(vfl, e, t);
      q += 0.5 * m.h * sg * sg * sg * sg / vg;
    }
  }
  return grad_l2_sq(sigma) + q / 3.0;
}

/// D3 = (1/2) int I_h(u_+) sigma^2 by two-point Gauss (exact for the cubic).
inline double dissipation_d3(const NodalField& u, const NodalField& sigma) {
  const Mesh1D& m = sigma.mesh();
  const NodalField upos = map_nodal(u, pos_part);
  const double tg[2] = {detail::kGaussA, detail::kGaussB};
  double q = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) {
    for (double t : tg) {
      const double ug = detail::lerp_on(upos, e, t);
      const double sg = detail::lerp_on(sigma, e, t);
      q += 0.5 * m.h * ug * sg * sg;
    }
  }
  return 0.5 * q;
}

/// Certified per-step tolerance for the energy inequalities.
inline double tol_energy(double c_tol, double energy_scale) {
  return 10.0 * c_tol * (1.0 + std::abs(energy_scale));
}

/// Residual of the coupled-scheme energy law; the certified inequality is
/// residual <= tol_energy(c_tol, E^eps(u^{n+1}, sigma^{n+1})).
inline double energy_residual_uvs(const SchemeState& prev,
                                  const SchemeState& next,
                                  const PhysicalParams& pp,
                                  const SolverParams& sp, double dt) {
  const double e1 = energy_usigma(next.u, *next.sigma, pp, sp.eps);
  const double e0 = energy_usigma(prev.u, *prev.sigma, pp, sp.eps);
  return (e1 - e0) / dt + pp.mu * dissipation_d1(next.u, sp.eps) +
         pp.chi * dissipation_d2(prev.v, *next.sigma, sp.v_floor) +
         pp.mu * pp.chi * dissipation_d3(next.u, *next.sigma);
}

/// Lumped integral of I_h G_eps(u); the energy the G-form laws control.
inline double lumped_g_energy(const NodalField& u, double eps) {
  double s = 0.0;
  for (int j = 0; j < u.size(); ++j)
    s += u.mesh().lumped_weight(j) * g_eps(u[j], eps);
  return s;
}

/// Residual of delta_t int I_h G_eps(u) + (1/2) int u^2 |(I_h G_eps'(u))_x|^2
/// <= (chi^2/2) ||grad v^{n+1}||^2, with u^2 by the element-midpoint rule as
/// in the scheme.
inline double energy_residual_uvnd(const NodalField& prev_u,
                                   const NodalField& next_u,
                                   const NodalField& next_v,
                                   const PhysicalParams& pp,
                                   const SolverParams& sp, double dt) {
  const Mesh1D& m = next_u.mesh();
  const double g1 = lumped_g_energy(next_u, sp.eps);
  const double g0 = lumped_g_energy(prev_u, sp.eps);
  const NodalField gp =
      map_nodal(next_u, [&](double u) { return g_eps_prime(u, sp.eps); });
  double diss = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) {
    const double umid = 0.5 * (next_u[e] + next_u[e + 1]);
    const double dgp = (gp[e + 1] - gp[e]) / m.h;
    diss += m.h * umid * umid * dgp * dgp;
  }
  return (g1 - g0) / dt + 0.5 * diss - 0.5 * pp.chi * pp.chi * grad_l2_sq(next_v);
}

/// Residual of delta_t int I_h G_eps(u) + (1/2) int |Lambda_eps(u)
/// (I_h G_eps'(u))_x|^2 <= (chi^2/2) ||grad v^{n+1}||^2.
inline double energy_residual_uvns(const NodalField& prev_u,
                                   const NodalField& next_u,
                                   const NodalField& next_v,
                                   const PhysicalParams& pp,
                                   const SolverParams& sp, double dt) {
  const Mesh1D& m = next_u.mesh();
  const double g1 = lumped_g_energy(next_u, sp.eps);
  const double g0 = lumped_g_energy(prev_u, sp.eps);
  const NodalField gp =
      map_nodal(next_u, [&](double u) { return g_eps_prime(u, sp.eps); });
  const CellField lam = lambda_eps(next_u, sp.eps);
  double diss = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) {
    const double dgp = (gp[e + 1] - gp[e]) / m.h;
    diss += m.h * lam[e] * lam[e] * dgp * dgp;
  }
  return (g1 - g0) / dt + 0.5 * diss - 0.5 * pp.chi * pp.chi * grad_l2_sq(next_v);
}

/// Reference solution carried to a coarse mesh: exact nodal restriction when
/// the meshes nest, P1 point evaluation otherwise.
inline NodalField carry_to(const NodalField& fine, const Mesh1D& coarse) {
  const Mesh1D& mf = fine.mesh();
  if (mf.a == coarse.a && mf.b == coarse.b &&
      mf.num_elements() % coarse.num_elements() == 0)
    return restrict_to(fine, coarse);
  return interpolate(coarse, [&](double x) { return eval(fine, x); });
}

struct SolutionErrors {
  double e_u = 0.0;
  double e_v = 0.0;
  double e_vx = 0.0;
};

/// Consistent-L2 errors of (u, v) and the broken-L2 error of the cell
/// gradient of v, all on the coarse mesh.
inline SolutionErrors solution_errors(const SchemeState& ref,
                                      const SchemeState& approx) {
  const Mesh1D& mc = approx.u.mesh();
  const NodalField ru = carry_to(ref.u, mc);
  const NodalField rv = carry_to(ref.v, mc);
  SolutionErrors e;
  e.e_u = l2_norm(ru - approx.u);
  e.e_v = l2_norm(rv - approx.v);
  const CellField gr = gradient(rv);
  const CellField ga = gradient(approx.v);
  double s = 0.0;
  for (int c = 0; c < gr.size(); ++c) {
    const double d = gr[c] - ga[c];
    s += mc.h * d * d;
  }
  e.e_vx = std::sqrt(s);
  return e;
}

/// Experimental order of convergence between two ladder rungs.
inline double eoc_rate(double e_coarse, double e_fine, double h_coarse,
                       double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

struct StepRecord {
  double t = 0.0;
  double mass = 0.0;
  double min_u = 0.0;
  double min_v = 0.0;
  double max_v = 0.0;
  double e_uv = 0.0;
  double e_usigma = 0.0;        // nan unless the scheme carries sigma
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;  // nan unless the scheme carries sigma
  double energy_residual = 0.0;  // nan for schemes without a certified law
  int picard_iters = 0;
  bool dt_condition_ok = true;
};

struct RunLedger {
  SchemeId scheme = SchemeId::uv;
  std::vector<StepRecord> records;

  bool failed = false;
  int failure_step = -1;
  std::string failure_reason;

  double min_u_over_run = std::numeric_limits<double>::infinity();
  double weak_lhs = 0.0;     // dt * sum_n ||grad v^{n+1}||^2
  double v0_lumped_sq = 0.0;  // int I_h((v^0)^2)
  int entropy_floor_events = 0;
  int v_floor_activations = 0;
  int dt_condition_violations = 0;
  int max_picard_iters = 0;

  const StepRecord& last() const { return records.back(); }
};

}  // namespace chemo1d
