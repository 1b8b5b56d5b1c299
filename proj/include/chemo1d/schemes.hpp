#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chemo1d/errors.hpp"
#include "chemo1d/mesh.hpp"
#include "chemo1d/potentials.hpp"
#include "chemo1d/tridiag.hpp"

namespace chemo1d {

enum class SchemeId { uv, uv_nd, uv_ns, uvs, uv_ad };

inline const char* to_string(SchemeId s) {
  switch (s) {
    case SchemeId::uv: return "uv";
    case SchemeId::uv_nd: return "uv-nd";
    case SchemeId::uv_ns: return "uv-ns";
    case SchemeId::uvs: return "uvs";
    case SchemeId::uv_ad: return "uv-ad";
  }
  return "?";
}

inline SchemeId scheme_from_string(const std::string& s) {
  if (s == "uv") return SchemeId::uv;
  if (s == "uv-nd") return SchemeId::uv_nd;
  if (s == "uv-ns") return SchemeId::uv_ns;
  if (s == "uvs") return SchemeId::uvs;
  if (s == "uv-ad") return SchemeId::uv_ad;
  throw ConfigError("unknown scheme '" + s +
                    "' (expected uv, uv-nd, uv-ns, uvs, or uv-ad)");
}

constexpr SchemeId all_schemes[] = {SchemeId::uv, SchemeId::uv_nd,
                                    SchemeId::uv_ns, SchemeId::uvs,
                                    SchemeId::uv_ad};

/// Schemes whose chemotaxis or entropy handling reads the truncation parameter.
inline bool scheme_uses_eps(SchemeId s) {
  return s == SchemeId::uv_nd || s == SchemeId::uv_ns || s == SchemeId::uvs;
}

inline bool scheme_uses_sigma(SchemeId s) { return s == SchemeId::uvs; }

inline bool scheme_is_iterative(SchemeId s) {
  return s == SchemeId::uv_nd || s == SchemeId::uv_ns || s == SchemeId::uvs;
}

/// On iteration-cap hit: carry the last iterate forward (true) or abort the
/// run (false).
inline bool default_carry_forward(SchemeId s) { return s == SchemeId::uv_ns; }

struct PhysicalParams {
  double chi = 1.0;
  double mu = 1.0;
};

struct SolverParams {
  double dt = 0.0;
  double eps = 0.0;  // required in (0,1) by the iterative schemes
  double c_tol = 1e-8;
  int max_iter = 100;
  bool carry_forward_on_cap = false;
  double v_floor = 1e-300;

  void validate(SchemeId scheme) const {
    if (!(dt > 0.0)) throw ConfigError("SolverParams: dt must be positive");
    if (!(c_tol > 0.0)) throw ConfigError("SolverParams: c_tol must be positive");
    if (max_iter < 1) throw ConfigError("SolverParams: max_iter must be >= 1");
    if (scheme_uses_eps(scheme) && !(eps > 0.0 && eps < 1.0))
      throw ConfigError("SolverParams: eps must lie in (0,1) for scheme " +
                        std::string(to_string(scheme)));
  }
};

struct SchemeState {
  NodalField u;
  NodalField v;
  std::optional<NodalField> sigma;  // present only for the (u,v,sigma) scheme
  double t = 0.0;
  int n = 0;
};

struct StepReport {
  int picard_iters = 0;        // number of linear sweeps (0 for linear schemes)
  double picard_residual = 0.0;
  bool converged = true;       // false when the cap was hit and carried forward
  bool dt_condition_ok = true;
  int v_floor_activations = 0;
};

struct StepResult {
  SchemeState state;
  StepReport report;
};

inline void require_finite(const NodalField& f, const char* what, int step,
                           double t) {
  if (!all_finite(f)) {
    throw DivergedError(std::string(what) + ": solution has non-finite values",
                        step, t);
  }
}

/// Time-step size condition dt < 2 / (chi^2 ||grad v||_inf); informational,
/// never used to abort.
inline bool dt_condition_holds(const NodalField& v, double chi, double dt) {
  const CellField g = gradient(v);
  double gmax = 0.0;
  for (int e = 0; e < g.size(); ++e) gmax = std::max(gmax, std::abs(g[e]));
  if (gmax == 0.0 || chi == 0.0) return true;
  return dt < 2.0 / (chi * chi * gmax);
}

/// Shared second step: lumped implicit equation
/// (M_L/dt + K + mu R(u+)) v^{n+1} = M_L v^n / dt with R the lumped reaction
/// matrix. The system matrix is an M-matrix, so 0 < v^{n+1} <= max(v^n).
inline NodalField step_v(const NodalField& u_new, const NodalField& v_old,
                         const PhysicalParams& pp, double dt, int step,
                         double t) {
  const Mesh1D& m = v_old.mesh();
  require_same_mesh(m, u_new.mesh(), "step_v");
  TriDiag A = assemble_stiffness(m);
  std::vector<double> rhs(m.num_nodes);
  for (int j = 0; j < m.num_nodes; ++j) {
    const double w = m.lumped_weight(j);
    A.diag[j] += w / dt + pp.mu * w * pos_part(u_new[j]);
    rhs[j] = w * v_old[j] / dt;
  }
  NodalField v(m, solve(A, rhs, "v step", step, t));
  require_finite(v, "v step", step, t);
  return v;
}

/// Load vector (w grad(v), grad(phi_i)) for a cellwise coefficient w; the
/// two contributions of each element cancel pairwise, so the load sums to 0.
inline std::vector<double> flux_load(const CellField& w, const CellField& dv) {
  require_same_mesh(w.mesh(), dv.mesh(), "flux_load");
  std::vector<double> L(w.mesh().num_nodes, 0.0);
  for (int e = 0; e < w.size(); ++e) {
    const double f = w[e] * dv[e];
    L[e] -= f;
    L[e + 1] += f;
  }
  return L;
}

namespace detail {

// two-point Gauss abscissae on the unit interval
constexpr double kGaussA = 0.5 - 0.28867513459481288225;  // 0.5 - 1/(2 sqrt 3)
constexpr double kGaussB = 0.5 + 0.28867513459481288225;

inline double lerp_on(const NodalField& f, int e, double t) {
  return f[e] * (1.0 - t) + f[e + 1] * t;
}

inline double rel_increment(const NodalField& unew, const NodalField& uold) {
  const double num = h1_norm(unew - uold);
  double den = h1_norm(uold);
  if (den == 0.0) den = 1.0;
  return num / den;
}

inline double rel_increment_pair(const NodalField& unew, const NodalField& uold,
                                 const NodalField& snew,
                                 const NodalField& sold) {
  const double nu = h1_norm(unew - uold), ns = h1_norm(snew - sold);
  const double du = h1_norm(uold), ds = h1_norm(sold);
  double den = std::sqrt(du * du + ds * ds);
  if (den == 0.0) den = 1.0;
  return std::sqrt(nu * nu + ns * ns) / den;
}

}  // namespace detail

/// Plain linear scheme: (M_L/dt + K - chi C(v^n)) u^{n+1} = M_L u^n / dt.
inline StepResult uv_step(const SchemeState& s, const PhysicalParams& pp,
                          const SolverParams& sp) {
  const Mesh1D& m = s.u.mesh();
  const int n1 = s.n + 1;
  const double t1 = s.t + sp.dt;
  StepReport rep;
  rep.dt_condition_ok = dt_condition_holds(s.v, pp.chi, sp.dt);

  TriDiag A = assemble_stiffness(m);
  add_scaled(A, -pp.chi, assemble_convection(m, s.v));
  std::vector<double> rhs(m.num_nodes);
  for (int j = 0; j < m.num_nodes; ++j) {
    const double w = m.lumped_weight(j);
    A.diag[j] += w / sp.dt;
    rhs[j] = w * s.u[j] / sp.dt;
  }
  NodalField u1(m, solve(A, rhs, "u step (uv)", n1, t1));
  require_finite(u1, "u step (uv)", n1, t1);
  NodalField v1 = step_v(u1, s.v, pp, sp.dt, n1, t1);
  return {SchemeState{std::move(u1), std::move(v1), std::nullopt, t1, n1}, rep};
}

/// Nonlinear-diffusion scheme: the stiffness term is replaced by
/// ((u^{n+1})^2 grad(I_h G_eps'(u^{n+1})), grad(u-bar)), linearized by a
/// Picard sweep with fixed left-hand side M_L/dt + K.
inline StepResult uvnd_step(const SchemeState& s, const PhysicalParams& pp,
                            const SolverParams& sp) {
  const Mesh1D& m = s.u.mesh();
  const int n1 = s.n + 1;
  const double t1 = s.t + sp.dt;
  StepReport rep;
  rep.dt_condition_ok = dt_condition_holds(s.v, pp.chi, sp.dt);

  const TriDiag K = assemble_stiffness(m);
  const TriDiag C = assemble_convection(m, s.v);
  TriDiag A = K;
  std::vector<double> base(m.num_nodes);
  for (int j = 0; j < m.num_nodes; ++j) {
    const double w = m.lumped_weight(j);
    A.diag[j] += w / sp.dt;
    base[j] = w * s.u[j] / sp.dt;
  }

  NodalField ul = s.u;
  for (int l = 0; l < sp.max_iter; ++l) {
    std::vector<double> rhs = base;
    const std::vector<double> Ku = matvec(K, ul.values());
    const std::vector<double> Cu = matvec(C, ul.values());
    for (int j = 0; j < m.num_nodes; ++j) rhs[j] += Ku[j] + pp.chi * Cu[j];
    // nonlinear diffusion load with (u_l)^2 by the element-midpoint rule
    const NodalField gp =
        map_nodal(ul, [&](double u) { return g_eps_prime(u, sp.eps); });
    for (int e = 0; e < m.num_elements(); ++e) {
      const double umid = 0.5 * (ul[e] + ul[e + 1]);
      const double f = umid * umid * (gp[e + 1] - gp[e]) / m.h;
      rhs[e] += f;
      rhs[e + 1] -= f;
    }
    NodalField unew(m, solve(A, rhs, "u step (uv-nd)", n1, t1));
    require_finite(unew, "u step (uv-nd)", n1, t1);
    const double rel = detail::rel_increment(unew, ul);
    if (!std::isfinite(rel))
      throw DivergedError("u step (uv-nd): iteration diverged", n1, t1);
    ul = std::move(unew);
    rep.picard_iters = l + 1;
    rep.picard_residual = rel;
    if (rel <= sp.c_tol) break;
    if (l + 1 == sp.max_iter) {
      if (!sp.carry_forward_on_cap)
        throw NonConvergenceError("u step (uv-nd): iteration cap reached", n1,
                                  t1, rel);
      rep.converged = false;
    }
  }
  NodalField v1 = step_v(ul, s.v, pp, sp.dt, n1, t1);
  return {SchemeState{std::move(ul), std::move(v1), std::nullopt, t1, n1}, rep};
}

/// Nonlinear-chemotaxis scheme: chi (Lambda_eps(u^{n+1}) grad v^n, grad u-bar)
/// with the cellwise reconstruction Lambda_eps, linearized by a Picard sweep.
inline StepResult uvns_step(const SchemeState& s, const PhysicalParams& pp,
                            const SolverParams& sp) {
  const Mesh1D& m = s.u.mesh();
  const int n1 = s.n + 1;
  const double t1 = s.t + sp.dt;
  StepReport rep;
  rep.dt_condition_ok = dt_condition_holds(s.v, pp.chi, sp.dt);

  TriDiag A = assemble_stiffness(m);
  std::vector<double> base(m.num_nodes);
  for (int j = 0; j < m.num_nodes; ++j) {
    const double w = m.lumped_weight(j);
    A.diag[j] += w / sp.dt;
    base[j] = w * s.u[j] / sp.dt;
  }
  const CellField dv = gradient(s.v);

  NodalField ul = s.u;
  for (int l = 0; l < sp.max_iter; ++l) {
    std::vector<double> rhs = base;
    const std::vector<double> L = flux_load(lambda_eps(ul, sp.eps), dv);
    for (int j = 0; j < m.num_nodes; ++j) rhs[j] += pp.chi * L[j];
    NodalField unew(m, solve(A, rhs, "u step (uv-ns)", n1, t1));
    require_finite(unew, "u step (uv-ns)", n1, t1);
    const double rel = detail::rel_increment(unew, ul);
    if (!std::isfinite(rel))
      throw DivergedError("u step (uv-ns): iteration diverged", n1, t1);
    ul = std::move(unew);
    rep.picard_iters = l + 1;
    rep.picard_residual = rel;
    if (rel <= sp.c_tol) break;
    if (l + 1 == sp.max_iter) {
      if (!sp.carry_forward_on_cap)
        throw NonConvergenceError("u step (uv-ns): iteration cap reached", n1,
                                  t1, rel);
      rep.converged = false;
    }
  }
  NodalField v1 = step_v(ul, s.v, pp, sp.dt, n1, t1);
  return {SchemeState{std::move(ul), std::move(v1), std::nullopt, t1, n1}, rep};
}

/// Upwind scheme in finite element form: artificial diffusion
/// h (chi/2)(|v_x^n| u_x, u-bar_x) added to the plain linear scheme.
inline TriDiag assemble_uvad_fe_system(const Mesh1D& m, const NodalField& v,
                                       double chi, double dt) {
  TriDiag A = assemble_stiffness(m);
  CellField w = gradient(v);
  for (int e = 0; e < w.size(); ++e) w[e] = 0.5 * chi * m.h * std::abs(w[e]);
  add_scaled(A, 1.0, assemble_weighted_stiffness(m, w));
  add_scaled(A, -chi, assemble_convection(m, v));
  for (int j = 0; j < m.num_nodes; ++j) A.diag[j] += m.lumped_weight(j) / dt;
  return A;
}

/// The same operator assembled through the upwind finite volume flux form,
/// control volumes |K_j| = lumped weights, zero-flux closure at the ends.
inline TriDiag assemble_uvad_fv_system(const Mesh1D& m, const NodalField& v,
                                       double chi, double dt) {
  TriDiag A = TriDiag::zeros(m);
  const int J = m.num_nodes;
  for (int j = 0; j < J; ++j) A.diag[j] = m.lumped_weight(j) / dt;
  // -(dx u_{j+1/2} - dx u_{j-1/2}) with one-sided closures at the boundary
  for (int e = 0; e < m.num_elements(); ++e) {
    const double k = 1.0 / m.h;
    A.diag[e] += k;
    A.diag[e + 1] += k;
    A.lower[e] -= k;
    A.upper[e] -= k;
  }
  // upwind transport: row j gets chi ((b)_+ u_j + (b)_- u_{j+1}
  //                                 - (a)_+ u_{j-1} - (a)_- u_j)
  // with b = dx v_{j+1/2}, a = dx v_{j-1/2}
  const CellField dv = gradient(v);
  for (int j = 0; j < J; ++j) {
    const double b = (j + 1 < J) ? dv[j] : 0.0;
    const double a = (j > 0) ? dv[j - 1] : 0.0;
    A.diag[j] += chi * (pos_part(b) - neg_part(a));
    if (j + 1 < J) A.upper[j] += chi * neg_part(b);
    if (j > 0) A.lower[j - 1] -= chi * pos_part(a);
  }
  return A;
}

inline StepResult uvad_step(const SchemeState& s, const PhysicalParams& pp,
                            const SolverParams& sp) {
  const Mesh1D& m = s.u.mesh();
  const int n1 = s.n + 1;
  const double t1 = s.t + sp.dt;
  StepReport rep;
  rep.dt_condition_ok = dt_condition_holds(s.v, pp.chi, sp.dt);

  TriDiag A = assemble_uvad_fe_system(m, s.v, pp.chi, sp.dt);
  std::vector<double> rhs(m.num_nodes);
  for (int j = 0; j < m.num_nodes; ++j)
    rhs[j] = m.lumped_weight(j) * s.u[j] / sp.dt;
  NodalField u1(m, solve(A, rhs, "u step (uv-ad)", n1, t1));
  require_finite(u1, "u step (uv-ad)", n1, t1);
  NodalField v1 = step_v(u1, s.v, pp, sp.dt, n1, t1);
  return {SchemeState{std::move(u1), std::move(v1), std::nullopt, t1, n1}, rep};
}

/// Initial sigma = lumped-L2 projection of grad(I_h sqrt(v0)) onto P1, with
/// the boundary values then pinned to zero.
inline NodalField init_sigma(const NodalField& v0, double v_floor = 1e-300) {
  const Mesh1D& m = v0.mesh();
  const NodalField sv =
      map_nodal(v0, [&](double v) { return std::sqrt(std::max(v, v_floor)); });
  const CellField g = gradient(sv);
  NodalField sigma = NodalField::zeros(m);
  for (int j = 1; j + 1 < m.num_nodes; ++j) sigma[j] = 0.5 * (g[j - 1] + g[j]);
  return sigma;
}

/// Coupled (u, sigma) scheme with alternating Picard sweeps; sigma carries
/// homogeneous Dirichlet conditions and a consistent mass matrix.
inline StepResult uvs_step(const SchemeState& s, const PhysicalParams& pp,
                           const SolverParams& sp) {
  if (!s.sigma) throw Error("uvs_step: state carries no sigma field");
  const Mesh1D& m = s.u.mesh();
  const int n1 = s.n + 1;
  const double t1 = s.t + sp.dt;
  StepReport rep;
  rep.dt_condition_ok = dt_condition_holds(s.v, pp.chi, sp.dt);

  int floors = 0;
  const NodalField vfl = map_nodal(s.v, [&](double v) {
    if (v < sp.v_floor) {
      ++floors;
      return sp.v_floor;
    }
    return v;
  });
  rep.v_floor_activations = floors;
  const NodalField sv = map_nodal(vfl, [](double v) { return std::sqrt(v); });

  const TriDiag K = assemble_stiffness(m);
  const TriDiag Mc = assemble_mass(m);
  TriDiag Au = K;
  std::vector<double> base_u(m.num_nodes);
  for (int j = 0; j < m.num_nodes; ++j) {
    const double w = m.lumped_weight(j);
    Au.diag[j] += w / sp.dt;
    base_u[j] = w * s.u[j] / sp.dt;
  }
  std::vector<double> base_s = matvec(Mc, s.sigma->values());
  for (double& x : base_s) x /= sp.dt;

  // gauss points of the unit interval and the hat-function values there
  const double tg[2] = {detail::kGaussA, detail::kGaussB};

  NodalField ul = s.u;
  NodalField sl = *s.sigma;
  for (int l = 0; l < sp.max_iter; ++l) {
    // Substep 1: u with chemotaxis load 2 chi (u_l sqrt(v^n) sigma_l, u-bar_x)
    std::vector<double> rhs_u = base_u;
    for (int e = 0; e < m.num_elements(); ++e) {
      double q = 0.0;
      for (double t : tg)
        q += 0.5 * m.h * detail::lerp_on(ul, e, t) * detail::lerp_on(sv, e, t) *
             detail::lerp_on(sl, e, t);
      const double f = 2.0 * pp.chi * q / m.h;
      rhs_u[e] -= f;
      rhs_u[e + 1] += f;
    }
    NodalField u1(m, solve(Au, rhs_u, "u step (uvs)", n1, t1));
    require_finite(u1, "u step (uvs)", n1, t1);

    // Substep 2: sigma system. The transport pair is assembled in its
    // integrated-by-parts form (2/3)((sigma sigma_x sigma-bar
    // - sigma^2 sigma-bar_x)/sqrt(v^n)) whose pairing with sigma-bar = sigma
    // vanishes at every quadrature point; that pointwise cancellation is what
    // closes the per-step energy law in 1D under numerical quadrature.
    TriDiag As = K;
    add_scaled(As, 1.0 / sp.dt, Mc);
    add_scaled(As, 0.5 * pp.mu,
               assemble_weighted_mass(m, map_nodal(u1, pos_part)));
    std::vector<double> rhs_s = base_s;
    const CellField dsl = gradient(sl);
    const NodalField fp =
        map_nodal(ul, [&](double u) { return f_eps_prime(u, sp.eps); });
    const CellField dfp = gradient(fp);
    for (int e = 0; e < m.num_elements(); ++e) {
      for (double t : tg) {
        const double sg = detail::lerp_on(sl, e, t);
        const double ug = detail::lerp_on(ul, e, t);
        const double vg = detail::lerp_on(vfl, e, t);
        const double svg = detail::lerp_on(sv, e, t);
        const double integrand = -(1.0 / 3.0) * sg * sg * sg / vg +
                                 (2.0 / 3.0) * dsl[e] * sg / svg -
                                 0.5 * pp.mu * svg * ug * dfp[e];
        const double wq = 0.5 * m.h * integrand;
        rhs_s[e] += wq * (1.0 - t);
        rhs_s[e + 1] += wq * t;
        const double wx = 0.5 * m.h * (-(2.0 / 3.0) * sg * sg / svg);
        rhs_s[e] -= wx / m.h;
        rhs_s[e + 1] += wx / m.h;
      }
    }
    set_dirichlet_row(As, rhs_s, 0);
    set_dirichlet_row(As, rhs_s, m.num_nodes - 1);
    NodalField s1(m, solve(As, rhs_s, "sigma step (uvs)", n1, t1));
    require_finite(s1, "sigma step (uvs)", n1, t1);

    // Substep 3: joint relative H1 increment
    const double rel = detail::rel_increment_pair(u1, ul, s1, sl);
    if (!std::isfinite(rel))
      throw DivergedError("uvs step: iteration diverged", n1, t1);
    ul = std::move(u1);
    sl = std::move(s1);
    rep.picard_iters = l + 1;
    rep.picard_residual = rel;
    if (rel <= sp.c_tol) break;
    if (l + 1 == sp.max_iter) {
      if (!sp.carry_forward_on_cap)
        throw NonConvergenceError("uvs step: iteration cap reached", n1, t1,
                                  rel);
      rep.converged = false;
    }
  }
  NodalField v1 = step_v(ul, s.v, pp, sp.dt, n1, t1);
  return {SchemeState{std::move(ul), std::move(v1), std::move(sl), t1, n1}, rep};
}

inline StepResult advance(SchemeId scheme, const SchemeState& s,
                          const PhysicalParams& pp, const SolverParams& sp) {
  switch (scheme) {
    case SchemeId::uv: return uv_step(s, pp, sp);
    case SchemeId::uv_nd: return uvnd_step(s, pp, sp);
    case SchemeId::uv_ns: return uvns_step(s, pp, sp);
    case SchemeId::uvs: return uvs_step(s, pp, sp);
    case SchemeId::uv_ad: return uvad_step(s, pp, sp);
  }
  throw Error("advance: unknown scheme");
}

/// Initial state; validates the sign requirements u0 >= 0 and v0 > 0.
inline SchemeState make_initial_state(SchemeId scheme, const NodalField& u0,
                                      const NodalField& v0,
                                      double v_floor = 1e-300) {
  require_same_mesh(u0.mesh(), v0.mesh(), "make_initial_state");
  if (min_value(u0) < 0.0)
    throw ConfigError("initial data: u0 must be nonnegative");
  if (min_value(v0) <= 0.0)
    throw ConfigError("initial data: v0 must be strictly positive");
  SchemeState s{u0, v0, std::nullopt, 0.0, 0};
  if (scheme_uses_sigma(scheme)) s.sigma = init_sigma(v0, v_floor);
  return s;
}

}  // namespace chemo1d
