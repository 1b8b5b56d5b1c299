#pragma once

#include <cmath>

#include "chemo1d/errors.hpp"
#include "chemo1d/mesh.hpp"

namespace chemo1d {

/// Regularization parameter; valid range (0,1).
struct TruncationParam {
  double eps;
  explicit TruncationParam(double e) : eps(e) {
    if (!(e > 0.0 && e < 1.0))
      throw Error("TruncationParam: eps must lie in (0,1)");
  }
  operator double() const { return eps; }
};

inline double pos_part(double u) { return u > 0.0 ? u : 0.0; }
inline double neg_part(double u) { return u < 0.0 ? u : 0.0; }

/// Entropy density F(s) = s log s - s + 1 (untruncated; caller guards s > 0).
inline double entropy(double s) { return s * std::log(s) - s + 1.0; }

// Truncated convex potential G_eps with G_eps'' = 1/eps^2 below eps,
// 1/u^2 on [eps, 1/eps], eps^2 above; C^1 quadratic completions outside
// the middle branch. G_eps >= 0 on all of R for eps in (0,1).

inline double g_eps_dd(double u, double eps) {
  if (u < eps) return 1.0 / (eps * eps);
  if (u > 1.0 / eps) return eps * eps;
  return 1.0 / (u * u);
}

inline double g_eps_prime(double u, double eps) {
  if (u < eps) return (u - eps) / (eps * eps) - 1.0 / eps;
  if (u > 1.0 / eps) return eps * eps * (u - 1.0 / eps) - eps;
  return -1.0 / u;
}

inline double g_eps(double u, double eps) {
  if (u < eps) {
    const double d = u - eps;
    return 0.5 * d * d / (eps * eps) - d / eps + (1.0 / eps - std::log(eps));
  }
  if (u > 1.0 / eps) {
    const double d = u - 1.0 / eps;
    return 0.5 * eps * eps * d * d - eps * d + (1.0 / eps + std::log(eps));
  }
  return -std::log(u) + 1.0 / eps;
}

// Truncated concentration a_eps(u) = clamp(u, eps, 1/eps) and the convex
// potential F_eps with F_eps'' = 1/a_eps. F_eps is C^1, F_eps(1) = 0,
// F_eps >= 0.

inline double a_eps(double u, double eps) {
  if (u < eps) return eps;
  if (u > 1.0 / eps) return 1.0 / eps;
  return u;
}

inline double f_eps_dd(double u, double eps) { return 1.0 / a_eps(u, eps); }

inline double f_eps_prime(double u, double eps) {
  if (u < eps) return (u - eps) / eps + std::log(eps);
  if (u > 1.0 / eps) return eps * (u - 1.0 / eps) - std::log(eps);
  return std::log(u);
}

inline double f_eps(double u, double eps) {
  if (u < eps) {
    const double d = u - eps;
    return 0.5 * d * d / eps + std::log(eps) * d + (eps * std::log(eps) - eps + 1.0);
  }
  if (u > 1.0 / eps) {
    const double d = u - 1.0 / eps;
    return 0.5 * eps * d * d - std::log(eps) * d +
           (-std::log(eps) / eps - 1.0 / eps + 1.0);
  }
  return u * std::log(u) - u + 1.0;
}

/// Edge value of the truncated-concentration reconstruction: satisfies
/// (lambda * dG')^2 = du * dG' with dG' = G_eps'(ub) - G_eps'(ua), and
/// carries the sign of the edge midpoint (ties resolve to +).
inline double lambda_eps_edge(double ua, double ub, double eps) {
  if (ua == ub) return ua;
  const double du = ub - ua;
  const double dg = g_eps_prime(ub, eps) - g_eps_prime(ua, eps);
  const double mag = std::sqrt(du * dg) / std::abs(dg);
  return 0.5 * (ua + ub) >= 0.0 ? mag : -mag;
}

/// Cellwise truncated concentration used by the scheme with nonlinear
/// chemotaxis flux.
inline CellField lambda_eps(const NodalField& u, double eps) {
  const Mesh1D& m = u.mesh();
  std::vector<double> lam(m.num_elements());
  for (int e = 0; e < m.num_elements(); ++e)
    lam[e] = lambda_eps_edge(u[e], u[e + 1], eps);
  return CellField(m, std::move(lam));
}

}  // namespace chemo1d
