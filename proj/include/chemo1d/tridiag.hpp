#pragma once

#include <cmath>
#include <vector>

#include "chemo1d/errors.hpp"
#include "chemo1d/mesh.hpp"

namespace chemo1d {

/// Tridiagonal matrix on the nodes of a mesh.
/// lower[i] = A(i+1,i), diag[i] = A(i,i), upper[i] = A(i,i+1).
struct TriDiag {
  Mesh1D mesh;
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  static TriDiag zeros(const Mesh1D& m) {
    const int n = m.num_nodes;
    return TriDiag{m, std::vector<double>(n - 1, 0.0),
                   std::vector<double>(n, 0.0), std::vector<double>(n - 1, 0.0)};
  }

  int size() const { return static_cast<int>(diag.size()); }
};

/// A += c * B.
inline void add_scaled(TriDiag& A, double c, const TriDiag& B) {
  require_same_mesh(A.mesh, B.mesh, "add_scaled");
  for (int i = 0; i < A.size(); ++i) A.diag[i] += c * B.diag[i];
  for (int i = 0; i + 1 < A.size(); ++i) {
    A.lower[i] += c * B.lower[i];
    A.upper[i] += c * B.upper[i];
  }
}

inline std::vector<double> matvec(const TriDiag& A, const std::vector<double>& x) {
  const int n = A.size();
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    double s = A.diag[i] * x[i];
    if (i > 0) s += A.lower[i - 1] * x[i - 1];
    if (i + 1 < n) s += A.upper[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

inline double norm_inf(const TriDiag& A) {
  double m = 0.0;
  for (int i = 0; i < A.size(); ++i) {
    double s = std::abs(A.diag[i]);
    if (i > 0) s += std::abs(A.lower[i - 1]);
    if (i + 1 < A.size()) s += std::abs(A.upper[i]);
    m = std::max(m, s);
  }
  return m;
}

inline std::vector<double> column_sums(const TriDiag& A) {
  const int n = A.size();
  std::vector<double> s(n, 0.0);
  for (int i = 0; i < n; ++i) {
    s[i] += A.diag[i];
    if (i > 0) s[i - 1] += A.lower[i - 1];
    if (i + 1 < n) s[i + 1] += A.upper[i];
  }
  return s;
}

/// Stiffness matrix (grad phi_j, grad phi_i): per element (1/h) [[1,-1],[-1,1]].
inline TriDiag assemble_stiffness(const Mesh1D& m) {
  TriDiag A = TriDiag::zeros(m);
  const double k = 1.0 / m.h;
  for (int e = 0; e < m.num_elements(); ++e) {
    A.diag[e] += k;
    A.diag[e + 1] += k;
    A.lower[e] -= k;
    A.upper[e] -= k;
  }
  return A;
}

/// Stiffness scaled by a cellwise coefficient: per element (w_e/h) [[1,-1],[-1,1]].
inline TriDiag assemble_weighted_stiffness(const Mesh1D& m, const CellField& w) {
  require_same_mesh(m, w.mesh(), "assemble_weighted_stiffness");
  TriDiag A = TriDiag::zeros(m);
  for (int e = 0; e < m.num_elements(); ++e) {
    const double k = w[e] / m.h;
    A.diag[e] += k;
    A.diag[e + 1] += k;
    A.lower[e] -= k;
    A.upper[e] -= k;
  }
  return A;
}

/// Lumped mass matrix: diagonal of trapezoid weights.
inline TriDiag assemble_lumped_mass(const Mesh1D& m) {
  TriDiag A = TriDiag::zeros(m);
  for (int j = 0; j < m.num_nodes; ++j) A.diag[j] = m.lumped_weight(j);
  return A;
}

/// Lumped weighted mass: diagonal w_j r_j (trapezoid rule on (r phi_j, phi_i)).
inline TriDiag assemble_lumped_weighted_mass(const Mesh1D& m, const NodalField& r) {
  require_same_mesh(m, r.mesh(), "assemble_lumped_weighted_mass");
  TriDiag A = TriDiag::zeros(m);
  for (int j = 0; j < m.num_nodes; ++j) A.diag[j] = m.lumped_weight(j) * r[j];
  return A;
}

/// Consistent mass matrix: per element (h/6) [[2,1],[1,2]].
inline TriDiag assemble_mass(const Mesh1D& m) {
  TriDiag A = TriDiag::zeros(m);
  const double h = m.h;
  for (int e = 0; e < m.num_elements(); ++e) {
    A.diag[e] += h / 3.0;
    A.diag[e + 1] += h / 3.0;
    A.lower[e] += h / 6.0;
    A.upper[e] += h / 6.0;
  }
  return A;
}

/// Consistent mass weighted by the P1 interpolant of a nodal coefficient:
/// exact element integrals of w(x) phi_a phi_b with w linear on the element.
inline TriDiag assemble_weighted_mass(const Mesh1D& m, const NodalField& w) {
  require_same_mesh(m, w.mesh(), "assemble_weighted_mass");
  TriDiag A = TriDiag::zeros(m);
  const double h = m.h;
  for (int e = 0; e < m.num_elements(); ++e) {
    const double wa = w[e], wb = w[e + 1];
    A.diag[e] += h * (wa / 4.0 + wb / 12.0);
    A.diag[e + 1] += h * (wa / 12.0 + wb / 4.0);
    const double off = h * (wa + wb) / 12.0;
    A.lower[e] += off;
    A.upper[e] += off;
  }
  return A;
}

/// Chemotaxis coupling matrix C with C(i,j) = (phi_j grad(v), grad(phi_i)):
/// element e with slope dv = (v[e+1]-v[e])/h contributes -dv/2 to row e and
/// +dv/2 to row e+1, in both columns e and e+1. All column sums vanish.
inline TriDiag assemble_convection(const Mesh1D& m, const NodalField& v) {
  require_same_mesh(m, v.mesh(), "assemble_convection");
  TriDiag A = TriDiag::zeros(m);
  for (int e = 0; e < m.num_elements(); ++e) {
    const double half_dv = 0.5 * (v[e + 1] - v[e]) / m.h;
    A.diag[e] -= half_dv;
    A.upper[e] -= half_dv;
    A.lower[e] += half_dv;
    A.diag[e + 1] += half_dv;
  }
  return A;
}

/// Replace row j by the identity row and zero the right-hand side entry.
inline void set_dirichlet_row(TriDiag& A, std::vector<double>& rhs, int j) {
  A.diag[j] = 1.0;
  if (j > 0) A.lower[j - 1] = 0.0;
  if (j + 1 < A.size()) A.upper[j] = 0.0;
  rhs[j] = 0.0;
}

/// Thomas elimination. Pivots below 1e-14 * norm_inf(A) raise
/// SingularSystemError carrying the caller's step context.
inline std::vector<double> solve(const TriDiag& A, const std::vector<double>& rhs,
                                 const char* what = "tridiagonal solve",
                                 int step = 0, double time = 0.0) {
  const int n = A.size();
  if (static_cast<int>(rhs.size()) != n)
    throw Error("solve: rhs size does not match matrix size");
  const double threshold = 1e-14 * norm_inf(A);

  std::vector<double> cp(n - 1), x(n);
  double piv = A.diag[0];
  if (std::abs(piv) < threshold)
    throw SingularSystemError(std::string(what) + ": singular system", step, time);
  if (n > 1) cp[0] = A.upper[0] / piv;
  x[0] = rhs[0] / piv;
  for (int i = 1; i < n; ++i) {
    piv = A.diag[i] - A.lower[i - 1] * cp[i - 1];
    if (std::abs(piv) < threshold)
      throw SingularSystemError(std::string(what) + ": singular system", step, time);
    if (i + 1 < n) cp[i] = A.upper[i] / piv;
    x[i] = (rhs[i] - A.lower[i - 1] * x[i - 1]) / piv;
  }
  for (int i = n - 2; i >= 0; --i) x[i] -= cp[i] * x[i + 1];
  return x;
}

}  // namespace chemo1d
