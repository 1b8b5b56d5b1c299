#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "chemo1d/errors.hpp"

namespace chemo1d {

/// Uniform 1D mesh on [a,b] with num_nodes >= 2 nodes, spacing h = (b-a)/(num_nodes-1).
struct Mesh1D {
  double a = 0.0;
  double b = 1.0;
  int num_nodes = 2;
  double h = 1.0;

  static Mesh1D uniform(double a, double b, int num_nodes) {
    if (!(b > a)) throw Error("Mesh1D: requires b > a");
    if (num_nodes < 2) throw Error("Mesh1D: requires at least 2 nodes");
    return Mesh1D{a, b, num_nodes, (b - a) / (num_nodes - 1)};
  }

  int num_elements() const { return num_nodes - 1; }

  /// Node coordinate; exact at both endpoints.
  double node(int j) const {
    return std::lerp(a, b, static_cast<double>(j) / (num_nodes - 1));
  }

  /// Trapezoid (mass-lumping) weight of node j: h/2 at the two ends, h inside.
  double lumped_weight(int j) const {
    return (j == 0 || j == num_nodes - 1) ? 0.5 * h : h;
  }

  bool operator==(const Mesh1D&) const = default;
};

/// Piecewise-linear (P1) function given by its nodal values.
class NodalField {
 public:
  NodalField() = default;
  NodalField(Mesh1D mesh, std::vector<double> values)
      : mesh_(mesh), v_(std::move(values)) {
    if (static_cast<int>(v_.size()) != mesh_.num_nodes)
      throw Error("NodalField: value count does not match node count");
  }

  static NodalField zeros(const Mesh1D& mesh) {
    return NodalField(mesh, std::vector<double>(mesh.num_nodes, 0.0));
  }
  static NodalField constant(const Mesh1D& mesh, double c) {
    return NodalField(mesh, std::vector<double>(mesh.num_nodes, c));
  }

  const Mesh1D& mesh() const { return mesh_; }
  int size() const { return static_cast<int>(v_.size()); }
  double operator[](int j) const { return v_[j]; }
  double& operator[](int j) { return v_[j]; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

 private:
  Mesh1D mesh_;
  std::vector<double> v_;
};

/// Piecewise-constant function on the elements (one value per cell).
class CellField {
 public:
  CellField() = default;
  CellField(Mesh1D mesh, std::vector<double> values)
      : mesh_(mesh), v_(std::move(values)) {
    if (static_cast<int>(v_.size()) != mesh_.num_elements())
      throw Error("CellField: value count does not match element count");
  }

  static CellField zeros(const Mesh1D& mesh) {
    return CellField(mesh, std::vector<double>(mesh.num_elements(), 0.0));
  }

  const Mesh1D& mesh() const { return mesh_; }
  int size() const { return static_cast<int>(v_.size()); }
  double operator[](int j) const { return v_[j]; }
  double& operator[](int j) { return v_[j]; }
  const std::vector<double>& values() const { return v_; }

 private:
  Mesh1D mesh_;
  std::vector<double> v_;
};

inline void require_same_mesh(const Mesh1D& m1, const Mesh1D& m2,
                              const char* where) {
  if (!(m1 == m2)) throw Error(std::string(where) + ": mesh mismatch");
}

/// Nodal interpolant I_h(f).
template <class F>
NodalField interpolate(const Mesh1D& mesh, F&& f) {
  std::vector<double> v(mesh.num_nodes);
  for (int j = 0; j < mesh.num_nodes; ++j) v[j] = f(mesh.node(j));
  return NodalField(mesh, std::move(v));
}

/// Apply a pointwise map to the nodal values: I_h(f(u)).
template <class F>
NodalField map_nodal(const NodalField& u, F&& f) {
  std::vector<double> v(u.size());
  for (int j = 0; j < u.size(); ++j) v[j] = f(u[j]);
  return NodalField(u.mesh(), std::move(v));
}

/// Mass-lumped inner product (f,g)_h = sum_j w_j f_j g_j (trapezoid rule).
inline double lumped_inner(const NodalField& f, const NodalField& g) {
  require_same_mesh(f.mesh(), g.mesh(), "lumped_inner");
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) s += f.mesh().lumped_weight(j) * f[j] * g[j];
  return s;
}

/// Lumped integral of a nodal field: sum_j w_j f_j.
inline double lumped_integral(const NodalField& f) {
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) s += f.mesh().lumped_weight(j) * f[j];
  return s;
}

/// Cell-constant derivative of the P1 function.
inline CellField gradient(const NodalField& f) {
  const Mesh1D& m = f.mesh();
  std::vector<double> g(m.num_elements());
  for (int e = 0; e < m.num_elements(); ++e) g[e] = (f[e + 1] - f[e]) / m.h;
  return CellField(m, std::move(g));
}

/// L2 norm of the P1 function (consistent mass, exact per-element integral).
inline double l2_norm(const NodalField& f) {
  const double h = f.mesh().h;
  double s = 0.0;
  for (int e = 0; e < f.mesh().num_elements(); ++e) {
    const double fa = f[e], fb = f[e + 1];
    s += h / 3.0 * (fa * fa + fa * fb + fb * fb);
  }
  return std::sqrt(s);
}

/// Lumped L2 norm: sqrt((f,f)_h).
inline double lumped_norm(const NodalField& f) {
  return std::sqrt(lumped_inner(f, f));
}

/// L2 norm of a cell-constant function: sqrt(sum_e h g_e^2).
inline double cell_l2_norm(const CellField& g) {
  double s = 0.0;
  for (int e = 0; e < g.size(); ++e) s += g.mesh().h * g[e] * g[e];
  return std::sqrt(s);
}

/// H1 norm: sqrt(l2_norm^2 + cell_l2_norm(gradient)^2).
inline double h1_norm(const NodalField& f) {
  const double l2 = l2_norm(f);
  const double dg = cell_l2_norm(gradient(f));
  return std::sqrt(l2 * l2 + dg * dg);
}

inline double min_value(const NodalField& f) {
  return *std::min_element(f.values().begin(), f.values().end());
}

inline double max_value(const NodalField& f) {
  return *std::max_element(f.values().begin(), f.values().end());
}

inline bool all_finite(const NodalField& f) {
  for (int j = 0; j < f.size(); ++j)
    if (!std::isfinite(f[j])) return false;
  return true;
}

inline NodalField operator-(const NodalField& a, const NodalField& b) {
  require_same_mesh(a.mesh(), b.mesh(), "NodalField difference");
  std::vector<double> v(a.size());
  for (int j = 0; j < a.size(); ++j) v[j] = a[j] - b[j];
  return NodalField(a.mesh(), std::move(v));
}

/// Restriction to a nested coarse mesh (same interval, node stride an integer).
inline NodalField restrict_to(const NodalField& fine, const Mesh1D& coarse) {
  const Mesh1D& mf = fine.mesh();
  if (mf.a != coarse.a || mf.b != coarse.b)
    throw Error("restrict_to: meshes cover different intervals");
  const int nf = mf.num_elements(), nc = coarse.num_elements();
  if (nf % nc != 0)
    throw Error("restrict_to: fine mesh is not a refinement of the coarse mesh");
  const int stride = nf / nc;
  std::vector<double> v(coarse.num_nodes);
  for (int j = 0; j < coarse.num_nodes; ++j) v[j] = fine[j * stride];
  return NodalField(coarse, std::move(v));
}

/// Point evaluation of the P1 function; x is clamped to [a,b].
inline double eval(const NodalField& f, double x) {
  const Mesh1D& m = f.mesh();
  const double t = (x - m.a) / m.h;
  int e = static_cast<int>(std::floor(t));
  e = std::clamp(e, 0, m.num_elements() - 1);
  const double local = std::clamp(t - e, 0.0, 1.0);
  return f[e] * (1.0 - local) + f[e + 1] * local;
}

}  // namespace chemo1d
