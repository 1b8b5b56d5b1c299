#include "chemo1d/tridiag.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace chemo1d;

namespace {

// Dense Gaussian elimination with partial pivoting; reference solver for the
// Thomas algorithm.
std::vector<double> dense_solve(std::vector<std::vector<double>> A,
                                std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A[i][k]) > std::abs(A[p][k])) p = i;
    std::swap(A[k], A[p]);
    std::swap(b[k], b[p]);
    for (int i = k + 1; i < n; ++i) {
      const double f = A[i][k] / A[k][k];
      for (int j = k; j < n; ++j) A[i][j] -= f * A[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
    x[i] = s / A[i][i];
  }
  return x;
}

std::vector<std::vector<double>> to_dense(const TriDiag& T) {
  const int n = T.size();
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    A[i][i] = T.diag[i];
    if (i > 0) A[i][i - 1] = T.lower[i - 1];
    if (i + 1 < n) A[i][i + 1] = T.upper[i];
  }
  return A;
}

NodalField random_field(const Mesh1D& m, std::mt19937& gen, double lo = -2.0,
                        double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  NodalField f = NodalField::zeros(m);
  for (int j = 0; j < f.size(); ++j) f[j] = dist(gen);
  return f;
}

double quadratic_form(const TriDiag& A, const NodalField& x) {
  const std::vector<double> y = matvec(A, x.values());
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

TEST(Solve, MatchesDenseEliminationOnRandomSystems) {
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int n : {2, 3, 5, 17, 64}) {
    const Mesh1D m = Mesh1D::uniform(0.0, 1.0, n);
    for (int rep = 0; rep < 20; ++rep) {
      TriDiag T = TriDiag::zeros(m);
      for (int i = 0; i < n; ++i) T.diag[i] = 4.0 + dist(gen);
      for (int i = 0; i + 1 < n; ++i) {
        T.lower[i] = dist(gen);
        T.upper[i] = dist(gen);
      }
      std::vector<double> rhs(n);
      for (auto& r : rhs) r = dist(gen);
      const std::vector<double> x = solve(T, rhs);
      const std::vector<double> xd = dense_solve(to_dense(T), rhs);
      for (int i = 0; i < n; ++i) EXPECT_NEAR(x[i], xd[i], 1e-12);
    }
  }
}

TEST(Solve, ResidualPostconditionOnStiffSystems) {
  // systems shaped like the time-stepping matrices: huge mass/dt diagonal
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 101);
  const double dt = 1e-8;
  std::mt19937 gen(5);
  TriDiag A = assemble_stiffness(m);
  const TriDiag ML = assemble_lumped_mass(m);
  add_scaled(A, 1.0 / dt, ML);
  const NodalField f = random_field(m, gen, 0.5, 2.0);
  std::vector<double> rhs(f.size());
  for (int j = 0; j < f.size(); ++j) rhs[j] = ML.diag[j] * f[j] / dt;
  const std::vector<double> x = solve(A, rhs);
  const std::vector<double> Ax = matvec(A, x);
  double res = 0.0, xmax = 0.0, rmax = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    res = std::max(res, std::abs(Ax[i] - rhs[i]));
    xmax = std::max(xmax, std::abs(x[i]));
    rmax = std::max(rmax, std::abs(rhs[i]));
  }
  EXPECT_LE(res, 1e-10 * (norm_inf(A) * xmax + rmax));
}

TEST(Solve, SingularSystemThrows) {
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 2);
  TriDiag T = TriDiag::zeros(m);
  T.diag = {1.0, 1.0};
  T.lower = {1.0};
  T.upper = {1.0};
  EXPECT_THROW(solve(T, {1.0, 2.0}), SingularSystemError);

  TriDiag Z = TriDiag::zeros(m);
  Z.upper = {1.0};
  EXPECT_THROW(solve(Z, {1.0, 2.0}), SingularSystemError);
}

TEST(Solve, RhsSizeMismatchThrows) {
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 3);
  const TriDiag T = assemble_lumped_mass(m);
  EXPECT_THROW(solve(T, {1.0, 2.0}), Error);
}

TEST(Stiffness, FrozenEntries) {
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 5);
  const TriDiag K = assemble_stiffness(m);
  EXPECT_DOUBLE_EQ(K.diag[0], 4.0);
  EXPECT_DOUBLE_EQ(K.diag[1], 8.0);
  EXPECT_DOUBLE_EQ(K.diag[4], 4.0);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(K.lower[i], -4.0);
    EXPECT_DOUBLE_EQ(K.upper[i], -4.0);
  }
  for (double s : column_sums(K)) EXPECT_NEAR(s, 0.0, 1e-14);
}

TEST(Stiffness, QuadraticFormEqualsGradientNorm) {
  std::mt19937 gen(11);
  const Mesh1D m = Mesh1D::uniform(-1.0, 2.0, 33);
  const TriDiag K = assemble_stiffness(m);
  for (int rep = 0; rep < 10; ++rep) {
    const NodalField x = random_field(m, gen);
    const double g = cell_l2_norm(gradient(x));
    EXPECT_NEAR(quadratic_form(K, x), g * g, 1e-12 * std::max(1.0, g * g));
  }
}

TEST(Mass, ConsistentQuadraticFormEqualsL2Norm) {
  std::mt19937 gen(12);
  const Mesh1D m = Mesh1D::uniform(0.0, 1.5, 21);
  const TriDiag M = assemble_mass(m);
  for (int rep = 0; rep < 10; ++rep) {
    const NodalField x = random_field(m, gen);
    const double l2 = l2_norm(x);
    EXPECT_NEAR(quadratic_form(M, x), l2 * l2, 1e-13 * std::max(1.0, l2 * l2));
  }
}

TEST(Mass, LumpedQuadraticFormEqualsLumpedNorm) {
  std::mt19937 gen(13);
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 17);
  const TriDiag ML = assemble_lumped_mass(m);
  for (int rep = 0; rep < 10; ++rep) {
    const NodalField x = random_field(m, gen);
    const double ln = lumped_norm(x);
    EXPECT_NEAR(quadratic_form(ML, x), ln * ln, 1e-13 * std::max(1.0, ln * ln));
  }
  double total = 0.0;
  for (double d : ML.diag) total += d;
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Mass, LumpedWeightedDiagonal) {
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 3);
  const NodalField r(m, {2.0, 3.0, 4.0});
  const TriDiag R = assemble_lumped_weighted_mass(m, r);
  EXPECT_DOUBLE_EQ(R.diag[0], 0.25 * 2.0);
  EXPECT_DOUBLE_EQ(R.diag[1], 0.5 * 3.0);
  EXPECT_DOUBLE_EQ(R.diag[2], 0.25 * 4.0);
  EXPECT_DOUBLE_EQ(R.lower[0], 0.0);
  EXPECT_DOUBLE_EQ(R.upper[1], 0.0);
}

// Two-point Gauss is exact for cubics, so the weighted consistent mass must
// reproduce the quadrature of w(x) x(x)^2 exactly.
TEST(Mass, WeightedConsistentMatchesGaussQuadrature) {
  std::mt19937 gen(14);
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 13);
  const double gp = 0.5 / std::sqrt(3.0);
  for (int rep = 0; rep < 10; ++rep) {
    const NodalField w = random_field(m, gen, 0.1, 3.0);
    const NodalField x = random_field(m, gen);
    const TriDiag Mw = assemble_weighted_mass(m, w);
    double q = 0.0;
    for (int e = 0; e < m.num_elements(); ++e) {
      for (double t : {0.5 - gp, 0.5 + gp}) {
        const double wg = w[e] * (1.0 - t) + w[e + 1] * t;
        const double xg = x[e] * (1.0 - t) + x[e + 1] * t;
        q += 0.5 * m.h * wg * xg * xg;
      }
    }
    EXPECT_NEAR(quadratic_form(Mw, x), q, 1e-13 * std::max(1.0, std::abs(q)));
  }
}

TEST(Stiffness, WeightedQuadraticForm) {
  std::mt19937 gen(15);
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 9);
  std::uniform_real_distribution<double> wdist(0.1, 2.0);
  CellField w = CellField::zeros(m);
  for (int e = 0; e < w.size(); ++e) w[e] = wdist(gen);
  const TriDiag Kw = assemble_weighted_stiffness(m, w);
  const NodalField x = random_field(m, gen);
  const CellField g = gradient(x);
  double expected = 0.0;
  for (int e = 0; e < g.size(); ++e) expected += w[e] * m.h * g[e] * g[e];
  EXPECT_NEAR(quadratic_form(Kw, x), expected, 1e-13 * std::max(1.0, expected));
}

TEST(Convection, FrozenSmallCase) {
  // h = 1/2, v = {0, 1, 3}: slopes 2 and 4
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 3);
  const NodalField v(m, {0.0, 1.0, 3.0});
  const TriDiag C = assemble_convection(m, v);
  EXPECT_DOUBLE_EQ(C.diag[0], -1.0);
  EXPECT_DOUBLE_EQ(C.diag[1], -1.0);
  EXPECT_DOUBLE_EQ(C.diag[2], 2.0);
  EXPECT_DOUBLE_EQ(C.upper[0], -1.0);
  EXPECT_DOUBLE_EQ(C.upper[1], -2.0);
  EXPECT_DOUBLE_EQ(C.lower[0], 1.0);
  EXPECT_DOUBLE_EQ(C.lower[1], 2.0);
}

TEST(Convection, ColumnSumsVanish) {
  std::mt19937 gen(16);
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 41);
  for (int rep = 0; rep < 5; ++rep) {
    const NodalField v = random_field(m, gen, -3.0, 3.0);
    const TriDiag C = assemble_convection(m, v);
    for (double s : column_sums(C)) EXPECT_NEAR(s, 0.0, 1e-12);
  }
}

// w^T C u must equal the exact integral of u grad(v) grad(w): per element
// h * mean(u) * dv/h * dw/h.
TEST(Convection, BilinearFormMatchesExactIntegral) {
  std::mt19937 gen(17);
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 23);
  for (int rep = 0; rep < 10; ++rep) {
    const NodalField u = random_field(m, gen);
    const NodalField v = random_field(m, gen);
    const NodalField w = random_field(m, gen);
    const TriDiag C = assemble_convection(m, v);
    const std::vector<double> Cu = matvec(C, u.values());
    double lhs = 0.0;
    for (int i = 0; i < w.size(); ++i) lhs += w[i] * Cu[i];
    double rhs = 0.0;
    for (int e = 0; e < m.num_elements(); ++e) {
      const double umean = 0.5 * (u[e] + u[e + 1]);
      const double dv = v[e + 1] - v[e];
      const double dw = w[e + 1] - w[e];
      rhs += umean * dv * dw / m.h;
    }
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Dirichlet, RowReplacementPinsEndpoints) {
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 6);
  TriDiag A = assemble_stiffness(m);
  const TriDiag M = assemble_mass(m);
  add_scaled(A, 100.0, M);
  std::vector<double> rhs(6, 1.0);
  set_dirichlet_row(A, rhs, 0);
  set_dirichlet_row(A, rhs, 5);
  const std::vector<double> x = solve(A, rhs);
  EXPECT_DOUBLE_EQ(x[0], 0.0);
  EXPECT_DOUBLE_EQ(x[5], 0.0);
  for (int i = 1; i < 5; ++i) EXPECT_GT(x[i], 0.0);
}

TEST(Matrix, AddScaledAndNormInf) {
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 3);
  TriDiag A = assemble_lumped_mass(m);  // diag {0.25, 0.5, 0.25}
  const TriDiag K = assemble_stiffness(m);  // h = 1/2: diag {2,4,2}, off -2
  add_scaled(A, 0.5, K);
  EXPECT_DOUBLE_EQ(A.diag[0], 1.25);
  EXPECT_DOUBLE_EQ(A.diag[1], 2.5);
  EXPECT_DOUBLE_EQ(A.upper[0], -1.0);
  EXPECT_DOUBLE_EQ(norm_inf(A), 4.5);
}

TEST(Matrix, MatvecMatchesDense) {
  std::mt19937 gen(18);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 7);
  TriDiag T = TriDiag::zeros(m);
  for (int i = 0; i < 7; ++i) T.diag[i] = dist(gen);
  for (int i = 0; i < 6; ++i) {
    T.lower[i] = dist(gen);
    T.upper[i] = dist(gen);
  }
  std::vector<double> x(7);
  for (auto& v : x) v = dist(gen);
  const auto dense = to_dense(T);
  const std::vector<double> y = matvec(T, x);
  for (int i = 0; i < 7; ++i) {
    double s = 0.0;
    for (int j = 0; j < 7; ++j) s += dense[i][j] * x[j];
    EXPECT_NEAR(y[i], s, 1e-14);
  }
}

}  // namespace
