#include "chemo1d/diagnostics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chemo1d/runner.hpp"

using namespace chemo1d;

namespace {

Mesh1D mesh3() { return Mesh1D::uniform(0.0, 1.0, 3); }

TEST(GradL2, FrozenHandValue) {
  const NodalField f(mesh3(), {1.0, 2.0, 1.0});  // grads {2,-2}
  EXPECT_DOUBLE_EQ(grad_l2_sq(f), 4.0);
}

TEST(EnergyUv, FrozenHandValue) {
  // (mu/4) sum w F(u) with F(1)=0, F(e)=1 gives 0.5; sqrt(v)={1,2,1} gives
  // gradient energy 4 weighted by chi/2 = 1.
  const NodalField u(mesh3(), {1.0, std::exp(1.0), 1.0});
  const NodalField v(mesh3(), {1.0, 4.0, 1.0});
  const EnergyUV e = energy_uv(u, v, PhysicalParams{2.0, 4.0});
  EXPECT_NEAR(e.value, 4.5, 1e-14);
  EXPECT_EQ(e.floor_events, 0);
}

TEST(EnergyUv, FloorsNonpositiveEntries) {
  const NodalField u(mesh3(), {0.0, std::exp(1.0), 1.0});
  const NodalField v(mesh3(), {1.0, 4.0, 1.0});
  const EnergyUV e = energy_uv(u, v, PhysicalParams{2.0, 4.0});
  EXPECT_NEAR(e.value, 4.7499999999928422447, 1e-13);
  EXPECT_EQ(e.floor_events, 1);
}

TEST(EnergyUsigma, FrozenHandValue) {
  // F_eps(1) = 0 in the middle branch, so only the sigma term survives:
  // (chi/2) * consistent-l2({0,3,0})^2 = 1 * 3.
  const NodalField u = NodalField::constant(mesh3(), 1.0);
  const NodalField s(mesh3(), {0.0, 3.0, 0.0});
  EXPECT_NEAR(energy_usigma(u, s, PhysicalParams{2.0, 4.0}, 0.01), 3.0, 1e-14);
}

TEST(DissipationD1, FrozenHandValue) {
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 2);
  const NodalField u(m, {1.0, 2.0});
  EXPECT_NEAR(dissipation_d1(u, 0.01), 0.25 * std::log(2.0), 1e-15);
}

TEST(DissipationD1, NonnegativeOnRandomData) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> ud(-5.0, 500.0);
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 33);
  for (int rep = 0; rep < 200; ++rep) {
    NodalField u = NodalField::zeros(m);
    for (int j = 0; j < m.num_nodes; ++j) u[j] = ud(gen);
    EXPECT_GE(dissipation_d1(u, 0.01), 0.0);
  }
}

TEST(DissipationD2, FrozenGaussValue) {
  const NodalField v(mesh3(), {1.0, 4.0, 1.0});
  const NodalField s(mesh3(), {0.0, 3.0, 0.0});
  EXPECT_NEAR(dissipation_d2(v, s, 1e-300), 37.568181818181818182, 1e-13);
}

TEST(DissipationD2, FloorsNonpositiveV) {
  // a zero v node must be lifted to the floor rather than divide by zero
  const NodalField v(mesh3(), {0.0, 4.0, 1.0});
  const NodalField s(mesh3(), {0.0, 3.0, 0.0});
  const double d = dissipation_d2(v, s, 0.5);
  EXPECT_TRUE(std::isfinite(d));
  // flooring at 0.5 makes v smaller than {1,4,1} on element 0, so the
  // quartic term can only grow
  EXPECT_GT(d, 37.568181818181818182 - 1e-12);
}

TEST(DissipationD3, ExactForConstantU) {
  const NodalField u = NodalField::constant(mesh3(), 2.0);
  const NodalField s(mesh3(), {0.0, 3.0, 0.0});
  EXPECT_NEAR(dissipation_d3(u, s), 3.0, 1e-14);
  // negative u contributes nothing after the positive part
  const NodalField un = NodalField::constant(mesh3(), -2.0);
  EXPECT_DOUBLE_EQ(dissipation_d3(un, s), 0.0);
}

TEST(TolEnergy, Formula) {
  EXPECT_DOUBLE_EQ(tol_energy(1e-8, 0.0), 1e-7);
  EXPECT_DOUBLE_EQ(tol_energy(1e-8, -4.0), 5e-7);
}

TEST(LumpedGEnergy, FrozenHandValue) {
  const NodalField u(mesh3(), {1.0, 1.5, 1.0});
  EXPECT_NEAR(lumped_g_energy(u, 0.01), 99.797267445945917809, 1e-12);
}

TEST(EnergyResidualUvnd, FrozenHandValue) {
  const NodalField pu(mesh3(), {1.0, 2.0, 1.0});
  const NodalField nu(mesh3(), {1.0, 1.5, 1.0});
  const NodalField nv(mesh3(), {1.0, 2.0, 1.0});
  SolverParams sp;
  sp.dt = 0.1;
  sp.eps = 0.01;
  const double r =
      energy_residual_uvnd(pu, nu, nv, PhysicalParams{3.0, 1.0}, sp, 0.1);
  EXPECT_NEAR(r, -16.214367415518873930, 1e-12);
}

TEST(EnergyResidualUvns, FrozenHandValue) {
  const NodalField pu(mesh3(), {1.0, 2.0, 1.0});
  const NodalField nu(mesh3(), {1.0, 1.5, 1.0});
  const NodalField nv(mesh3(), {1.0, 2.0, 1.0});
  SolverParams sp;
  sp.dt = 0.1;
  sp.eps = 0.01;
  const double r =
      energy_residual_uvns(pu, nu, nv, PhysicalParams{3.0, 1.0}, sp, 0.1);
  EXPECT_NEAR(r, -16.228256304407763214, 1e-12);
}

TEST(EnergyResidualUvs, MatchesComponentCombination) {
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 9);
  const PhysicalParams pp{2.5, 7.0};
  SolverParams sp;
  sp.dt = 0.01;
  sp.eps = 0.02;
  SchemeState prev{interpolate(m, [](double x) { return 1.0 + x; }),
                   interpolate(m, [](double x) { return 2.0 - x * x; }),
                   NodalField(m, {0.0, 1.0, -1.0, 2.0, 0.5, -0.5, 1.5, 0.25, 0.0}),
                   0.0, 0};
  SchemeState next{interpolate(m, [](double x) { return 1.2 + 0.5 * x; }),
                   interpolate(m, [](double x) { return 1.8 - 0.5 * x * x; }),
                   NodalField(m, {0.0, 0.5, -0.75, 1.5, 0.25, -0.25, 1.0, 0.1, 0.0}),
                   0.01, 1};
  const double expected =
      (energy_usigma(next.u, *next.sigma, pp, sp.eps) -
       energy_usigma(prev.u, *prev.sigma, pp, sp.eps)) /
          sp.dt +
      pp.mu * dissipation_d1(next.u, sp.eps) +
      pp.chi * dissipation_d2(prev.v, *next.sigma, sp.v_floor) +
      pp.mu * pp.chi * dissipation_d3(next.u, *next.sigma);
  EXPECT_DOUBLE_EQ(energy_residual_uvs(prev, next, pp, sp, sp.dt), expected);
}

TEST(CarryTo, NestedMeshUsesExactRestriction) {
  const Mesh1D mf = Mesh1D::uniform(0.0, 1.0, 9);
  const Mesh1D mc = Mesh1D::uniform(0.0, 1.0, 5);
  const NodalField f = interpolate(mf, [](double x) { return std::sin(3 * x); });
  const NodalField c = carry_to(f, mc);
  for (int j = 0; j < mc.num_nodes; ++j)
    EXPECT_DOUBLE_EQ(c[j], f[2 * j]);  // stride-2 nodal pickup, no smoothing
}

TEST(CarryTo, NonNestedMeshEvaluatesP1Interpolant) {
  const Mesh1D mf = Mesh1D::uniform(0.0, 1.0, 7);   // 6 elements
  const Mesh1D mc = Mesh1D::uniform(0.0, 1.0, 5);   // 4 elements: not nested
  // a linear function is reproduced exactly by P1 evaluation
  const NodalField f = interpolate(mf, [](double x) { return 2 * x + 1; });
  const NodalField c = carry_to(f, mc);
  for (int j = 0; j < mc.num_nodes; ++j)
    EXPECT_NEAR(c[j], 2 * mc.node(j) + 1, 1e-15);
}

TEST(SolutionErrors, ConstantOffsetsAndGradientMismatch) {
  const Mesh1D mf = Mesh1D::uniform(0.0, 1.0, 9);
  const Mesh1D mc = Mesh1D::uniform(0.0, 1.0, 5);
  SchemeState ref{interpolate(mf, [](double x) { return x; }),
                  interpolate(mf, [](double x) { return 2 * x; }),
                  std::nullopt, 1.0, 10};
  SchemeState approx{interpolate(mc, [](double x) { return x + 0.5; }),
                     interpolate(mc, [](double x) { return 3 * x + 0.25; }),
                     std::nullopt, 1.0, 10};
  const SolutionErrors e = solution_errors(ref, approx);
  EXPECT_NEAR(e.e_u, 0.5, 1e-14);   // constant offset, consistent L2
  // v difference is -x - 1/4: ||.||_{L2}^2 = int (x+1/4)^2 = 31/48
  EXPECT_NEAR(e.e_v, std::sqrt(31.0 / 48.0), 1e-14);
  EXPECT_NEAR(e.e_vx, 1.0, 1e-14);  // gradients differ by 1 everywhere
}

TEST(EocRate, ExactSecondOrder) {
  EXPECT_DOUBLE_EQ(eoc_rate(0.04, 0.01, 0.1, 0.05), 2.0);
  EXPECT_DOUBLE_EQ(eoc_rate(0.1, 0.05, 0.1, 0.05), 1.0);
}

// On a short run the certified per-step law must hold with the stated
// tolerance; this exercises the residual plumbing end to end.
TEST(EnergyLaw, UvndShortRunSatisfiesCertifiedBound) {
  const Mesh1D m = Mesh1D::uniform(0.0, 1.0, 101);
  const PhysicalParams pp{100.0, 1.0};
  const NodalField u0 = interpolate(m, [](double x) {
    const double r = (x - 0.5) / 0.1;
    return 1.1 - std::exp(-r * r);
  });
  const NodalField v0 = interpolate(m, [](double x) {
    const double r = (x - 0.5) / 0.01;
    return 2.0 - std::exp(-r * r);
  });
  SolverParams sp;
  sp.dt = 1e-8;
  sp.eps = m.h * m.h;
  int checked = 0;
  const RunLedger led = run(
      SchemeId::uv_nd, make_initial_state(SchemeId::uv_nd, u0, v0), pp, sp,
      50e-8, [&](const SchemeState& prev, const SchemeState& next,
                 const StepReport&) {
        const double r =
            energy_residual_uvnd(prev.u, next.u, next.v, pp, sp, sp.dt);
        const double scale = lumped_g_energy(next.u, sp.eps);
        ASSERT_TRUE(std::isfinite(r));
        EXPECT_LE(r, tol_energy(sp.c_tol, scale));
        ++checked;
      });
  ASSERT_FALSE(led.failed) << led.failure_reason;
  EXPECT_EQ(checked, 50);
  // the ledger column carries the same residual values
  ASSERT_TRUE(std::isfinite(led.records.back().energy_residual));
}

}  // namespace
