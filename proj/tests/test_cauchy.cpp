#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "ksfkpp/cauchy.hpp"
#include "oracles.hpp"

using namespace ksfkpp;

TEST(Initial, Plateau) {
  const auto g = grid_make(0, 120, 601);
  const Field u = initial_gaussian_plateau(g);
  EXPECT_EQ(u[g.nearest(5)], 1.0);
  EXPECT_EQ(u[g.nearest(10)], 1.0);
  EXPECT_NEAR(u[g.nearest(15)], std::exp(-10.0), 1e-15);
  EXPECT_NEAR(u[g.nearest(15)], 4.54e-5, 1e-7);
  EXPECT_THROW(initial_gaussian_plateau(grid_make(20, 30, 11)), std::invalid_argument);
}

TEST(Step, ZeroAndOneAreFixed) {
  const auto g = grid_make(0, 20, 101);
  const double dt = g.dx() * g.dx() / 10;
  for (double c : {0.0, 1.0}) {
    CauchyState s = make_state(Field(g, c), {3.0, 1.0});
    for (int k = 0; k < 50; ++k) s = step(s, {3.0, 1.0}, dt);
    for (std::size_t i = 0; i < g.n(); ++i) {
      EXPECT_EQ(s.u[i], c);
      EXPECT_EQ(s.v[i], c);
    }
  }
}

TEST(Step, RejectsLargeDt) {
  const auto g = grid_make(0, 20, 101);
  const CauchyState s = make_state(Field(g, 0.5), {1.0, 1.0});
  EXPECT_THROW(step(s, {1.0, 1.0}, 0.6 * g.dx() * g.dx()), std::invalid_argument);
  EXPECT_THROW(step(s, {1.0, 1.0}, 0.0), std::invalid_argument);
}

TEST(Step, FisherKppBitwise) {
  const auto g = grid_make(0, 40, 201);
  const double dt = g.dx() * g.dx() / 10;
  InitialCondition ic;
  ic.kind = InitialCondition::Kind::heaviside;
  ic.center = 12;
  CauchyState s = make_state(ic.build(g), {0.0, 1.0});
  std::vector<double> ref = s.u.values;
  Stepper st({0.0, 1.0}, g, dt);
  for (int k = 1; k <= 500; ++k) {
    st.advance(s, k * dt);
    ref = oracle::fkpp_step(ref, g.dx(), dt);
  }
  EXPECT_EQ(std::memcmp(ref.data(), s.u.values.data(), ref.size() * sizeof(double)), 0);
}

TEST(Step, StateKeepsEllipticInvariant) {
  const auto g = grid_make(0, 30, 151);
  CauchyState s = make_state(initial_gaussian_plateau(g), {2.0, 1.0});
  for (int k = 0; k < 20; ++k) s = step(s, {2.0, 1.0}, g.dx() * g.dx() / 10);
  EXPECT_LT(residual_elliptic(s.u, s.v, 1.0), 1e-10);
}

TEST(Step, MassConservedWithoutReactionAndAdvection) {
  const auto g = grid_make(0, 10, 101);
  const Field u = Field::sample(g, [](double x) { return std::exp(-(x - 4) * (x - 4)) + 0.1; });
  CauchyState s = make_state(u, {1.0, 1.0});
  Stepper st({1.0, 1.0}, g, g.dx() * g.dx() / 10, {false, false});
  double m0 = trapezoid(s.u).value;
  for (int k = 1; k <= 200; ++k) {
    st.advance(s, k * 0.001);
    const double m = trapezoid(s.u).value;
    EXPECT_NEAR(m, m0, 1e-10);
    m0 = m;
  }
}

TEST(Step, AdvectionOnlyConservesMass) {
  // Conservative face fluxes: without reaction the mass drift is only the
  // Neumann boundary flux, which vanishes when u is flat at the walls.
  const auto g = grid_make(0, 30, 151);
  const Field u = Field::sample(g, [](double x) { return std::exp(-(x - 15) * (x - 15) / 4); });
  CauchyState s = make_state(u, {4.0, 1.0});
  Stepper st({4.0, 1.0}, g, g.dx() * g.dx() / 10, {true, false});
  const double m0 = trapezoid(s.u).value;
  for (int k = 1; k <= 500; ++k) st.advance(s, k * 0.001);
  EXPECT_NEAR(trapezoid(s.u).value, m0, 1e-9);
}

TEST(Step, PositivityProperty) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> chi_d(-5, 5), d_d(0.25, 4);
  for (int rep = 0; rep < 25; ++rep) {
    const double chi = chi_d(rng), d = d_d(rng);
    const auto g = grid_make(0, 20, 81);
    const Field u0(g, oracle::random_field(rng, g.n(), 0, 1.5));
    CauchyState s = make_state(u0, {chi, d});
    Stepper st({chi, d}, g, g.dx() * g.dx() / 10);
    for (int k = 1; k <= 400; ++k) {
      st.advance(s, k * g.dx() * g.dx() / 10);
      ASSERT_GE(s.u.min(), 0.0) << "chi=" << chi << " d=" << d << " step " << k;
    }
  }
}

TEST(Step, BlowUpDetected) {
  const auto g = grid_make(0, 1, 11);
  Field u(g, 0.5);
  u[5] = INFINITY;
  CauchyState s{0.0, u, Field(g, 0.5)};
  Stepper st({1.0, 1.0}, g, 1e-4);
  try {
    st.advance(s, 1e-4);
    FAIL() << "expected BlowUpError";
  } catch (const BlowUpError& e) {
    EXPECT_EQ(e.t(), 1e-4);
    EXPECT_GE(e.node(), 4u);
    EXPECT_LE(e.node(), 6u);
  }
}

TEST(RunConfig, Validation) {
  RunConfig c = RunConfig::fig1(1.0);
  EXPECT_NO_THROW(c.validate());
  EXPECT_NEAR(c.dt, 0.004, 1e-15);
  EXPECT_EQ(c.grid.n(), 601u);
  c.dt = 0.03;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RunConfig::fig1(1.0);
  c.snapshot_times = {20, 10};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.snapshot_times = {40};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Run, ZeroHorizon) {
  RunConfig c = RunConfig::fig1(1.0);
  c.t_max = 0;
  c.snapshot_times = {0};
  const auto r = run(c);
  ASSERT_EQ(r.snapshots.size(), 1u);
  EXPECT_EQ(r.snapshots[0].t, 0.0);
  EXPECT_EQ(r.snapshots[0].u.values, initial_gaussian_plateau(c.grid).values);
}

TEST(Run, SnapshotMatching) {
  RunConfig c = RunConfig::fig1(1.0);
  c.t_max = 1.0;
  c.dt = 0.003;
  c.snapshot_times = {0.0, 0.5, 1.0};
  const auto r = run(c);
  ASSERT_EQ(r.snapshots.size(), 3u);
  EXPECT_EQ(r.snapshots[0].t, 0.0);
  EXPECT_NEAR(r.snapshots[1].t, 0.501, 1e-12);  // first step with t >= 0.5
  EXPECT_NEAR(r.snapshots[2].t, 1.002, 1e-12);
  for (std::size_t i = 1; i < r.snapshots.size(); ++i) EXPECT_GT(r.snapshots[i].t, r.snapshots[i - 1].t);
  EXPECT_EQ(r.fronts.size(), 3u);
}

TEST(Run, BoundaryWarning) {
  RunConfig c = RunConfig::fig1(1.0);
  c.grid = Grid1D::with_spacing(0, 40, 0.2);
  c.t_max = 10;
  c.snapshot_times = {10};
  const auto r = run(c);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_TRUE(run(RunConfig::fig1(1.0 + 0 * c.t_max)).warnings.empty());
}

TEST(Run, SmallChiBounded) {
  const RunConfig c = RunConfig::fig1(1.0);
  const auto r = run(c);
  for (const auto& s : r.snapshots) {
    EXPECT_GE(s.u.min(), 0.0);
    EXPECT_LE(s.u.max(), 1.05);
  }
  const auto sp = measure_speed(r, c);
  EXPECT_NEAR(sp.speed, 1.90, 0.05);
}

TEST(Run, LargeChiOscillatesBehindFront) {
  const RunConfig c = RunConfig::fig1(5.0);
  const auto r = run(c);
  const auto& last = r.snapshots.back();
  const auto xf = front_position(last.u, 0.5);
  ASSERT_TRUE(xf.has_value());
  // Behind the front u deviates visibly from 1.
  double dev = 0;
  for (std::size_t i = 0; i < c.grid.n(); ++i)
    if (c.grid.x(i) > *xf - 30 && c.grid.x(i) < *xf - 5) dev = std::max(dev, std::abs(last.u[i] - 1));
  EXPECT_GT(dev, 0.1);
}
