#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ksfkpp/elliptic.hpp"
#include "oracles.hpp"

using namespace ksfkpp;

TEST(SolveV, ConstantExact) {
  const Field u(grid_make(0, 10, 101), 1.0);
  for (double x : solve_v(u, 2.0).values) EXPECT_NEAR(x, 1.0, 1e-14);
}

TEST(SolveV, CosineEigenfunction) {
  const double L = 10, d = 1.5;
  for (std::size_t n : {101u, 201u, 401u}) {
    const auto g = grid_make(0, L, n);
    const Field u = Field::sample(g, [&](double x) { return std::cos(std::numbers::pi * x / L); });
    const Field v = solve_v(u, d);
    const double f = 1 / (1 + d * std::numbers::pi * std::numbers::pi / (L * L));
    double err = 0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(v[i] - f * u[i]));
    EXPECT_LT(err, 0.05 * g.dx() * g.dx()) << n;
  }
}

TEST(SolveV, Rejects) {
  const Field u(grid_make(0, 1, 11), 1.0);
  EXPECT_THROW(solve_v(u, 0.0), std::invalid_argument);
  EXPECT_THROW(solve_v(u, 1.0, EllipticBC::dirichlet(NAN, 0)), std::invalid_argument);
}

TEST(SolveV, Dirichlet) {
  const auto g = grid_make(-5, 5, 101);
  const Field u(g, 0.0);
  const Field v = solve_v(u, 1.0, EllipticBC::dirichlet(1.0, 2.0));
  EXPECT_EQ(v[0], 1.0);
  EXPECT_EQ(v[g.n() - 1], 2.0);
  EXPECT_LT(residual_elliptic(u, v, 1.0), 1e-10);
}

TEST(SolveV, MaxPrincipleAndLinearity) {
  std::mt19937_64 rng(21);
  const auto g = grid_make(0, 8, 81);
  for (int rep = 0; rep < 20; ++rep) {
    const double d = 0.25 + 0.2 * rep;
    const Field a(g, oracle::random_field(rng, g.n(), -2, 3));
    const Field b(g, oracle::random_field(rng, g.n(), -2, 3));
    const Field va = solve_v(a, d), vb = solve_v(b, d);
    for (std::size_t i = 0; i < g.n(); ++i) {
      EXPECT_GE(va[i], a.min() - 1e-12);
      EXPECT_LE(va[i], a.max() + 1e-12);
    }
    Field c(g);
    for (std::size_t i = 0; i < g.n(); ++i) c[i] = 2.5 * a[i] - 0.5 * b[i];
    const Field vc = solve_v(c, d);
    for (std::size_t i = 0; i < g.n(); ++i) EXPECT_NEAR(vc[i], 2.5 * va[i] - 0.5 * vb[i], 1e-12);
  }
}

TEST(Residual, Examples) {
  const auto g = grid_make(0, 4, 41);
  const Field u = Field::sample(g, [](double x) { return std::exp(-x * x); });
  EXPECT_LT(residual_elliptic(u, solve_v(u, 1.0), 1.0), 1e-10);
  EXPECT_NEAR(residual_elliptic(Field(g, 1.0), Field(g, 0.0), 1.0), 1.0, 1e-15);
  EXPECT_THROW(residual_elliptic(u, Field(grid_make(0, 4, 21)), 1.0), std::invalid_argument);
}

TEST(Residual, ConvolutionTruncationOrder) {
  std::vector<double> r;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto g = Grid1D::with_spacing(-20, 20, h);
    const Field u = Field::sample(g, [](double x) { return std::exp(-x * x / 4); });
    r.push_back(residual_elliptic(u, convolve_kd(u, 1.0, {0, 0}), 1.0));
  }
  EXPECT_NEAR(std::log2(r[0] / r[1]), 2.0, 0.2);
  EXPECT_NEAR(std::log2(r[1] / r[2]), 2.0, 0.2);
}

TEST(CrossCheck, SecondOrder) {
  std::vector<double> e;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto g = Grid1D::with_spacing(-20, 20, h);
    const Field u = Field::sample(g, [](double x) { return std::exp(-x * x); });
    e.push_back(elliptic_kernel_discrepancy(u, 1.0));
  }
  const double r1 = std::log2(e[0] / e[1]), r2 = std::log2(e[1] / e[2]);
  EXPECT_GE(r1, 1.8);
  EXPECT_LE(r1, 2.2);
  EXPECT_GE(r2, 1.8);
  EXPECT_LE(r2, 2.2);
}

TEST(GradientBound, NonnegativeData) {
  std::mt19937_64 rng(2);
  for (double d : {0.5, 1.0, 2.0}) {
    const auto g = Grid1D::with_spacing(0, 30, 0.05);
    std::uniform_real_distribution<double> amp(0, 1), pos(5, 25);
    const double a1 = amp(rng), a2 = amp(rng), p1 = pos(rng), p2 = pos(rng);
    const Field u = Field::sample(g, [&](double x) {
      return a1 * std::exp(-(x - p1) * (x - p1)) + a2 / (1 + std::exp(3 * (x - p2)));
    });
    const Field v = solve_v(u, d);
    const Field dv = derivative_central(v);
    const double h = g.dx();
    for (std::size_t i = 0; i < g.n(); ++i) EXPECT_LE(std::abs(dv[i]), v[i] / std::sqrt(d) + 20 * h * h) << i;
  }
}
