// Reference computations used by the tests.  None of them calls into the
// library's numerics: they are written from the formulas directly.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

// Adaptive Simpson on [a, b].
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                          double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * eps) return left + right + diff / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps = 1e-13,
                               int depth = 40) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson_rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, depth);
}

inline double kernel(double x, double d) {
  const double l = std::sqrt(d);
  return std::exp(-std::abs(x) / l) / (2.0 * l);
}

// Normalised bump on [-h, h].
struct Bump {
  double h = 1.0;
  double mass = 0.0;
  explicit Bump(double halfwidth) : h(halfwidth) {
    mass = adaptive_simpson([this](double y) { return raw(y); }, -h, h, 1e-15);
  }
  [[nodiscard]] double raw(double y) const {
    const double t = y / h;
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
  }
  [[nodiscard]] double operator()(double y) const { return raw(y) / mass; }
};

// phi = exp(-sigma |.|) * psi.  Outside the support of psi the integrand
// has a fixed sign of x - y, so phi(x) = exp(-sigma |x|) M with
// M = int exp(sigma y) psi(y) dy; inside, the integral is split at y = x.
struct Phi {
  double sigma;
  Bump psi;
  double moment = 0.0;
  Phi(double s, double halfwidth) : sigma(s), psi(halfwidth) {
    moment = adaptive_simpson([this](double y) { return std::exp(sigma * y) * psi(y); }, -psi.h, psi.h, 1e-15);
  }
  [[nodiscard]] double operator()(double x) const {
    if (std::abs(x) >= psi.h) return std::exp(-sigma * std::abs(x)) * moment;
    auto f = [this, x](double y) { return std::exp(-sigma * std::abs(x - y)) * psi(y); };
    return adaptive_simpson(f, -psi.h, x, 1e-15) + adaptive_simpson(f, x, psi.h, 1e-15);
  }
};

// Phi tabulated on [-h, h] with cubic Lagrange interpolation, exact
// formula outside.
struct PhiTable {
  const Phi* phi;
  double step;
  std::vector<double> vals;
  PhiTable(const Phi& p, double dx = 1e-3) : phi(&p), step(dx) {
    const auto m = static_cast<std::size_t>(std::ceil(2.0 * p.psi.h / dx)) + 7;
    vals.resize(m);
    for (std::size_t i = 0; i < m; ++i) vals[i] = p(-p.psi.h - 3.0 * dx + static_cast<double>(i) * dx);
  }
  [[nodiscard]] double operator()(double x) const {
    if (std::abs(x) >= phi->psi.h) return std::exp(-phi->sigma * std::abs(x)) * phi->moment;
    const double s = (x + phi->psi.h + 3.0 * step) / step;
    const auto i = static_cast<std::size_t>(std::floor(s)) - 1;
    const double t = s - static_cast<double>(i);
    const double* v = &vals[i];
    // Lagrange through nodes 0..3 at local coordinate t in [1, 2).
    const double l0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
    const double l1 = t * (t - 2) * (t - 3) / 2.0;
    const double l2 = -t * (t - 1) * (t - 3) / 2.0;
    const double l3 = t * (t - 1) * (t - 2) / 6.0;
    return l0 * v[0] + l1 * v[1] + l2 * v[2] + l3 * v[3];
  }
};

// Gauss-Legendre nodes and weights on [-1, 1] by Newton on P_m.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int m) {
  std::vector<double> x(m), w(m);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

// Brute-force uniformly local norm: the integrand is the piecewise-linear
// interpolant of |f_i|^p on [x0, x0 + (n-1) h] and constants outside;
// shifts on a lattice of spacing h / refine over the grid plus margins.
inline double ul_norm_bruteforce(const std::vector<double>& f, double x0, double h, double left, double right,
                                 double sigma, double p, double halfwidth, int refine = 10) {
  const Phi phi(sigma, halfwidth);
  const PhiTable tab(phi);
  const auto [gx, gw] = gauss_legendre(10);
  const std::size_t n = f.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::pow(std::abs(f[i]), p);
  const double gl = std::pow(std::abs(left), p), gr = std::pow(std::abs(right), p);
  const double x1 = x0 + static_cast<double>(n - 1) * h;
  const double reach = 60.0 / sigma;
  auto integral = [&](double s) {
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double a = x0 + static_cast<double>(j) * h;
      if (a + h < s - reach || a > s + reach) continue;
      for (std::size_t q = 0; q < gx.size(); ++q) {
        const double t = 0.5 * (gx[q] + 1.0);
        total += 0.5 * h * gw[q] * tab(a + t * h - s) * ((1.0 - t) * g[j] + t * g[j + 1]);
      }
    }
    // Tails: panels of width 0.25 out to the reach.
    auto tail = [&](double a, double b, double val) {
      if (val == 0.0) return 0.0;
      double acc = 0.0;
      const int panels = static_cast<int>(std::ceil((b - a) / 0.25));
      const double w = (b - a) / panels;
      for (int k = 0; k < panels; ++k)
        for (std::size_t q = 0; q < gx.size(); ++q) {
          const double y = a + w * (k + 0.5 * (gx[q] + 1.0));
          acc += 0.5 * w * gw[q] * tab(y - s);
        }
      return val * acc;
    };
    total += tail(std::min(x0, s - reach), x0, gl);
    total += tail(x1, std::max(x1, s + reach), gr);
    return total;
  };
  double best = 0.0;
  const double lo = x0 - 12.0 / sigma, hi = x1 + 12.0 / sigma;
  const double ds = h / refine;
  for (double s = lo; s <= hi + 1e-12; s += ds) best = std::max(best, integral(s));
  return std::pow(best, 1.0 / p);
}

// Independent explicit Fisher-KPP step (chi = 0) with mirrored ghosts.
inline std::vector<double> fkpp_step(const std::vector<double>& u, double h, double dt) {
  const std::size_t n = u.size();
  std::vector<double> out(n);
  const double h2 = h * h;
  for (std::size_t i = 0; i < n; ++i) {
    const double um = i == 0 ? u[1] : u[i - 1];
    const double up = i == n - 1 ? u[n - 2] : u[i + 1];
    const double lap = (up - 2.0 * u[i] + um) / h2;
    out[i] = u[i] + dt * (lap + u[i] * (1.0 - u[i]));
  }
  return out;
}

// Relaxation oracle for the chi = 0 slab problem
//   U'' + c U' + U (1 - U) = 0,  U(-a) = 1, U(a) = 0, U(0) = theta
// on n nodes with centred differences.  Newton on (U interior, c); the
// bordered tridiagonal system is eliminated by hand (two Thomas solves).
struct SlabOracleResult {
  double c = 0.0;
  bool converged = false;
  double residual = 0.0;
  double min_interior = 0.0;
  std::vector<double> U;
};

inline std::vector<double> thomas(std::vector<double> lo, std::vector<double> di, std::vector<double> up,
                                  std::vector<double> r) {
  const std::size_t n = di.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lo[i] / di[i - 1];
    di[i] -= m * up[i - 1];
    r[i] -= m * r[i - 1];
  }
  r[n - 1] /= di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) r[i] = (r[i] - up[i] * r[i + 1]) / di[i];
  return r;
}

inline SlabOracleResult relax_fkpp_slab(double a, double theta, std::size_t n) {
  const double h = 2.0 * a / static_cast<double>(n - 1);
  const std::size_t k = (n - 1) / 2;
  const std::size_t m = n - 2;  // interior unknowns, U_j at index j - 1
  std::vector<double> U(n);
  // Start from a logistic with the right value at 0.
  const double shift = std::log(1.0 / theta - 1.0);
  for (std::size_t i = 0; i < n; ++i) U[i] = 1.0 / (1.0 + std::exp(-a + i * h + shift));
  U[0] = 1.0;
  U[n - 1] = 0.0;
  double c = 2.0;
  auto defects = [&](const std::vector<double>& W, double cc) {
    std::vector<double> F(m);
    for (std::size_t i = 1; i + 1 < n; ++i)
      F[i - 1] = (W[i + 1] - 2.0 * W[i] + W[i - 1]) / (h * h) + cc * (W[i + 1] - W[i - 1]) / (2.0 * h) +
                 W[i] * (1.0 - W[i]);
    return F;
  };
  auto norm = [&](const std::vector<double>& F, const std::vector<double>& W) {
    double r = std::abs(W[k] - theta);
    for (double f : F) r = std::max(r, std::abs(f));
    return r;
  };
  SlabOracleResult out;
  for (int it = 0; it < 100; ++it) {
    const auto F = defects(U, c);
    const double nf = norm(F, U);
    out.residual = nf;
    if (nf < 1e-11) {
      out.converged = true;
      break;
    }
    std::vector<double> lo(m, 0.0), di(m), up(m, 0.0), b(m), rhs(m);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const std::size_t r = i - 1;
      if (r > 0) lo[r] = 1.0 / (h * h) - c / (2.0 * h);
      di[r] = -2.0 / (h * h) + 1.0 - 2.0 * U[i];
      if (r + 1 < m) up[r] = 1.0 / (h * h) + c / (2.0 * h);
      b[r] = (U[i + 1] - U[i - 1]) / (2.0 * h);
      rhs[r] = -F[r];
    }
    const auto y = thomas(lo, di, up, rhs);
    const auto z = thomas(lo, di, up, b);
    // Row for U_k: dU_k = theta - U_k, with dU = y - z dc.
    const double dc = (y[k - 1] - (theta - U[k])) / z[k - 1];
    double lam = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      std::vector<double> Ut = U;
      for (std::size_t j = 0; j < m; ++j) Ut[j + 1] += lam * (y[j] - z[j] * dc);
      const double ct = c + lam * dc;
      if (norm(defects(Ut, ct), Ut) < nf) {
        U = std::move(Ut);
        c = ct;
        break;
      }
      lam *= 0.5;
    }
  }
  out.c = c;
  out.min_interior = *std::min_element(U.begin() + 1, U.end() - 1);
  out.U = U;
  return out;
}

inline std::vector<double> random_field(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Dense scan plus golden-section maximisation of a unimodal-near-peak f.
inline std::pair<double, double> maximise(const std::function<double(double)>& f, double lo, double hi, int scan = 20001) {
  double best_x = lo, best = f(lo);
  for (int i = 1; i < scan; ++i) {
    const double x = lo + (hi - lo) * i / (scan - 1);
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  double a = best_x - (hi - lo) / (scan - 1), b = best_x + (hi - lo) / (scan - 1);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double x1 = b - g * (b - a), x2 = a + g * (b - a);
    if (f(x1) > f(x2))
      b = x2;
    else
      a = x1;
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace oracle
