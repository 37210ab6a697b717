// Traveling waves on a finite slab [-a, a]:
//   -c U' + tau chi (U V')' = U'' + U_+ (1 - U),  U(-a) = 1, U(a) = 0,
//   max_{x >= 0} U = theta,  V = K_d * U~,
// where U~ extends U by 1 on the left and 0 on the right.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "core.hpp"
#include "kernel.hpp"
#include "tridiagonal.hpp"

namespace ksfkpp {

class SlabConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SlabSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SlabConfig {
  Params params;
  double a = 40.0;
  double theta = 0.1;
  double tau = 1.0;
  std::size_t grid_n = 801;
  double damping = 0.5;
  std::size_t max_iters = 200;
  double tol = 1e-8;

  void validate() const {
    try {
      params.validate();
    } catch (const std::invalid_argument& e) {
      throw SlabConfigError(e.what());
    }
    if (!(theta > 0.0 && theta < 0.25)) throw SlabConfigError("SlabConfig: theta must lie in (0, 1/4)");
    if (!(a > std::log(1.0 / theta))) throw SlabConfigError("SlabConfig: need a > ln(1/theta)");
    if (!(tau >= 0.0 && tau <= 1.0)) throw SlabConfigError("SlabConfig: tau must lie in [0, 1]");
    if (grid_n < 5 || grid_n % 2 == 0) throw SlabConfigError("SlabConfig: grid_n must be odd and >= 5");
    if (!(damping > 0.0 && damping <= 1.0)) throw SlabConfigError("SlabConfig: damping must lie in (0, 1]");
    if (!(tol > 0.0)) throw SlabConfigError("SlabConfig: tol must be > 0");
  }

  [[nodiscard]] Grid1D grid() const { return Grid1D::make(-a, a, grid_n); }
  /// Index of x = 0; the nodes i >= mid() carry the normalisation.
  [[nodiscard]] std::size_t mid() const { return (grid_n - 1) / 2; }
};

/// U restricted to [-a, a] together with the (1, 0) extension used for V.
struct ExtendedProfile {
  Field U;
  ExtensionPolicy ext{1.0, 0.0};

  [[nodiscard]] double operator()(double x) const {
    if (x <= U.grid.x_min()) return ext.left;
    if (x >= U.grid.x(U.grid.n() - 1)) return ext.right;
    return U.interpolate(x);
  }
};

inline ExtendedProfile extended_profile(const Field& U) { return {U, {1.0, 0.0}}; }

/// Signal quantities derived from U on the slab: V, V' exactly from the
/// kernel and V'' = (V - U)/d.
struct SlabSignal {
  Field V, dV, d2V;
};

inline SlabSignal slab_signal(const Field& U, double d) {
  const ExtendedProfile ext = extended_profile(U);
  KernelConvolution kc = convolve_kd_with_derivative(ext.U, d, ext.ext);
  Field d2(U.grid);
  for (std::size_t i = 0; i < U.size(); ++i) d2[i] = (kc.v[i] - U[i]) / d;
  return {std::move(kc.v), std::move(kc.dv), std::move(d2)};
}

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

struct SlabSolution {
  double c = 0.0;
  Field U;
  Field V;
  double residual = 0.0;
  std::size_t iterations = 0;          // fixed-point plus Newton iterations
  std::size_t newton_iterations = 0;
  std::size_t fixed_point_iterations = 0;
  bool converged = false;
  bool positive = false;
  double min_interior = 0.0;
  std::string status;
  BoundReport diagnostics;
};

namespace detail {

/// Defect of the slab equation at interior node i.
inline double slab_row(const SlabConfig& cfg, double c, const Field& U, const SlabSignal& s, std::size_t i) {
  const double h = U.grid.dx();
  const double chi = cfg.tau * cfg.params.chi;
  const double d1 = (U[i + 1] - U[i - 1]) / (2.0 * h);
  const double d2 = (U[i + 1] - 2.0 * U[i] + U[i - 1]) / (h * h);
  const double up = std::max(U[i], 0.0);
  return -c * d1 + chi * (d1 * s.dV[i] + U[i] * s.d2V[i]) - d2 - up * (1.0 - U[i]);
}

inline std::size_t argmax_right(const Field& U, std::size_t mid) {
  std::size_t k = mid;
  for (std::size_t i = mid; i < U.size(); ++i)
    if (U[i] > U[k]) k = i;
  return k;
}

}  // namespace detail

/// Interior equation defects (size n - 2).
inline std::vector<double> slab_equation_defects(double c, const Field& U, const SlabConfig& cfg) {
  const SlabSignal s = slab_signal(U, cfg.params.d);
  std::vector<double> r(U.size() - 2);
  for (std::size_t i = 1; i + 1 < U.size(); ++i) r[i - 1] = detail::slab_row(cfg, c, U, s, i);
  return r;
}

/// Max of the interior equation defects, the boundary defects and the
/// normalisation defect.
inline double residual_slab(double c, const Field& U, const SlabConfig& cfg) {
  double r = 0.0;
  for (double v : slab_equation_defects(c, U, cfg)) r = std::max(r, std::abs(v));
  r = std::max(r, std::abs(U[0] - 1.0));
  r = std::max(r, std::abs(U[U.size() - 1]));
  r = std::max(r, std::abs(U[detail::argmax_right(U, cfg.mid())] - cfg.theta));
  return r;
}

inline double residual_slab(const SlabSolution& sol, const SlabConfig& cfg) { return residual_slab(sol.c, sol.U, cfg); }

/// Solves the frozen-coefficient problem
///   -c W' + tau chi (W V')' = W'' + U (1 - U),  W(-a) = 1, W(a) = 0,
/// with V = K_d * U~ from the input U.  Centred differences, one
/// tridiagonal solve with partial pivoting.  `source` scales U (1 - U);
/// source = 0 with tau = 0 is the explicitly solvable reduced problem.
inline Field linear_solve_ubar(double c, const Field& U, const SlabConfig& cfg, double source = 1.0) {
  const std::size_t n = U.size();
  const double h = U.grid.dx();
  const double chi = cfg.tau * cfg.params.chi;
  const SlabSignal s = slab_signal(U, cfg.params.d);
  detail::Tridiagonal m(n);
  std::vector<double> rhs(n, 0.0);
  m.diag[0] = 1.0;
  rhs[0] = 1.0;
  m.diag[n - 1] = 1.0;
  rhs[n - 1] = 0.0;
  double scale = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double drift = (-c + chi * s.dV[i]) / (2.0 * h);
    m.lower[i] = -drift - 1.0 / (h * h);
    m.diag[i] = chi * s.d2V[i] + 2.0 / (h * h);
    m.upper[i] = drift - 1.0 / (h * h);
    rhs[i] = source * U[i] * (1.0 - U[i]);
    scale = std::max({scale, std::abs(m.lower[i]), std::abs(m.diag[i]), std::abs(m.upper[i])});
  }
  std::vector<double> w;
  try {
    w = detail::solve_pivoting(m, rhs);
  } catch (const std::runtime_error&) {
    throw SlabSolveError("linear_solve_ubar: singular system at c = " + format_real(c) +
                         ", tau = " + format_real(cfg.tau));
  }
  const std::vector<double> back = m.apply(w);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(back[i] - rhs[i]));
  if (!(res <= 1e-10 * scale))
    throw SlabSolveError("linear_solve_ubar: linear residual " + format_real(res) + " at c = " + format_real(c) +
                         ", tau = " + format_real(cfg.tau));
  return Field(U.grid, std::move(w));
}

struct SlabMapResult {
  double c = 0.0;
  Field U;
};

/// (c, U) -> (c + theta - max_{x >= 0} W, W) with W = linear_solve_ubar(c, U).
inline SlabMapResult s_tau_map(double c, const Field& U, const SlabConfig& cfg, double source = 1.0) {
  Field w = linear_solve_ubar(c, U, cfg, source);
  const double m = w[detail::argmax_right(w, cfg.mid())];
  return {c + cfg.theta - m, std::move(w)};
}

/// Closed-form solution of -c W' = W'' with W(-a) = 1, W(a) = 0.
inline double slab_closed_form(double x, double c, double a) {
  return (std::exp(-c * x) - std::exp(-c * a)) / (std::exp(c * a) - std::exp(-c * a));
}

namespace detail {

/// Newton iteration on (U_1..U_{n-2}, c) for the interior equations plus the
/// normalisation U_k = theta at the leftmost argmax k over x >= 0.  The
/// Jacobian is exact: V and V' are linear in U through the quadrature
/// weights of the kernel.
class SlabNewton {
 public:
  explicit SlabNewton(const SlabConfig& cfg) : cfg_(cfg), grid_(cfg.grid()), q_(grid_, cfg.params.d) {
    const std::size_t n = grid_.n();
    const double ell = std::sqrt(cfg.params.d);
    dV_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    ddV_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double l = q_.left_weight(i, j), r = q_.right_weight(i, j);
        dV_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = l + r;
        ddV_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (r - l) / ell;
      }
  }

  /// Equations: defects of interior rows then the normalisation row.
  [[nodiscard]] Eigen::VectorXd equations(double c, const Field& U) const {
    const std::size_t n = U.size();
    const SlabSignal s = slab_signal(U, cfg_.params.d);
    Eigen::VectorXd F(static_cast<Eigen::Index>(n - 1));
    for (std::size_t i = 1; i + 1 < n; ++i) F(static_cast<Eigen::Index>(i - 1)) = slab_row(cfg_, c, U, s, i);
    F(static_cast<Eigen::Index>(n - 2)) = U[argmax_right(U, cfg_.mid())] - cfg_.theta;
    return F;
  }

  [[nodiscard]] Eigen::MatrixXd jacobian(double c, const Field& U) const {
    const std::size_t n = U.size();
    const auto N = static_cast<Eigen::Index>(n - 1);
    const double h = grid_.dx();
    const double chi = cfg_.tau * cfg_.params.chi;
    const double d = cfg_.params.d;
    const SlabSignal s = slab_signal(U, d);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
    // Unknown column of U_j is j - 1; c is column n - 2.
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const auto row = static_cast<Eigen::Index>(i - 1);
      const double d1 = (U[i + 1] - U[i - 1]) / (2.0 * h);
      if (chi != 0.0) {
        const double a1 = chi * d1;
        const double a2 = chi * U[i] / d;
        for (std::size_t j = 1; j + 1 < n; ++j) {
          const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
          J(row, jj - 1) += a1 * ddV_(ii, jj) + a2 * dV_(ii, jj);
        }
      }
      const double up_deriv = U[i] > 0.0 ? 1.0 - 2.0 * U[i] : 0.0;
      const double drift = (-c + chi * s.dV[i]) / (2.0 * h);
      const double diag = 2.0 / (h * h) + chi * (s.d2V[i] - U[i] / d) - up_deriv;
      J(row, row) += diag;
      if (i >= 2) J(row, row - 1) += -drift - 1.0 / (h * h);
      if (i + 2 < n) J(row, row + 1) += drift - 1.0 / (h * h);
      J(row, N - 1) = -d1;
    }
    const std::size_t k = argmax_right(U, cfg_.mid());
    J(N - 1, static_cast<Eigen::Index>(k) - 1) = 1.0;
    return J;
  }

  struct Outcome {
    double c;
    Field U;
    double residual;
    std::size_t iterations;
    bool converged;
  };

  /// Newton in w = log U on the interior nodes with row i scaled by 1/U_i:
  ///   G_i = F_i / U_i,  dG_i/dw_j = J_ij U_j / U_i - delta_ij G_i.
  /// Only positive profiles are representable, and the rows far ahead of
  /// the front stay well conditioned although U is tiny there.
  [[nodiscard]] Outcome solve(double c, Field U, double tol, std::size_t max_iters) const {
    const std::size_t n = U.size();
    const auto N = static_cast<Eigen::Index>(n - 1);
    constexpr double floor = 1e-300;
    for (std::size_t j = 1; j + 1 < n; ++j) U[j] = std::max(U[j], floor);
    auto scaled = [&](double cc, const Field& u, Eigen::VectorXd& F) {
      F = equations(cc, u);
      Eigen::VectorXd G(N);
      for (std::size_t i = 1; i + 1 < n; ++i) G(static_cast<Eigen::Index>(i - 1)) = F(static_cast<Eigen::Index>(i - 1)) / u[i];
      G(N - 1) = std::log(u[argmax_right(u, cfg_.mid())] / cfg_.theta);
      return G;
    };
    auto norm = [](const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); };
    Eigen::VectorXd F;
    Eigen::VectorXd G = scaled(c, U, F);
    double r = norm(G);
    std::size_t it = 0;
    while (r > tol && it < max_iters) {
      ++it;
      Eigen::MatrixXd J = jacobian(c, U);
      for (Eigen::Index i = 0; i + 1 < N; ++i) {
        const double ui = U[static_cast<std::size_t>(i + 1)];
        for (Eigen::Index j = 0; j + 1 < N; ++j) J(i, j) *= U[static_cast<std::size_t>(j + 1)] / ui;
        J(i, N - 1) /= ui;
        J(i, i) -= G(i);
      }
      const std::size_t k = argmax_right(U, cfg_.mid());
      J.row(N - 1).setZero();
      J(N - 1, static_cast<Eigen::Index>(k) - 1) = 1.0;
      const Eigen::VectorXd delta = J.partialPivLu().solve(-G);
      if (!delta.allFinite()) break;
      double lambda = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 30; ++ls) {
        Field trial = U;
        for (std::size_t j = 1; j + 1 < n; ++j)
          trial[j] = std::max(U[j] * std::exp(lambda * delta(static_cast<Eigen::Index>(j - 1))), floor);
        const double ct = c + lambda * delta(N - 1);
        Eigen::VectorXd Ft;
        const Eigen::VectorXd Gt = scaled(ct, trial, Ft);
        const double rt = norm(Gt);
        if (std::isfinite(rt) && rt < (1.0 - 1e-4 * lambda) * r) {
          U = std::move(trial);
          c = ct;
          G = Gt;
          F = Ft;
          r = rt;
          accepted = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!accepted) break;
    }
    const double plain = residual_slab(c, U, cfg_);
    return {c, std::move(U), plain, it, plain <= tol};
  }

 private:
  SlabConfig cfg_;
  Grid1D grid_;
  KernelQuadrature q_;
  Eigen::MatrixXd dV_;   // dV_i / dU_j
  Eigen::MatrixXd ddV_;  // dV'_i / dU_j
};

/// Logistic front through theta at x = 0 with the slab boundary values.
inline Field slab_initial_guess(const SlabConfig& cfg) {
  const Grid1D g = cfg.grid();
  const double x0 = -std::log(1.0 / cfg.theta - 1.0);
  Field U = Field::sample(g, [x0](double x) { return 1.0 / (1.0 + std::exp(x - x0)); });
  U[0] = 1.0;
  U[g.n() - 1] = 0.0;
  return U;
}

}  // namespace detail

namespace detail {

/// Damped iteration of s_tau_map until the damped update is below tol,
/// max_iters is reached or the damping falls under min_damping.  Returns
/// the number of map evaluations.
inline std::size_t damped_map(const SlabConfig& cfg, double& c, Field& U, double min_damping) {
  double gamma = cfg.damping;
  double r = residual_slab(c, U, cfg);
  std::size_t evals = 0;
  for (std::size_t it = 0; it < cfg.max_iters && gamma >= min_damping && r > cfg.tol; ++it) {
    SlabMapResult m;
    try {
      m = s_tau_map(c, U, cfg);
    } catch (const SlabSolveError&) {
      break;
    }
    ++evals;
    Field trial(U.grid);
    double change = std::abs(m.c - c);
    for (std::size_t i = 0; i < U.size(); ++i) {
      trial[i] = (1.0 - gamma) * U[i] + gamma * m.U[i];
      change = std::max(change, std::abs(m.U[i] - U[i]));
    }
    const double ct = (1.0 - gamma) * c + gamma * m.c;
    const double rt = residual_slab(ct, trial, cfg);
    if (!(rt <= r)) {
      gamma *= 0.5;
      continue;
    }
    c = ct;
    U = std::move(trial);
    r = rt;
    if (gamma * change < cfg.tol) break;
  }
  return evals;
}

}  // namespace detail

struct SlabSolveOptions {
  double homotopy_step = 0.1;
  std::size_t newton_max_iters = 60;
  double min_damping = 1.0 / 64.0;
  double positivity_floor = 1e-12;   // nodes above -floor count as nonnegative
  std::optional<double> initial_c;   // seed; defaults to 2
  std::optional<Field> initial_U;
};

/// Homotopy in tau from 0 to cfg.tau in steps of 0.1, each step warm
/// started.  At each tau Newton on the full residual runs first.  When it
/// fails the damped map (c, U) <- (1 - g)(c, U) + g S_tau(c, U) runs from the
/// warm start, halving g whenever the residual grows, and Newton restarts
/// from its result.
inline SlabSolution solve_slab(const SlabConfig& cfg, const SlabSolveOptions& opt = {}) {
  cfg.validate();
  const Grid1D grid = cfg.grid();
  double c = opt.initial_c.value_or(2.0);
  Field U = opt.initial_U ? *opt.initial_U : detail::slab_initial_guess(cfg);
  if (!(U.grid == grid)) throw SlabConfigError("solve_slab: initial profile is not on the slab grid");

  SlabSolution sol;
  std::vector<double> taus;
  for (int k = 0;; ++k) {
    const double t = std::min(cfg.tau, k * opt.homotopy_step);
    taus.push_back(t);
    if (t >= cfg.tau) break;
  }

  for (double tau : taus) {
    SlabConfig step_cfg = cfg;
    step_cfg.tau = tau;
    const double tol = tau == cfg.tau ? cfg.tol : std::max(cfg.tol, 1e-6);
    const detail::SlabNewton newton(step_cfg);

    auto out = newton.solve(c, U, tol, opt.newton_max_iters);
    sol.newton_iterations += out.iterations;
    if (!out.converged) {
      double fc = c;
      Field fU = U;
      sol.fixed_point_iterations += detail::damped_map(step_cfg, fc, fU, opt.min_damping);
      auto retry = newton.solve(fc, std::move(fU), tol, opt.newton_max_iters);
      sol.newton_iterations += retry.iterations;
      if (retry.residual < out.residual) out = std::move(retry);
    }
    c = out.c;
    U = std::move(out.U);
    if (!std::isfinite(c) || !U.all_finite()) {
      sol.status = "diverged at tau = " + format_real(tau);
      break;
    }
  }

  sol.c = c;
  sol.U = U;
  const SlabSignal sig = slab_signal(U, cfg.params.d);
  sol.V = sig.V;
  sol.residual = residual_slab(c, U, cfg);
  sol.iterations = sol.fixed_point_iterations + sol.newton_iterations;
  sol.converged = sol.residual <= cfg.tol;

  double mn = U[1];
  for (std::size_t i = 1; i + 1 < U.size(); ++i) mn = std::min(mn, U[i]);
  sol.min_interior = mn;
  sol.positive = mn > -opt.positivity_floor;
  const double normalisation = U[detail::argmax_right(U, cfg.mid())];
  if (sol.status.empty()) {
    if (!sol.converged)
      sol.status = "not converged";
    else if (!sol.positive)
      sol.status = "positivity violated";
    else if (std::abs(normalisation - cfg.theta) > cfg.tol)
      sol.status = "normalisation failed";
    else
      sol.status = "converged";
  }
  if (sol.status != "converged") sol.converged = false;
  sol.diagnostics = bound_report(sol.c, sol.U, sol.V, sig.dV, cfg.params);
  return sol;
}

/// Integrating the slab equation over [0, a] (tau = 1, U(a) = 0):
///   int_0^a U (1 - U) = c U(0) - chi U(0) V'(0) + U'(0) - U'(a).
/// Derivatives are taken with derivative_central.
inline IdentityCheck integral_identity_check(const SlabSolution& sol, const SlabConfig& cfg) {
  const std::size_t k0 = cfg.mid();
  const std::size_t n = sol.U.size();
  Field integrand(sol.U.grid);
  for (std::size_t i = 0; i < n; ++i) integrand[i] = sol.U[i] * (1.0 - sol.U[i]);
  IdentityCheck out;
  out.lhs = trapezoid(integrand, sol.U.grid.x(k0), sol.U.grid.x(n - 1)).value;
  const Field dU = derivative_central(sol.U);
  const Field dV = derivative_central(sol.V);
  const double u0 = sol.U[k0];
  out.rhs = sol.c * u0 - cfg.params.chi * u0 * dV[k0] + dU[k0] - dU[n - 1];
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace ksfkpp
