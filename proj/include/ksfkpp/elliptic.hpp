// Finite-difference solve of -d v'' = u - v, the local route to the signal.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core.hpp"
#include "kernel.hpp"
#include "tridiagonal.hpp"

namespace ksfkpp {

struct EllipticBC {
  enum class Kind { neumann, dirichlet };
  Kind kind = Kind::neumann;
  double left_value = 0.0;
  double right_value = 0.0;

  static EllipticBC neumann() { return {}; }
  static EllipticBC dirichlet(double left, double right) { return {Kind::dirichlet, left, right}; }
};

/// Solves (-d D2 + I) v = u exactly by tridiagonal elimination.  Neumann
/// mirrors the ghost node (v_{-1} = v_1), which keeps second order.  The
/// system is solved for v - u_0, so constant data returns exactly.
inline Field solve_v(const Field& u, double d, const EllipticBC& bc = EllipticBC::neumann()) {
  if (!(d > 0.0)) throw std::invalid_argument("solve_v: d must be > 0");
  if (!std::isfinite(bc.left_value) || !std::isfinite(bc.right_value))
    throw std::invalid_argument("solve_v: boundary values must be finite");
  const std::size_t n = u.size();
  const double k = d / (u.grid.dx() * u.grid.dx());
  detail::Tridiagonal m(n);
  const double shift = u[0];
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = u[i] - shift;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    m.lower[i] = -k;
    m.diag[i] = 1.0 + 2.0 * k;
    m.upper[i] = -k;
  }
  if (bc.kind == EllipticBC::Kind::neumann) {
    m.diag[0] = 1.0 + 2.0 * k;
    m.upper[0] = -2.0 * k;
    m.diag[n - 1] = 1.0 + 2.0 * k;
    m.lower[n - 1] = -2.0 * k;
  } else {
    m.diag[0] = 1.0;
    rhs[0] = bc.left_value - shift;
    m.diag[n - 1] = 1.0;
    rhs[n - 1] = bc.right_value - shift;
  }
  // Strictly diagonally dominant for d > 0, so elimination without pivoting is stable.
  std::vector<double> v = detail::solve_thomas(m, std::move(rhs));
  for (double& x : v) x += shift;
  return Field(u.grid, std::move(v));
}

/// max over interior nodes of |-d D2 v - u + v|.
inline double residual_elliptic(const Field& u, const Field& v, double d) {
  if (!(u.grid == v.grid)) throw std::invalid_argument("residual_elliptic: fields must share a grid");
  const double h2 = u.grid.dx() * u.grid.dx();
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    const double lap = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    r = std::max(r, std::abs(-d * lap - u[i] + v[i]));
  }
  return r;
}

/// Max discrepancy between the Neumann solve and the kernel convolution
/// (boundary-value extension) over the middle half of the domain.
inline double elliptic_kernel_discrepancy(const Field& u, double d) {
  const Field fd = solve_v(u, d, EllipticBC::neumann());
  const Field kv = convolve_kd(u, d, ExtensionPolicy::by_boundary(u));
  const std::size_t n = u.size();
  double worst = 0.0;
  for (std::size_t i = n / 4; i <= 3 * (n - 1) / 4; ++i) worst = std::max(worst, std::abs(fd[i] - kv[i]));
  return worst;
}

}  // namespace ksfkpp
