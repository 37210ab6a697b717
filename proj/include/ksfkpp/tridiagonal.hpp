#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ksfkpp::detail {

/// Tridiagonal system: lower[i] multiplies x[i-1], diag[i] x[i], upper[i]
/// x[i+1].  lower[0] and upper[n-1] are ignored.
struct Tridiagonal {
  std::vector<double> lower, diag, upper;

  explicit Tridiagonal(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
  [[nodiscard]] std::size_t size() const { return diag.size(); }

  [[nodiscard]] std::vector<double> apply(const std::vector<double>& x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = diag[i] * x[i];
      if (i > 0) s += lower[i] * x[i - 1];
      if (i + 1 < n) s += upper[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }
};

/// Thomas elimination.  Only safe for diagonally dominant systems.
inline std::vector<double> solve_thomas(const Tridiagonal& m, std::vector<double> rhs) {
  const std::size_t n = m.size();
  std::vector<double> c(n, 0.0);
  double beta = m.diag[0];
  if (beta == 0.0) throw std::runtime_error("solve_thomas: zero pivot");
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    c[i - 1] = m.upper[i - 1] / beta;
    beta = m.diag[i] - m.lower[i] * c[i - 1];
    if (beta == 0.0) throw std::runtime_error("solve_thomas: zero pivot");
    rhs[i] = (rhs[i] - m.lower[i] * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

/// Gaussian elimination with partial pivoting (the dgtsv scheme); handles
/// systems that are not diagonally dominant.
inline std::vector<double> solve_pivoting(const Tridiagonal& m, std::vector<double> b) {
  const std::size_t n = m.size();
  std::vector<double> dl(m.lower.begin() + 1, m.lower.end());
  std::vector<double> d = m.diag;
  std::vector<double> du(m.upper.begin(), m.upper.end() - 1);
  std::vector<double> du2(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) throw std::runtime_error("solve_pivoting: singular system");
      const double f = dl[i] / d[i];
      d[i + 1] -= f * du[i];
      b[i + 1] -= f * b[i];
      dl[i] = 0.0;
    } else {
      const double f = d[i] / dl[i];
      d[i] = dl[i];
      const double tmp = d[i + 1];
      d[i + 1] = du[i] - f * tmp;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du2[i];
      }
      du[i] = tmp;
      std::swap(b[i], b[i + 1]);
      b[i + 1] -= f * b[i];
    }
  }
  if (d[n - 1] == 0.0) throw std::runtime_error("solve_pivoting: singular system");
  std::vector<double> x(n);
  x[n - 1] = b[n - 1] / d[n - 1];
  if (n > 1) x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
  for (std::size_t i = n - 2; i-- > 0;) x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
  return x;
}

}  // namespace ksfkpp::detail
