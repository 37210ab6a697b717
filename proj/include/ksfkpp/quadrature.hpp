#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace ksfkpp::detail {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule of order m by Newton iteration on P_m.
inline GaussRule gauss_legendre(std::size_t m) {
  GaussRule r{std::vector<double>(m), std::vector<double>(m)};
  for (std::size_t i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(m) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= m; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(m) * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

inline const GaussRule& gauss20() {
  static const GaussRule rule = gauss_legendre(20);
  return rule;
}

inline const GaussRule& gauss6() {
  static const GaussRule rule = gauss_legendre(6);
  return rule;
}

/// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
template <class F>
double integrate_composite(F&& f, double a, double b, std::size_t panels, const GaussRule& rule = gauss20()) {
  if (!(b > a)) return 0.0;
  const double w = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + static_cast<double>(p) * w;
    const double mid = lo + 0.5 * w;
    double s = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) s += rule.weights[q] * f(mid + 0.5 * w * rule.nodes[q]);
    total += 0.5 * w * s;
  }
  return total;
}

}  // namespace ksfkpp::detail
