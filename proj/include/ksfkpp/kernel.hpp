// The signal kernel K_d(x) = exp(-|x|/sqrt d) / (2 sqrt d), convolution
// against it, and the exponentially weighted uniformly local L^p norm.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "quadrature.hpp"

namespace ksfkpp {

inline double kd_eval(double x, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("kd_eval: d must be > 0");
  const double l = std::sqrt(d);
  return std::exp(-std::abs(x) / l) / (2.0 * l);
}

/// Constant values taken by an integrand outside its grid.
struct ExtensionPolicy {
  double left = 0.0;
  double right = 0.0;

  /// Extension by the boundary values of f (the Cauchy-domain convention).
  static ExtensionPolicy by_boundary(const Field& f) { return {f.values.front(), f.values.back()}; }
};

/// Exact integration of K_d against the piecewise-linear interpolant of a
/// nodal field.  On a uniform grid every cell contributes
/// E^m (alpha f_near + beta f_far), where m is the cell's distance in cells
/// from the target node and E = exp(-dx/sqrt d).
struct KernelQuadrature {
  double ell = 1.0;   // sqrt(d)
  double E = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t n = 0;

  KernelQuadrature(const Grid1D& g, double d) : ell(std::sqrt(d)), n(g.n()) {
    if (!(d > 0.0)) throw std::invalid_argument("KernelQuadrature: d must be > 0");
    const double h = g.dx();
    const double r = h / ell;
    E = std::exp(-r);
    const double i0 = -ell * std::expm1(-r);                       // int_0^h e^{-t/l}
    const double i1 = ell * ell * (-std::expm1(-r) - r * E);        // int_0^h t e^{-t/l}
    alpha = (i0 - i1 / h) / (2.0 * ell);
    beta = i1 / (2.0 * ell * h);
  }

  /// Coefficient of f_j in the part of the integral with y >= x_i.
  [[nodiscard]] double right_weight(std::size_t i, std::size_t j) const {
    if (j < i) return 0.0;
    double w = 0.0;
    if (j >= i + 1) w += beta * std::pow(E, static_cast<double>(j - 1 - i));
    if (j + 1 < n) w += alpha * std::pow(E, static_cast<double>(j - i));
    return w;
  }

  /// Coefficient of f_j in the part of the integral with y <= x_i.
  [[nodiscard]] double left_weight(std::size_t i, std::size_t j) const {
    if (j > i) return 0.0;
    double w = 0.0;
    if (j + 1 <= i) w += beta * std::pow(E, static_cast<double>(i - j - 1));
    if (j >= 1) w += alpha * std::pow(E, static_cast<double>(i - j));
    return w;
  }

  [[nodiscard]] double left_tail(std::size_t i) const { return 0.5 * std::pow(E, static_cast<double>(i)); }
  [[nodiscard]] double right_tail(std::size_t i) const { return 0.5 * std::pow(E, static_cast<double>(n - 1 - i)); }
};

/// Convolution split at each node into the part from y < x_i and from
/// y > x_i.  v = left + right and v' = (right - left) / sqrt d exactly.
struct KernelSplit {
  std::vector<double> left;
  std::vector<double> right;
};

inline KernelSplit convolve_kd_split(const Field& f, double d, const ExtensionPolicy& ext) {
  const KernelQuadrature q(f.grid, d);
  const std::size_t n = f.size();
  KernelSplit s{std::vector<double>(n), std::vector<double>(n)};
  s.left[0] = 0.5 * ext.left;
  for (std::size_t i = 1; i < n; ++i) s.left[i] = q.alpha * f[i] + q.beta * f[i - 1] + q.E * s.left[i - 1];
  s.right[n - 1] = 0.5 * ext.right;
  for (std::size_t i = n - 1; i-- > 0;) s.right[i] = q.alpha * f[i] + q.beta * f[i + 1] + q.E * s.right[i + 1];
  return s;
}

/// v(x_i) = int K_d(x_i - y) f~(y) dy with f~ the piecewise-linear
/// interpolant of f on the grid and the constants of `ext` outside it.
/// Tails are integrated in closed form.
inline Field convolve_kd(const Field& f, double d, const ExtensionPolicy& ext) {
  if (!(d > 0.0)) throw std::invalid_argument("convolve_kd: d must be > 0");
  const KernelSplit s = convolve_kd_split(f, d, ext);
  Field v(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = s.left[i] + s.right[i];
  return v;
}

struct KernelConvolution {
  Field v;
  Field dv;  // exact derivative of the convolution, (K_d' * f~)(x_i)
};

inline KernelConvolution convolve_kd_with_derivative(const Field& f, double d, const ExtensionPolicy& ext) {
  if (!(d > 0.0)) throw std::invalid_argument("convolve_kd: d must be > 0");
  const KernelSplit s = convolve_kd_split(f, d, ext);
  const double l = std::sqrt(d);
  KernelConvolution out{Field(f.grid), Field(f.grid)};
  for (std::size_t i = 0; i < f.size(); ++i) {
    out.v[i] = s.left[i] + s.right[i];
    out.dv[i] = (s.right[i] - s.left[i]) / l;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Uniformly local norm.

struct ULNormSpec {
  double sigma_ul = 0.5;
  double p = 2.0;
  double psi_halfwidth = 1.0;

  void validate() const {
    if (!(sigma_ul > 0.0) || !std::isfinite(sigma_ul)) throw std::invalid_argument("ULNormSpec: sigma_ul must be > 0");
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("ULNormSpec: p must be >= 1");
    if (!(psi_halfwidth > 0.0) || !std::isfinite(psi_halfwidth))
      throw std::invalid_argument("ULNormSpec: psi_halfwidth must be > 0");
    if (psi_halfwidth < min_psi_halfwidth())
      throw std::invalid_argument("ULNormSpec: psi_halfwidth too small for psi <= 1");
  }

  /// The normalised bump peaks at 1 / (h int bump), so psi <= 1 needs h at
  /// least the reciprocal mass of the unit bump.
  static double min_psi_halfwidth();
};

namespace detail {

inline double bump_raw(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

inline double bump_mass() {
  static const double mass = integrate_composite(bump_raw, -1.0, 1.0, 64);
  return mass;
}

// Integrates g over [-h, h] split at `kink` when it lies inside.
template <class G>
double integrate_over_support(G&& g, double h, double kink) {
  constexpr std::size_t panels = 16;
  if (kink > -h && kink < h)
    return integrate_composite(g, -h, kink, panels) + integrate_composite(g, kink, h, panels);
  return integrate_composite(g, -h, h, 2 * panels);
}

}  // namespace detail

inline double ULNormSpec::min_psi_halfwidth() { return 1.0 / detail::bump_mass(); }

/// Mollifier: the standard bump on [-h, h] scaled to unit mass.
inline double psi_eval(double x, const ULNormSpec& spec) {
  const double h = spec.psi_halfwidth;
  return detail::bump_raw(x / h) / (h * detail::bump_mass());
}

/// phi = exp(-sigma |.|) * psi.
inline double phi_eval(double x, const ULNormSpec& spec) {
  const double h = spec.psi_halfwidth;
  const double s = spec.sigma_ul;
  return detail::integrate_over_support(
      [&](double y) { return std::exp(-s * std::abs(x - y)) * psi_eval(y, spec); }, h, x);
}

/// int_{-inf}^{z} phi.
inline double phi_cumulative(double z, const ULNormSpec& spec) {
  const double h = spec.psi_halfwidth;
  const double s = spec.sigma_ul;
  auto e_cum = [s](double w) { return w <= 0.0 ? std::exp(s * w) / s : (2.0 - std::exp(-s * w)) / s; };
  if (z < -h - 60.0 / s) return 0.0;
  return detail::integrate_over_support([&](double y) { return e_cum(z - y) * psi_eval(y, spec); }, h, z);
}

struct ULNormResult {
  double value = 0.0;
  double argmax_shift = 0.0;
};

namespace detail {

/// int phi(x - s) g~(x) dx where g~ interpolates g linearly on the grid
/// and equals gl / gr outside.
class ShiftedWeightIntegral {
 public:
  ShiftedWeightIntegral(const Grid1D& grid, std::vector<double> g, double gl, double gr, const ULNormSpec& spec)
      : grid_(grid), g_(std::move(g)), gl_(gl), gr_(gr), spec_(spec) {
    cutoff_ = spec.psi_halfwidth + 45.0 / spec.sigma_ul;
  }

  /// Value for s at node k, using a table of phi at node offsets.
  [[nodiscard]] double at_node(std::size_t k) {
    build_table();
    const std::size_t n = grid_.n();
    const auto& rule = gauss6();
    const double h = grid_.dx();
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const long m = static_cast<long>(j) - static_cast<long>(k);
      if (std::abs(static_cast<double>(m)) * h > cutoff_ + h) continue;
      const double* row = &table_[static_cast<std::size_t>(m + static_cast<long>(n) - 1) * rule.nodes.size()];
      double cell = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double t = 0.5 * (rule.nodes[q] + 1.0);
        cell += rule.weights[q] * row[q] * ((1.0 - t) * g_[j] + t * g_[j + 1]);
      }
      total += 0.5 * h * cell;
    }
    return total + tails(grid_.x(k));
  }

  /// Value for an arbitrary shift, evaluating phi directly.
  [[nodiscard]] double at(double s) const {
    const std::size_t n = grid_.n();
    const auto& rule = gauss6();
    const double h = grid_.dx();
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double x0 = grid_.x(j);
      if (x0 + h < s - cutoff_ || x0 > s + cutoff_) continue;
      double cell = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double t = 0.5 * (rule.nodes[q] + 1.0);
        cell += rule.weights[q] * phi_eval(x0 + t * h - s, spec_) * ((1.0 - t) * g_[j] + t * g_[j + 1]);
      }
      total += 0.5 * h * cell;
    }
    return total + tails(s);
  }

 private:
  [[nodiscard]] double tails(double s) const {
    double t = 0.0;
    if (gl_ != 0.0) t += gl_ * phi_cumulative(grid_.x_min() - s, spec_);
    if (gr_ != 0.0) t += gr_ * phi_cumulative(s - grid_.x(grid_.n() - 1), spec_);
    return t;
  }

  void build_table() {
    if (!table_.empty()) return;
    const std::size_t n = grid_.n();
    const auto& rule = gauss6();
    const double h = grid_.dx();
    table_.assign((2 * n - 1) * rule.nodes.size(), 0.0);
    for (std::size_t r = 0; r < 2 * n - 1; ++r) {
      const double m = static_cast<double>(r) - static_cast<double>(n - 1);
      if (std::abs(m) * h > cutoff_ + h) continue;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double t = 0.5 * (rule.nodes[q] + 1.0);
        table_[r * rule.nodes.size() + q] = phi_eval((m + t) * h, spec_);
      }
    }
  }

  Grid1D grid_;
  std::vector<double> g_;
  double gl_, gr_;
  ULNormSpec spec_;
  double cutoff_;
  std::vector<double> table_;
};

}  // namespace detail

/// sup_s (int phi(x - s) |f~(x)|^p dx)^{1/p}.  The sup is taken over all
/// nodes and two sentinel shifts past each end of the grid, then refined by
/// a parabola through the best node and its neighbours.  The integrand is
/// the piecewise-linear interpolant of the nodal values |f_i|^p.
inline ULNormResult ul_norm_detail(const Field& f, const ULNormSpec& spec, const ExtensionPolicy& ext) {
  spec.validate();
  const std::size_t n = f.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::pow(std::abs(f[i]), spec.p);
  detail::ShiftedWeightIntegral integral(f.grid, g, std::pow(std::abs(ext.left), spec.p),
                                         std::pow(std::abs(ext.right), spec.p), spec);

  std::vector<double> at_nodes(n);
  std::size_t best = 0;
  for (std::size_t k = 0; k < n; ++k) {
    at_nodes[k] = integral.at_node(k);
    if (at_nodes[k] > at_nodes[best]) best = k;
  }
  double best_value = at_nodes[best];
  double best_shift = f.grid.x(best);

  if (best > 0 && best + 1 < n) {
    const double fm = at_nodes[best - 1], f0 = at_nodes[best], fp = at_nodes[best + 1];
    const double curv = fm - 2.0 * f0 + fp;
    if (curv < 0.0) {
      const double offset = 0.5 * (fm - fp) / curv * f.grid.dx();
      const double s = best_shift + offset;
      const double val = integral.at(s);
      if (val > best_value) {
        best_value = val;
        best_shift = s;
      }
    }
  }

  const double sig = spec.sigma_ul;
  for (double s : {f.grid.x_min() - 2.0 / sig, f.grid.x_min() - 10.0 / sig, f.grid.x(n - 1) + 2.0 / sig,
                   f.grid.x(n - 1) + 10.0 / sig}) {
    const double val = integral.at(s);
    if (val > best_value) {
      best_value = val;
      best_shift = s;
    }
  }
  return {std::pow(std::max(best_value, 0.0), 1.0 / spec.p), best_shift};
}

inline double ul_norm(const Field& f, const ULNormSpec& spec, const ExtensionPolicy& ext) {
  return ul_norm_detail(f, spec, ext).value;
}

/// Empirical constant in K_d(x - s) <= (C / sqrt d) phi_s(x).
struct DominationReport {
  bool valid = false;         // sigma_ul * sqrt(d) < 1
  double sigma_sqrt_d = 0.0;
  double empirical_c = 0.0;   // max over the scan of sqrt(d) K_d / phi
  double derived_c = 0.0;     // exp(sigma h) / 2, from |x - y| <= |x| + h
  double worst_x = 0.0;
  std::size_t points = 0;
  bool holds = false;         // empirical_c finite and <= derived_c
};

inline DominationReport check_kd_phi_domination(const ULNormSpec& spec, double d, std::size_t points = 4001) {
  spec.validate();
  if (!(d > 0.0)) throw std::invalid_argument("check_kd_phi_domination: d must be > 0");
  DominationReport r;
  r.sigma_sqrt_d = spec.sigma_ul * std::sqrt(d);
  if (!(r.sigma_sqrt_d < 1.0))
    throw std::domain_error("check_kd_phi_domination: requires sigma_ul < 1/sqrt(d)");
  r.valid = true;
  r.points = points;
  r.derived_c = 0.5 * std::exp(spec.sigma_ul * spec.psi_halfwidth);
  const double reach = 40.0 * std::sqrt(d) + spec.psi_halfwidth;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = -reach + 2.0 * reach * static_cast<double>(i) / static_cast<double>(points - 1);
    const double ratio = std::sqrt(d) * kd_eval(x, d) / phi_eval(x, spec);
    if (ratio > r.empirical_c) {
      r.empirical_c = ratio;
      r.worst_x = x;
    }
  }
  r.holds = std::isfinite(r.empirical_c) && r.empirical_c <= r.derived_c * (1.0 + 1e-12);
  return r;
}

}  // namespace ksfkpp
