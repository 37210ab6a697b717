// Linear stability of u = 1 and the inequality report shared by the
// Cauchy and slab pipelines.
//
// Linearising around (u, v) = (1, 1) with the mode e^{ikx + lambda t}:
//   v_hat = u_hat / (1 + d k^2),
//   lambda(k) = -k^2 - 1 + chi k^2 / (1 + d k^2).
// For chi > 1 the maximum over k is (sqrt(chi) - 1)^2 / d - 1 at
// k^2 = (sqrt(chi) - 1) / d; it vanishes exactly when chi = (1 + sqrt(d))^2.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cauchy.hpp"
#include "core.hpp"
#include "kernel.hpp"

namespace ksfkpp {

inline double dispersion(double k, const Params& params) {
  params.validate();
  const double k2 = k * k;
  return -k2 - 1.0 + params.chi * k2 / (1.0 + params.d * k2);
}

struct StabilityReport {
  enum class Verdict { stable, neutral, unstable };
  double chi_star = 0.0;
  double lambda_max = -1.0;
  double k_star = 0.0;
  Verdict verdict = Verdict::stable;
};

inline const char* to_string(StabilityReport::Verdict v) {
  switch (v) {
    case StabilityReport::Verdict::stable: return "stable";
    case StabilityReport::Verdict::neutral: return "neutral";
    default: return "unstable";
  }
}

inline StabilityReport stability_report(const Params& params) {
  params.validate();
  StabilityReport r;
  const double sd = std::sqrt(params.d);
  r.chi_star = (1.0 + sd) * (1.0 + sd);
  if (params.chi > 1.0) {
    const double s = std::sqrt(params.chi) - 1.0;
    r.lambda_max = s * s / params.d - 1.0;
    r.k_star = std::sqrt(s / params.d);
  }
  constexpr double band = 1e-12;
  if (std::abs(r.lambda_max) <= band)
    r.verdict = StabilityReport::Verdict::neutral;
  else
    r.verdict = r.lambda_max > 0.0 ? StabilityReport::Verdict::unstable : StabilityReport::Verdict::stable;
  return r;
}

class GrowthFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical setup for measure_growth_rate.  The domain holds `half_periods`
/// half wavelengths, so cos(k x) satisfies the Neumann conditions and is an
/// exact mode of the discrete linearised scheme.
struct GrowthBackend {
  std::size_t half_periods = 2;
  std::size_t nodes_per_wavelength = 64;
  double dt_fraction = 0.2;  // dt = dt_fraction * dx^2
  double t_max = 6.0;
  double amplitude = 1e-4;
  double saturation = 1e-2;
  double floor = 1e-9;  // relative to amplitude; decayed modes stop sampling here
  double fit_start = 0.5;
  std::size_t min_samples = 10;
};

struct GrowthMeasurement {
  double rate = 0.0;
  double fit_t0 = 0.0;
  double fit_t1 = 0.0;
  std::size_t samples = 0;
  std::vector<double> times;
  std::vector<double> amplitudes;
};

/// Runs the stepper from 1 + A cos(k x) and fits log |amplitude| over the
/// window before the perturbation exceeds the saturation cap or decays into
/// rounding.  The amplitude
/// is the trapezoid projection of u - 1 onto cos(k x).
inline GrowthMeasurement measure_growth(const Params& params, double k, const GrowthBackend& be = {}) {
  params.validate();
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("measure_growth_rate: k must be > 0");
  if (be.nodes_per_wavelength < 8) throw std::invalid_argument("measure_growth_rate: need >= 8 nodes per wavelength");
  const double L = static_cast<double>(be.half_periods) * std::numbers::pi / k;
  const std::size_t n = be.half_periods * be.nodes_per_wavelength / 2 + 1;
  const Grid1D grid = Grid1D::make(0.0, L, n);
  const double dt = be.dt_fraction * grid.dx() * grid.dx();

  InitialCondition ic;
  ic.kind = InitialCondition::Kind::cosine_perturbation;
  ic.base = 1.0;
  ic.amplitude = be.amplitude;
  ic.wavenumber = k;
  CauchyState state = make_state(ic.build(grid), params);

  Field mode = Field::sample(grid, [k](double x) { return std::cos(k * x); });
  Field mode_sq(grid);
  for (std::size_t i = 0; i < n; ++i) mode_sq[i] = mode[i] * mode[i];
  const double norm = trapezoid(mode_sq).value;
  auto project = [&](const Field& u) {
    Field w(grid);
    for (std::size_t i = 0; i < n; ++i) w[i] = (u[i] - 1.0) * mode[i];
    return trapezoid(w).value / norm;
  };

  GrowthMeasurement out;
  Stepper stepper(params, grid, dt);
  const auto steps = static_cast<std::size_t>(std::ceil(be.t_max / dt));
  const std::size_t every = std::max<std::size_t>(1, steps / 200);
  bool saturated = false;
  for (std::size_t s = 1; s <= steps; ++s) {
    stepper.advance(state, static_cast<double>(s) * dt);
    if (s % every) continue;
    const double a = project(state.u);
    if (std::abs(a) > be.saturation) {
      saturated = true;
      break;
    }
    if (std::abs(a) < be.floor * be.amplitude) break;
    if (state.t >= be.fit_start && a != 0.0) {
      out.times.push_back(state.t);
      out.amplitudes.push_back(std::abs(a));
    }
  }
  if (out.times.size() < be.min_samples)
    throw GrowthFitError(saturated ? "measure_growth_rate: amplitude exceeded the saturation cap before a fit window"
                                   : "measure_growth_rate: too few samples in the fit window");
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    tm += out.times[i];
    ym += std::log(out.amplitudes[i]);
  }
  const auto m = static_cast<double>(out.times.size());
  tm /= m;
  ym /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    sxy += (out.times[i] - tm) * (std::log(out.amplitudes[i]) - ym);
    sxx += (out.times[i] - tm) * (out.times[i] - tm);
  }
  out.rate = sxy / sxx;
  out.fit_t0 = out.times.front();
  out.fit_t1 = out.times.back();
  out.samples = out.times.size();
  return out;
}

inline double measure_growth_rate(const Params& params, double k, const GrowthBackend& be = {}) {
  return measure_growth(params, k, be).rate;
}

struct BoundEntry {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  double margin = 0.0;   // bound - value; positive when the check passes
  bool pass = true;
  bool asserted = true;  // false for report-only entries
};

struct BoundReport {
  std::vector<BoundEntry> entries;

  [[nodiscard]] std::size_t failures() const {
    std::size_t f = 0;
    for (const auto& e : entries)
      if (e.asserted && !e.pass) ++f;
    return f;
  }
  [[nodiscard]] const BoundEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
};

namespace detail {

inline BoundEntry upper_entry(std::string name, double value, double bound, bool asserted = true) {
  BoundEntry e;
  e.name = std::move(name);
  e.value = value;
  e.bound = bound;
  e.margin = bound - value;
  e.pass = std::isfinite(value) && value <= bound;
  e.asserted = asserted;
  return e;
}

inline BoundEntry lower_entry(std::string name, double value, double bound) {
  BoundEntry e = upper_entry(std::move(name), value, bound);
  e.margin = value - bound;
  e.pass = std::isfinite(value) && value >= bound;
  return e;
}

}  // namespace detail

/// Checks on a front profile (c, U, V) with V' supplied:
///   gradient_bound    max(|V'| - V / sqrt d) <= 20 dx^2
///   speed_upper       c <= 2 + (chi/sqrt d + chi/d) max V
///   speed_lower       c >= 1.8
///   linf_bound        max U <= 1/(1 - chi/d) + 10 dx   (only when chi/d < 1)
///   ul_constant       max V * d^{1/4} / ul_norm(U)     (reported, not asserted)
inline BoundReport bound_report(double c, const Field& U, const Field& V, const Field& dV, const Params& params) {
  params.validate();
  if (!(U.grid == V.grid) || !(U.grid == dV.grid)) throw std::invalid_argument("bound_report: fields on different grids");
  const double dx = U.grid.dx();
  const double sd = std::sqrt(params.d);
  const double chi = params.chi;
  BoundReport r;

  double grad = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < V.size(); ++i) grad = std::max(grad, std::abs(dV[i]) - V[i] / sd);
  r.entries.push_back(detail::upper_entry("gradient_bound", grad, 20.0 * dx * dx));

  const double vmax = V.max();
  r.entries.push_back(detail::upper_entry("speed_upper", c, 2.0 + (chi / sd + chi / params.d) * vmax));
  r.entries.push_back(detail::lower_entry("speed_lower", c, 2.0 - 0.2));

  if (chi / params.d < 1.0)
    r.entries.push_back(detail::upper_entry("linf_bound", U.max(), 1.0 / (1.0 - chi / params.d) + 10.0 * dx));

  ULNormSpec spec;
  spec.p = 2.0;
  const double ul = ul_norm(U, spec, ExtensionPolicy::by_boundary(U));
  const double emp = ul > 0.0 ? vmax * std::pow(params.d, 0.25) / ul : 0.0;
  r.entries.push_back(detail::upper_entry("ul_constant", emp, std::numeric_limits<double>::infinity(), false));
  return r;
}

/// Same report with V' from derivative_central(V).
inline BoundReport bound_report(double c, const Field& U, const Field& V, const Params& params) {
  return bound_report(c, U, V, derivative_central(V), params);
}

}  // namespace ksfkpp
