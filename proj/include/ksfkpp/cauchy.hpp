// Explicit upwind time stepping of
//   u_t + chi (u v_x)_x = u_xx + u (1 - u),   -d v_xx = u - v
// on a bounded interval with Neumann conditions.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "elliptic.hpp"
#include "front_metrics.hpp"

namespace ksfkpp {

/// Raised when the stepper produces a non-finite value.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double t, std::size_t node, double x)
      : std::runtime_error("non-finite u at t = " + format_real(t) + ", node " + std::to_string(node) +
                           " (x = " + format_real(x) + ")"),
        t_(t), node_(node) {}
  [[nodiscard]] double t() const { return t_; }
  [[nodiscard]] std::size_t node() const { return node_; }

 private:
  double t_;
  std::size_t node_;
};

inline Field initial_gaussian_plateau(const Grid1D& grid, double center = 10.0) {
  if (center < grid.x_min() || center > grid.x_max())
    throw std::invalid_argument("initial_gaussian_plateau: grid must cover the plateau edge");
  return Field::sample(grid, [center](double x) {
    const double s = std::max(x - center, 0.0);
    return std::exp(-2.0 * s * s / 5.0);
  });
}

/// Named initial-data generator; the name and parameters are echoed in run
/// metadata.
struct InitialCondition {
  enum class Kind { gaussian_plateau, cosine_perturbation, heaviside, constant };
  Kind kind = Kind::gaussian_plateau;
  double center = 10.0;      // plateau edge / Heaviside jump
  double base = 1.0;         // cosine: base level; constant: value
  double amplitude = 1e-4;   // cosine perturbation amplitude
  double wavenumber = 1.0;   // cosine perturbation wavenumber

  [[nodiscard]] Field build(const Grid1D& g) const {
    switch (kind) {
      case Kind::gaussian_plateau: return initial_gaussian_plateau(g, center);
      case Kind::cosine_perturbation:
        return Field::sample(g, [&](double x) { return base + amplitude * std::cos(wavenumber * (x - g.x_min())); });
      case Kind::heaviside: return Field::sample(g, [&](double x) { return x <= center ? 1.0 : 0.0; });
      case Kind::constant: return Field(g, base);
    }
    throw std::logic_error("InitialCondition: unknown kind");
  }

  [[nodiscard]] std::string name() const {
    switch (kind) {
      case Kind::gaussian_plateau: return "gaussian_plateau";
      case Kind::cosine_perturbation: return "cosine_perturbation";
      case Kind::heaviside: return "heaviside";
      case Kind::constant: return "constant";
    }
    return "unknown";
  }
};

struct StepOptions {
  bool advection = true;
  bool reaction = true;
};

struct RunConfig {
  Params params;
  Grid1D grid = Grid1D::make(0.0, 120.0, 601);
  double dt = 0.004;
  double t_max = 30.0;
  std::vector<double> snapshot_times{10.0, 15.0, 20.0, 25.0, 30.0};
  InitialCondition initial;
  double level = 0.5;
  double fallback_level = 0.4;
  StepOptions options;

  void validate() const {
    params.validate();
    const double cap = 0.5 * grid.dx() * grid.dx();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("RunConfig: dt must be > 0");
    if (dt > cap) throw std::invalid_argument("RunConfig: dt exceeds the stability cap dx^2/2");
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("RunConfig: t_max must be >= 0");
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
      const double t = snapshot_times[i];
      if (t < 0.0 || t > t_max * (1.0 + 1e-12) + 1e-12)
        throw std::invalid_argument("RunConfig: snapshot time outside [0, t_max]");
      if (i > 0 && t < snapshot_times[i - 1]) throw std::invalid_argument("RunConfig: snapshot times must be sorted");
    }
    if (!(level > 0.0 && level < 1.0) || !(fallback_level > 0.0 && fallback_level < 1.0))
      throw std::invalid_argument("RunConfig: levels must be in (0, 1)");
  }

  /// d = 1, dx = 0.2, dt = dx^2/10 on [0, 120], plateau data, snapshots every
  /// 5 time units over [10, 30].
  static RunConfig fig1(double chi) {
    RunConfig c;
    c.params = {chi, 1.0};
    c.grid = Grid1D::with_spacing(0.0, 120.0, 0.2);
    c.dt = 0.2 * 0.2 / 10.0;
    c.t_max = 30.0;
    c.snapshot_times = {10.0, 15.0, 20.0, 25.0, 30.0};
    return c;
  }

  /// The fig1 setup sampled at every integer time in [24, 38].
  static RunConfig fig2(double chi = 5.0) {
    RunConfig c = fig1(chi);
    c.t_max = 38.0;
    c.snapshot_times.clear();
    for (int t = 24; t <= 38; ++t) c.snapshot_times.push_back(t);
    return c;
  }
};

/// One explicit Euler step with donor-cell fluxes at the faces
///   F_{i+1/2} = chi w_{i+1/2} u_up,  w_{i+1/2} = (v_{i+1} - v_i)/dx,
/// u_up = u_i when chi w > 0 and u_{i+1} otherwise.  The boundary nodes use
/// the mirrored ghost, which makes the flux through the physical boundary
/// vanish.  v is re-solved from the new u afterwards.
class Stepper {
 public:
  Stepper(const Params& p, const Grid1D& g, double dt, StepOptions opt = {})
      : params_(p), grid_(g), dt_(dt), opt_(opt), flux_(g.n() - 1, 0.0), next_(g.n(), 0.0) {}

  void advance(CauchyState& s, double t_new) {
    const std::size_t n = grid_.n();
    const double h = grid_.dx();
    const double h2 = h * h;
    const auto& u = s.u.values;
    const auto& v = s.v.values;
    const double chi = params_.chi;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double w = (v[i + 1] - v[i]) / h;
      const double vel = chi * w;
      flux_[i] = vel * (vel > 0.0 ? u[i] : u[i + 1]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      double lap, adv;
      if (i == 0) {
        lap = (u[1] - 2.0 * u[0] + u[1]) / h2;
        adv = (flux_[0] + flux_[0]) / h;
      } else if (i == n - 1) {
        lap = (u[n - 2] - 2.0 * u[n - 1] + u[n - 2]) / h2;
        adv = (-flux_[n - 2] - flux_[n - 2]) / h;
      } else {
        lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
        adv = (flux_[i] - flux_[i - 1]) / h;
      }
      const double react = opt_.reaction ? u[i] * (1.0 - u[i]) : 0.0;
      if (!opt_.advection) adv = 0.0;
      const double un = u[i] + dt_ * (lap - adv + react);
      if (!std::isfinite(un)) throw BlowUpError(t_new, i, grid_.x(i));
      next_[i] = un;
    }
    s.u.values.swap(next_);
    s.v = solve_v(s.u, params_.d, EllipticBC::neumann());
    s.t = t_new;
  }

 private:
  Params params_;
  Grid1D grid_;
  double dt_;
  StepOptions opt_;
  std::vector<double> flux_;
  std::vector<double> next_;
};

inline CauchyState make_state(const Field& u, const Params& p, double t = 0.0) {
  return {t, u, solve_v(u, p.d, EllipticBC::neumann())};
}

inline CauchyState step(const CauchyState& state, const Params& params, double dt, StepOptions opt = {}) {
  params.validate();
  if (!(dt > 0.0) || dt > 0.5 * state.u.grid.dx() * state.u.grid.dx())
    throw std::invalid_argument("step: dt outside (0, dx^2/2]");
  CauchyState next = state;
  Stepper(params, state.u.grid, dt, opt).advance(next, state.t + dt);
  return next;
}

struct FrontRecord {
  double t = 0.0;
  std::optional<double> primary;    // rightmost crossing of config.level
  std::optional<double> fallback;   // rightmost crossing of config.fallback_level
  std::size_t primary_crossings = 0;
};

struct RunResult {
  std::vector<CauchyState> snapshots;
  std::vector<FrontRecord> fronts;
  std::vector<std::string> warnings;
  std::size_t steps = 0;
  double wall_time = 0.0;
};

inline RunResult run(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  RunResult res;

  CauchyState state = make_state(config.initial.build(config.grid), config.params);

  const double reach_limit = config.grid.x(config.grid.n() - 1) - 10.0 * config.grid.dx();
  if (const auto x0 = front_position(state.u, config.level)) {
    if (*x0 + 3.0 * config.t_max > reach_limit)
      res.warnings.push_back("front at speed 3 would reach within 10 cells of the right boundary by t_max (x = " +
                             format_real(*x0 + 3.0 * config.t_max) + ")");
  }

  std::vector<double> times = config.snapshot_times;
  if (times.empty()) times.push_back(config.t_max);
  const auto total_steps = static_cast<std::size_t>(std::ceil(config.t_max / config.dt - 1e-9));
  std::vector<std::size_t> at_step;
  for (double ts : times) {
    const double k = std::ceil(ts / config.dt - 1e-9);
    at_step.push_back(static_cast<std::size_t>(std::max(k, 0.0)));
  }

  auto record = [&](const CauchyState& s) {
    res.snapshots.push_back(s);
    FrontRecord fr;
    fr.t = s.t;
    fr.primary = front_position(s.u, config.level);
    fr.fallback = front_position(s.u, config.fallback_level);
    fr.primary_crossings = count_crossings(s.u, config.level);
    res.fronts.push_back(fr);
  };

  Stepper stepper(config.params, config.grid, config.dt, config.options);
  std::size_t next = 0;
  for (std::size_t k = 0;; ++k) {
    while (next < at_step.size() && at_step[next] <= k) {
      record(state);
      ++next;
    }
    if (k >= total_steps) {
      res.steps = k;
      break;
    }
    stepper.advance(state, static_cast<double>(k + 1) * config.dt);
  }
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

/// Speed over snapshots with t in [t_lo, t_hi] (all snapshots when fewer
/// than two fall inside), using the level/fallback convention of the run.
inline SpeedEstimate measure_speed(const RunResult& r, const RunConfig& c, double t_lo = 10.0, double t_hi = 30.0,
                                   SpeedEstimate::Method method = SpeedEstimate::Method::endpoint_difference) {
  std::vector<CauchyState> inside;
  for (const auto& s : r.snapshots)
    if (s.t >= t_lo - 1e-9 && s.t <= t_hi + 1e-9) inside.push_back(s);
  if (inside.size() < 2) inside = r.snapshots;
  return track_front(inside, c.level, c.fallback_level, method);
}

}  // namespace ksfkpp
