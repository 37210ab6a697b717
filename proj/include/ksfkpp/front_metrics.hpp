// Level-set front tracking, wave-speed estimation and detection of
// time-periodic profiles in the co-moving frame.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace ksfkpp {

/// Rightmost x where u drops through `level`: the first index pair
/// u_i >= level > u_{i+1} scanning from the right, linearly interpolated.
inline std::optional<double> front_position(const Field& u, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("front_position: level must be in (0, 1)");
  for (std::size_t i = u.size() - 1; i-- > 0;) {
    if (u[i] >= level && level > u[i + 1]) {
      const double w = (u[i] - level) / (u[i] - u[i + 1]);
      return u.grid.x(i) + w * u.grid.dx();
    }
  }
  return std::nullopt;
}

/// Number of downward crossings of `level`.
inline std::size_t count_crossings(const Field& u, double level) {
  std::size_t c = 0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i)
    if (u[i] >= level && level > u[i + 1]) ++c;
  return c;
}

struct SpeedEstimate {
  enum class Method { endpoint_difference, least_squares };

  double level = 0.5;
  std::vector<std::pair<double, double>> positions;  // (t, x)
  Method method = Method::endpoint_difference;
  double speed = 0.0;           // value for `method`
  double endpoint_speed = 0.0;
  double least_squares_speed = 0.0;
};

inline const char* to_string(SpeedEstimate::Method m) {
  return m == SpeedEstimate::Method::endpoint_difference ? "endpoint_difference" : "least_squares";
}

inline SpeedEstimate speed_from_positions(std::vector<std::pair<double, double>> positions,
                                          SpeedEstimate::Method method = SpeedEstimate::Method::endpoint_difference,
                                          double level = 0.5) {
  if (positions.size() < 2) throw std::invalid_argument("speed_from_positions: need at least 2 positions");
  for (std::size_t i = 1; i < positions.size(); ++i)
    if (!(positions[i].first > positions[i - 1].first))
      throw std::invalid_argument("speed_from_positions: times must be strictly increasing");
  SpeedEstimate e;
  e.level = level;
  e.method = method;
  const auto& first = positions.front();
  const auto& last = positions.back();
  e.endpoint_speed = (last.second - first.second) / (last.first - first.first);

  // Centred regression slope; invariant under constant shifts of t or x.
  double tm = 0.0, xm = 0.0;
  for (const auto& [t, x] : positions) {
    tm += t;
    xm += x;
  }
  tm /= static_cast<double>(positions.size());
  xm /= static_cast<double>(positions.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [t, x] : positions) {
    sxy += (t - tm) * (x - xm);
    sxx += (t - tm) * (t - tm);
  }
  e.least_squares_speed = sxy / sxx;
  e.speed = method == SpeedEstimate::Method::endpoint_difference ? e.endpoint_speed : e.least_squares_speed;
  e.positions = std::move(positions);
  if (!std::isfinite(e.speed)) throw std::runtime_error("speed_from_positions: non-finite speed");
  return e;
}

/// Tracks the rightmost `level` crossing over the snapshots, switching to
/// `fallback_level` when the primary level set has several elements in any
/// snapshot (a patterned wake).
inline SpeedEstimate track_front(const std::vector<CauchyState>& snapshots, double level = 0.5,
                                 double fallback_level = 0.4,
                                 SpeedEstimate::Method method = SpeedEstimate::Method::endpoint_difference) {
  double use = level;
  for (const auto& s : snapshots)
    if (count_crossings(s.u, level) > 1) {
      use = fallback_level;
      break;
    }
  std::vector<std::pair<double, double>> pos;
  for (const auto& s : snapshots) {
    const auto x = front_position(s.u, use);
    if (!x) throw std::runtime_error("track_front: no level crossing at t = " + format_real(s.t));
    pos.emplace_back(s.t, *x);
  }
  return speed_from_positions(std::move(pos), method, use);
}

struct PeriodEstimate {
  enum class Classification { traveling_wave, pulsating_front, undetermined };

  std::optional<double> period;
  double shift_speed = 0.0;   // optimal co-moving speed at the reported period (or at the best T)
  double mismatch = 0.0;      // normalised L2 discrepancy at that T
  Classification classification = Classification::undetermined;
  std::vector<double> candidate_periods;
  std::vector<double> candidate_mismatch;
  std::vector<double> candidate_speeds;
};

inline const char* to_string(PeriodEstimate::Classification c) {
  switch (c) {
    case PeriodEstimate::Classification::traveling_wave: return "traveling_wave";
    case PeriodEstimate::Classification::pulsating_front: return "pulsating_front";
    default: return "undetermined";
  }
}

struct PeriodOptions {
  double traveling_tolerance = 1e-3;   // every T below this: traveling wave
  double pulsating_tolerance = 5e-2;   // a periodic minimum must be below this
  double median_ratio = 3.0;           // ... and this many times below the median
  double shift_search = 1.0;           // max |s - speed| T explored, in length units
};

namespace detail {

// sqrt(sum_pairs sum_window (u_a - u_b(. + shift))^2 / sum_pairs sum_window u_a^2)
inline double period_mismatch(const std::vector<const CauchyState*>& snaps, std::size_t lag, double speed,
                              double x_lo, double x_hi) {
  const double T = snaps[lag]->t - snaps[0]->t;
  const double shift = speed * T;
  double num = 0.0, den = 0.0;
  std::size_t used = 0;
  for (std::size_t a = 0; a + lag < snaps.size(); ++a) {
    const Field& ua = snaps[a]->u;
    const Field& ub = snaps[a + lag]->u;
    const double lo = std::max(x_lo, ub.grid.x_min() - shift);
    const double hi = std::min(x_hi, ub.grid.x(ub.grid.n() - 1) - shift);
    for (std::size_t i = 0; i < ua.size(); ++i) {
      const double x = ua.grid.x(i);
      if (x < lo || x > hi) continue;
      const double diff = ua[i] - ub.interpolate(x + shift);
      num += diff * diff;
      den += ua[i] * ua[i];
      ++used;
    }
  }
  if (used == 0) throw std::runtime_error("detect_period: comparison window is empty after shifting");
  if (den == 0.0) return num == 0.0 ? 0.0 : 1.0;
  return std::sqrt(num / den);
}

}  // namespace detail

/// Compares u(t) with u(t + T, . + s T) on the window for every candidate
/// T = k dt, minimising over the co-moving speed s with |s - speed| T
/// bounded by shift_search.  Bounding the shift rather than the speed keeps
/// long lags from aliasing onto a stationary wake pattern.
///
/// Classification: every T below traveling_tolerance is a traveling wave;
/// the smallest T that is a strict interior local minimum below
/// pulsating_tolerance and median_ratio times below the median is the
/// period of a pulsating front; anything else is undetermined.
inline PeriodEstimate detect_period(const std::vector<CauchyState>& snapshots, double speed,
                                    std::pair<double, double> window, const PeriodOptions& opt = {}) {
  if (snapshots.size() < 3) throw std::invalid_argument("detect_period: need at least 3 snapshots");
  if (!(window.first < window.second)) throw std::invalid_argument("detect_period: empty window");
  std::vector<const CauchyState*> snaps;
  for (const auto& s : snapshots) snaps.push_back(&s);
  std::sort(snaps.begin(), snaps.end(), [](auto* a, auto* b) { return a->t < b->t; });
  const double dt = snaps[1]->t - snaps[0]->t;
  if (!(dt > 0.0)) throw std::invalid_argument("detect_period: snapshot times must be distinct");
  for (std::size_t i = 1; i < snaps.size(); ++i)
    if (std::abs((snaps[i]->t - snaps[i - 1]->t) - dt) > 1e-6 * dt)
      throw std::invalid_argument("detect_period: snapshots must be uniformly spaced in time");

  const std::size_t max_lag = snaps.size() >= 4 ? snaps.size() - 2 : snaps.size() - 1;
  PeriodEstimate est;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    auto f = [&](double s) { return detail::period_mismatch(snaps, lag, s, window.first, window.second); };
    // Coarse scan then golden-section refinement.
    constexpr int scan = 40;
    const double half = opt.shift_search / (snaps[lag]->t - snaps[0]->t);
    double best_s = speed, best_f = f(speed);
    for (int j = 0; j <= scan; ++j) {
      const double s = speed - half + 2.0 * half * j / scan;
      const double v = f(s);
      if (v < best_f) {
        best_f = v;
        best_s = s;
      }
    }
    double lo = best_s - 2.0 * half / scan, hi = best_s + 2.0 * half / scan;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        hi = x2; x2 = x1; f2 = f1; x1 = hi - g * (hi - lo); f1 = f(x1);
      } else {
        lo = x1; x1 = x2; f1 = f2; x2 = lo + g * (hi - lo); f2 = f(x2);
      }
    }
    const double s_ref = f1 < f2 ? x1 : x2;
    const double f_ref = std::min(f1, f2);
    if (f_ref < best_f) {
      best_f = f_ref;
      best_s = s_ref;
    }
    est.candidate_periods.push_back(snaps[lag]->t - snaps[0]->t);
    est.candidate_mismatch.push_back(best_f);
    est.candidate_speeds.push_back(best_s);
  }

  const auto& m = est.candidate_mismatch;
  const std::size_t K = m.size();
  const std::size_t arg_best = static_cast<std::size_t>(std::min_element(m.begin(), m.end()) - m.begin());
  est.mismatch = m[arg_best];
  est.shift_speed = est.candidate_speeds[arg_best];

  if (*std::max_element(m.begin(), m.end()) < opt.traveling_tolerance) {
    est.classification = PeriodEstimate::Classification::traveling_wave;
    return est;
  }
  std::vector<double> sorted = m;
  std::sort(sorted.begin(), sorted.end());
  const double median = K % 2 ? sorted[K / 2] : 0.5 * (sorted[K / 2 - 1] + sorted[K / 2]);
  for (std::size_t k = 1; k + 1 < K; ++k) {
    if (m[k] < m[k - 1] && m[k] < m[k + 1] && m[k] < opt.pulsating_tolerance && opt.median_ratio * m[k] <= median) {
      est.period = est.candidate_periods[k];
      est.mismatch = m[k];
      est.shift_speed = est.candidate_speeds[k];
      est.classification = PeriodEstimate::Classification::pulsating_front;
      return est;
    }
  }
  return est;
}

/// Wake window [front - 40, front - 5] at the first snapshot.
inline std::pair<double, double> default_period_window(const std::vector<CauchyState>& snapshots, double level) {
  const auto first = std::min_element(snapshots.begin(), snapshots.end(),
                                      [](const auto& a, const auto& b) { return a.t < b.t; });
  const auto x = front_position(first->u, level);
  if (!x) throw std::runtime_error("default_period_window: no front in the first snapshot");
  return {*x - 40.0, *x - 5.0};
}

}  // namespace ksfkpp
