// Parameter sweeps over (chi, d), the empirical bifurcation scan and the
// summary CSV.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "analysis.hpp"
#include "cauchy.hpp"
#include "front_metrics.hpp"
#include "io.hpp"
#include "slab.hpp"

namespace ksfkpp {

enum class Pipeline { cauchy, slab, stability };

inline const char* to_string(Pipeline p) {
  switch (p) {
    case Pipeline::cauchy: return "cauchy";
    case Pipeline::slab: return "slab";
    default: return "stability";
  }
}

inline Pipeline parse_pipeline(const std::string& s) {
  if (s == "cauchy") return Pipeline::cauchy;
  if (s == "slab") return Pipeline::slab;
  if (s == "stability") return Pipeline::stability;
  throw std::invalid_argument("unknown pipeline '" + s + "'");
}

/// Post-processing of one Cauchy run: speed, period and the bound report
/// on the last snapshot.
struct CauchyAnalysis {
  SpeedEstimate speed;
  std::optional<PeriodEstimate> period;
  std::optional<std::pair<double, double>> window;
  BoundReport bounds;
};

struct CauchyAnalysisOptions {
  std::optional<double> t_lo, t_hi;                          // speed window; default: all snapshots
  std::optional<std::pair<double, double>> period_window;     // default: default_period_window
  PeriodOptions period;
};

namespace detail {

inline bool uniform_times(const std::vector<CauchyState>& s) {
  if (s.size() < 3) return false;
  const double dt = s[1].t - s[0].t;
  if (!(dt > 0.0)) return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (std::abs((s[i].t - s[i - 1].t) - dt) > 1e-6 * dt) return false;
  return true;
}

}  // namespace detail

inline CauchyAnalysis analyze_cauchy(const RunResult& r, const RunConfig& c, const CauchyAnalysisOptions& opt = {}) {
  if (r.snapshots.size() < 2) throw std::invalid_argument("analyze_cauchy: need at least 2 snapshots");
  CauchyAnalysis a;
  const double lo = opt.t_lo.value_or(r.snapshots.front().t);
  const double hi = opt.t_hi.value_or(r.snapshots.back().t);
  a.speed = measure_speed(r, c, lo, hi);
  if (detail::uniform_times(r.snapshots)) {
    a.window = opt.period_window ? *opt.period_window : default_period_window(r.snapshots, a.speed.level);
    a.period = detect_period(r.snapshots, a.speed.speed, *a.window, opt.period);
  }
  const CauchyState& last = r.snapshots.back();
  a.bounds = bound_report(a.speed.speed, last.u, last.v, c.params);
  return a;
}

struct SweepSpec {
  std::vector<double> chi_values;
  std::vector<double> d_values;
  Pipeline pipeline = Pipeline::stability;
  RunConfig cauchy_base = RunConfig::fig1(1.0);
  SlabConfig slab_base;
  CauchyAnalysisOptions analysis;
  /// Optional per-point override of the period window.
  std::function<std::optional<std::pair<double, double>>(double chi, double d)> window_for;
  std::filesystem::path output_dir = "sweep_out";
  std::size_t workers = 0;  // 0: hardware concurrency

  void validate() const {
    if (chi_values.empty() || d_values.empty()) throw std::invalid_argument("SweepSpec: empty parameter list");
    for (double v : chi_values)
      if (!std::isfinite(v)) throw std::invalid_argument("SweepSpec: non-finite chi");
    for (double v : d_values)
      if (!std::isfinite(v) || !(v > 0.0)) throw std::invalid_argument("SweepSpec: d must be finite and > 0");
  }
};

struct SweepRecord {
  double chi = 0.0;
  double d = 0.0;
  std::string status = "ok";   // ok, not_converged, failed
  std::string error;
  std::optional<double> speed;
  std::optional<double> period;
  std::string classification;
  double lambda_max = 0.0;
  std::size_t bound_failures = 0;
  std::string artifact_dir;    // relative to output_dir
  std::vector<std::string> artifact_paths;
};

inline std::string point_dir_name(double chi, double d) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "chi_%g_d_%g", chi, d);
  return buf;
}

namespace detail {

inline SweepRecord run_point(const SweepSpec& spec, double chi, double d) {
  SweepRecord rec;
  rec.chi = chi;
  rec.d = d;
  rec.artifact_dir = point_dir_name(chi, d);
  const std::filesystem::path dir = spec.output_dir / rec.artifact_dir;
  io::json meta = io::metadata(std::string("sweep_point_") + to_string(spec.pipeline));
  meta["chi"] = chi;
  meta["d"] = d;
  auto add = [&](const std::string& name) {
    rec.artifact_paths.push_back((std::filesystem::path(rec.artifact_dir) / name).generic_string());
    return dir / name;
  };
  try {
    const Params p{chi, d};
    const StabilityReport st = stability_report(p);
    rec.lambda_max = st.lambda_max;
    meta["stability"] = io::to_json(st);
    switch (spec.pipeline) {
      case Pipeline::stability:
        rec.classification = to_string(st.verdict);
        break;
      case Pipeline::cauchy: {
        RunConfig c = spec.cauchy_base;
        c.params = p;
        meta["config"] = io::to_json(c);
        const RunResult r = run(c);
        {
          auto os = io::open_out(add("snapshots.csv"));
          io::write_snapshots_csv(os, r.snapshots);
        }
        {
          auto os = io::open_out(add("fronts.csv"));
          io::write_fronts_csv(os, r.fronts);
        }
        meta["warnings"] = r.warnings;
        CauchyAnalysisOptions ao = spec.analysis;
        if (spec.window_for)
          if (auto w = spec.window_for(chi, d)) ao.period_window = w;
        const CauchyAnalysis a = analyze_cauchy(r, c, ao);
        rec.speed = a.speed.speed;
        meta["speed"] = io::to_json(a.speed);
        if (a.period) {
          rec.period = a.period->period;
          rec.classification = to_string(a.period->classification);
          meta["period"] = io::to_json(*a.period);
        } else {
          rec.classification = "undetermined";
        }
        rec.bound_failures = a.bounds.failures();
        meta["bounds"] = io::to_json(a.bounds);
        break;
      }
      case Pipeline::slab: {
        SlabConfig c = spec.slab_base;
        c.params = p;
        meta["config"] = io::to_json(c);
        const SlabSolution s = solve_slab(c);
        {
          auto os = io::open_out(add("slab.csv"));
          io::write_slab_csv(os, s);
        }
        rec.speed = s.c;
        rec.classification = s.converged ? "traveling_wave" : "undetermined";
        rec.bound_failures = s.diagnostics.failures();
        if (!s.converged) rec.status = "not_converged";
        meta["solution"] = io::to_json(s);
        if (s.converged && c.tau == 1.0) meta["identity"] = io::to_json(integral_identity_check(s, c));
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.status = "failed";
    rec.error = e.what();
    meta["error"] = rec.error;
  }
  meta["status"] = rec.status;
  try {
    io::write_json(add("metadata.json"), meta);
  } catch (const std::exception& e) {
    rec.status = "failed";
    if (rec.error.empty()) rec.error = e.what();
  }
  return rec;
}

inline std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace detail

inline void write_summary_csv(std::ostream& os, const std::vector<SweepRecord>& rows, Pipeline p) {
  os << "chi,d,pipeline,status,speed,period,classification,lambda_max,bound_failures,artifact_dir\n";
  for (const auto& r : rows)
    os << format_real(r.chi) << ',' << format_real(r.d) << ',' << to_string(p) << ',' << r.status << ','
       << detail::opt_real(r.speed) << ',' << detail::opt_real(r.period) << ',' << r.classification << ','
       << format_real(r.lambda_max) << ',' << r.bound_failures << ',' << r.artifact_dir << '\n';
}

/// Runs the chi-major Cartesian product.  Points are independent and run on
/// a small pool; rows are collected by index, so the summary order never
/// depends on completion order.
inline std::vector<SweepRecord> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<std::pair<double, double>> points;
  for (double chi : spec.chi_values)
    for (double d : spec.d_values) points.emplace_back(chi, d);
  std::filesystem::create_directories(spec.output_dir);

  std::vector<SweepRecord> rows(points.size());
  std::size_t workers = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, points.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) rows[i] = detail::run_point(spec, points[i].first, points[i].second);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i = next++; i < points.size(); i = next++)
          rows[i] = detail::run_point(spec, points[i].first, points[i].second);
      }));
    for (auto& f : pool) f.get();
  }
  auto os = io::open_out(spec.output_dir / "summary.csv");
  write_summary_csv(os, rows, spec.pipeline);
  return rows;
}

struct BifurcationPoint {
  double d = 0.0;
  double chi_crit = 0.0;
  double analytic = 0.0;     // (1 + sqrt d)^2
  double lo = 0.0, hi = 0.0; // final bracket
  std::size_t runs = 0;
  std::vector<std::pair<double, std::string>> trace;  // (chi, classification)
};

struct BifurcationOptions {
  RunConfig base = RunConfig::fig2(5.0);
  double window_length = 15.0;   // classification uses the last 15 time units
  PeriodOptions period;
};

/// Classification of the Cauchy run at (chi, d) from integer-time snapshots
/// over the final window_length time units.
inline PeriodEstimate::Classification classify_wake(double chi, double d, const BifurcationOptions& opt) {
  RunConfig c = opt.base;
  c.params = {chi, d};
  c.snapshot_times.clear();
  const double t0 = c.t_max - opt.window_length + 1.0;
  for (double t = std::ceil(t0 - 1e-9); t <= c.t_max + 1e-9; t += 1.0) c.snapshot_times.push_back(t);
  const RunResult r = run(c);
  const SpeedEstimate s = measure_speed(r, c, r.snapshots.front().t, r.snapshots.back().t);
  const PeriodEstimate p = detect_period(r.snapshots, s.speed, default_period_window(r.snapshots, s.level), opt.period);
  return p.classification;
}

/// Bisection in chi on "pulsating_front" for every d.  The lower end of the
/// range must classify otherwise and the upper end must classify pulsating.
inline std::vector<BifurcationPoint> bifurcation_scan(const std::vector<double>& d_values,
                                                      std::pair<double, double> chi_range, double tol = 0.25,
                                                      const BifurcationOptions& opt = {}) {
  if (!(chi_range.first < chi_range.second)) throw std::invalid_argument("bifurcation_scan: empty chi range");
  if (!(tol > 0.0)) throw std::invalid_argument("bifurcation_scan: tol must be > 0");
  using C = PeriodEstimate::Classification;
  std::vector<BifurcationPoint> out;
  for (double d : d_values) {
    BifurcationPoint bp;
    bp.d = d;
    bp.analytic = (1.0 + std::sqrt(d)) * (1.0 + std::sqrt(d));
    auto probe = [&](double chi) {
      const C cl = classify_wake(chi, d, opt);
      ++bp.runs;
      bp.trace.emplace_back(chi, to_string(cl));
      return cl == C::pulsating_front;
    };
    double lo = chi_range.first, hi = chi_range.second;
    if (probe(lo) || !probe(hi))
      throw std::runtime_error("bifurcation_scan: range [" + format_real(lo) + ", " + format_real(hi) +
                               "] does not bracket the transition at d = " + format_real(d));
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (probe(mid) ? hi : lo) = mid;
    }
    bp.lo = lo;
    bp.hi = hi;
    bp.chi_crit = 0.5 * (lo + hi);
    out.push_back(std::move(bp));
  }
  return out;
}

}  // namespace ksfkpp
