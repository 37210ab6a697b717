// CSV artifacts and JSON metadata for runs, slab solutions and sweeps.
#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "analysis.hpp"
#include "cauchy.hpp"
#include "core.hpp"
#include "front_metrics.hpp"
#include "slab.hpp"
#include "version.hpp"

namespace ksfkpp::io {

using json = nlohmann::ordered_json;

// nlohmann writes non-finite numbers as null; keep them readable instead.
inline json real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline json to_json(const Params& p) { return {{"chi", p.chi}, {"d", p.d}}; }

inline json to_json(const Grid1D& g) {
  return {{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"n", g.n()}, {"dx", g.dx()}};
}

inline json to_json(const InitialCondition& ic) {
  json j{{"name", ic.name()}, {"center", ic.center}};
  if (ic.kind == InitialCondition::Kind::cosine_perturbation || ic.kind == InitialCondition::Kind::constant)
    j["base"] = ic.base;
  if (ic.kind == InitialCondition::Kind::cosine_perturbation) {
    j["amplitude"] = ic.amplitude;
    j["wavenumber"] = ic.wavenumber;
  }
  return j;
}

inline json to_json(const RunConfig& c) {
  return {{"params", to_json(c.params)},
          {"grid", to_json(c.grid)},
          {"dt", c.dt},
          {"t_max", c.t_max},
          {"snapshot_times", c.snapshot_times},
          {"initial", to_json(c.initial)},
          {"level", c.level},
          {"fallback_level", c.fallback_level},
          {"advection", c.options.advection},
          {"reaction", c.options.reaction}};
}

inline json to_json(const SlabConfig& c) {
  return {{"params", to_json(c.params)}, {"a", c.a},         {"theta", c.theta},
          {"tau", c.tau},                {"grid_n", c.grid_n}, {"damping", c.damping},
          {"max_iters", c.max_iters},    {"tol", c.tol}};
}

inline json to_json(const BoundReport& r) {
  json arr = json::array();
  for (const auto& e : r.entries)
    arr.push_back({{"name", e.name},
                   {"value", real(e.value)},
                   {"bound", real(e.bound)},
                   {"margin", real(e.margin)},
                   {"pass", e.pass},
                   {"asserted", e.asserted}});
  return {{"entries", arr}, {"failures", r.failures()}};
}

inline json to_json(const SpeedEstimate& s) {
  json pos = json::array();
  for (const auto& [t, x] : s.positions) pos.push_back({t, x});
  return {{"level", s.level},
          {"method", to_string(s.method)},
          {"speed", s.speed},
          {"endpoint_speed", s.endpoint_speed},
          {"least_squares_speed", s.least_squares_speed},
          {"positions", pos}};
}

inline json to_json(const PeriodEstimate& p) {
  return {{"classification", to_string(p.classification)},
          {"period", p.period ? json(*p.period) : json(nullptr)},
          {"shift_speed", p.shift_speed},
          {"mismatch", p.mismatch},
          {"candidate_periods", p.candidate_periods},
          {"candidate_mismatch", p.candidate_mismatch},
          {"candidate_speeds", p.candidate_speeds}};
}

inline json to_json(const StabilityReport& r) {
  return {{"chi_star", r.chi_star}, {"lambda_max", r.lambda_max}, {"k_star", r.k_star}, {"verdict", to_string(r.verdict)}};
}

inline json to_json(const IdentityCheck& c) { return {{"lhs", c.lhs}, {"rhs", c.rhs}, {"gap", c.gap}}; }

inline json to_json(const SlabSolution& s) {
  return {{"c", s.c},
          {"residual", s.residual},
          {"iterations", s.iterations},
          {"newton_iterations", s.newton_iterations},
          {"fixed_point_iterations", s.fixed_point_iterations},
          {"converged", s.converged},
          {"positive", s.positive},
          {"min_interior", s.min_interior},
          {"max_U", s.U.max()},
          {"status", s.status},
          {"diagnostics", to_json(s.diagnostics)}};
}

/// Skeleton shared by every metadata file.
inline json metadata(const std::string& kind) { return {{"kind", kind}, {"version", version}}; }

inline std::ofstream open_out(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return os;
}

inline void write_json(const std::filesystem::path& p, const json& j) {
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

/// Long format: one row per (snapshot, node).
inline void write_snapshots_csv(std::ostream& os, const std::vector<CauchyState>& snaps) {
  os << "t,x,u,v\n";
  for (const auto& s : snaps)
    for (std::size_t i = 0; i < s.u.size(); ++i)
      os << format_real(s.t) << ',' << format_real(s.u.grid.x(i)) << ',' << format_real(s.u[i]) << ','
         << format_real(s.v[i]) << '\n';
}

inline void write_fronts_csv(std::ostream& os, const std::vector<FrontRecord>& fronts) {
  os << "t,primary,fallback,primary_crossings\n";
  for (const auto& f : fronts)
    os << format_real(f.t) << ',' << (f.primary ? format_real(*f.primary) : "") << ','
       << (f.fallback ? format_real(*f.fallback) : "") << ',' << f.primary_crossings << '\n';
}

inline void write_slab_csv(std::ostream& os, const SlabSolution& s) {
  os << "x,U,V\n";
  for (std::size_t i = 0; i < s.U.size(); ++i)
    os << format_real(s.U.grid.x(i)) << ',' << format_real(s.U[i]) << ',' << format_real(s.V[i]) << '\n';
}

}  // namespace ksfkpp::io
