// ksfkpp: command-line front end for the Cauchy runs, slab solver, sweeps,
// stability report and bifurcation scan.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <ksfkpp/ksfkpp.hpp>

namespace fs = std::filesystem;
using namespace ksfkpp;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_solver = 1;
constexpr int exit_usage = 2;
constexpr int exit_not_converged = 3;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size() || !std::isfinite(v))
      throw UsageError(std::string("--") + what + ": cannot parse '" + tok + "' in '" + s + "'");
    out.push_back(v);
  }
  if (out.empty() || (!s.empty() && s.back() == ','))
    throw UsageError(std::string("--") + what + ": empty list '" + s + "'");
  return out;
}

// a:b:c is start:step:stop; anything else is a comma list.
std::vector<double> parse_times(const std::string& s) {
  if (s.find(':') == std::string::npos) return parse_list(s, "snapshots");
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(parse_list(tok, "snapshots").at(0));
  if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0])
    throw UsageError("--snapshots: expected start:step:stop, got '" + s + "'");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
  for (long k = 0; k <= count; ++k) out.push_back(parts[0] + static_cast<double>(k) * parts[1]);
  return out;
}

void print_bounds(const BoundReport& r) {
  for (const auto& e : r.entries)
    std::printf("  %-15s value=%.6g bound=%.6g margin=%.6g %s\n", e.name.c_str(), e.value, e.bound, e.margin,
                e.asserted ? (e.pass ? "pass" : "FAIL") : "report");
}

struct SimulateFlags {
  std::string preset = "fig1";
  std::optional<double> chi, d, dx, dt, x_max, t_max, level, fallback, center, t_lo, t_hi;
  std::optional<std::string> snapshots, initial;
  std::string out = "simulate_out";
};

RunConfig build_run_config(const SimulateFlags& f) {
  RunConfig c;
  if (f.preset == "fig1")
    c = RunConfig::fig1(f.chi.value_or(1.0));
  else if (f.preset == "fig2")
    c = RunConfig::fig2(f.chi.value_or(5.0));
  else
    throw UsageError("--preset: unknown preset '" + f.preset + "'");
  if (f.chi) c.params.chi = *f.chi;
  if (f.d) c.params.d = *f.d;
  const double x_max = f.x_max.value_or(c.grid.x_max());
  const double dx = f.dx.value_or(c.grid.dx());
  if (!(dx > 0.0) || !(x_max > dx)) throw UsageError("--dx/--x-max: need 0 < dx < x_max");
  c.grid = Grid1D::with_spacing(0.0, x_max, dx);
  c.dt = f.dt.value_or(f.dx ? dx * dx / 10.0 : c.dt);
  if (f.t_max) c.t_max = *f.t_max;
  if (f.snapshots) c.snapshot_times = parse_times(*f.snapshots);
  if (f.snapshots && !f.t_max && !c.snapshot_times.empty()) c.t_max = std::max(c.t_max, c.snapshot_times.back());
  if (f.level) c.level = *f.level;
  if (f.fallback) c.fallback_level = *f.fallback;
  if (f.initial) {
    if (*f.initial == "gaussian_plateau")
      c.initial.kind = InitialCondition::Kind::gaussian_plateau;
    else if (*f.initial == "heaviside")
      c.initial.kind = InitialCondition::Kind::heaviside;
    else
      throw UsageError("--initial: unknown initial condition '" + *f.initial + "'");
  }
  if (f.center) c.initial.center = *f.center;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

int cmd_simulate(const SimulateFlags& f) {
  const RunConfig c = build_run_config(f);
  const auto start = std::chrono::steady_clock::now();
  RunResult r;
  try {
    r = run(c);
  } catch (const BlowUpError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_solver;
  }
  CauchyAnalysisOptions ao;
  ao.t_lo = f.t_lo;
  ao.t_hi = f.t_hi;
  io::json meta = io::metadata("simulate");
  meta["preset"] = f.preset;
  meta["config"] = io::to_json(c);
  meta["warnings"] = r.warnings;
  meta["steps"] = r.steps;
  const fs::path out(f.out);
  {
    auto os = io::open_out(out / "snapshots.csv");
    io::write_snapshots_csv(os, r.snapshots);
  }
  {
    auto os = io::open_out(out / "fronts.csv");
    io::write_fronts_csv(os, r.fronts);
  }
  int code = exit_ok;
  try {
    const CauchyAnalysis a = analyze_cauchy(r, c, ao);
    meta["speed"] = io::to_json(a.speed);
    std::printf("speed=%.6f level=%g method=%s\n", a.speed.speed, a.speed.level, to_string(a.speed.method));
    if (a.period) {
      meta["period"] = io::to_json(*a.period);
      meta["period_window"] = {a.window->first, a.window->second};
      if (a.period->period)
        std::printf("classification=%s period=%g mismatch=%.4g\n", to_string(a.period->classification),
                    *a.period->period, a.period->mismatch);
      else
        std::printf("classification=%s mismatch=%.4g\n", to_string(a.period->classification), a.period->mismatch);
    }
    meta["bounds"] = io::to_json(a.bounds);
    std::printf("bounds (last snapshot):\n");
    print_bounds(a.bounds);
  } catch (const std::exception& e) {
    meta["error"] = e.what();
    std::fprintf(stderr, "error: %s\n", e.what());
    code = exit_solver;
  }
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  meta["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_json(out / "metadata.json", meta);
  std::printf("wrote %s\n", out.string().c_str());
  return code;
}

struct SlabFlags {
  double chi = 0.0, d = 1.0, a = 40.0, theta = 0.1, tau = 1.0, damping = 0.5, tol = 1e-8;
  std::size_t n = 801, max_iters = 200;
  std::string out = "slab_out";
};

SlabConfig build_slab_config(const SlabFlags& f) {
  SlabConfig c;
  c.params = {f.chi, f.d};
  c.a = f.a;
  c.theta = f.theta;
  c.tau = f.tau;
  c.grid_n = f.n;
  c.damping = f.damping;
  c.max_iters = f.max_iters;
  c.tol = f.tol;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

int cmd_slab(const SlabFlags& f) {
  const SlabConfig c = build_slab_config(f);
  const auto start = std::chrono::steady_clock::now();
  const SlabSolution s = solve_slab(c);
  io::json meta = io::metadata("slab");
  meta["config"] = io::to_json(c);
  meta["solution"] = io::to_json(s);
  std::printf("c=%.8f residual=%.3e iterations=%zu status=%s\n", s.c, s.residual, s.iterations, s.status.c_str());
  if (c.tau == 1.0) {
    const IdentityCheck id = integral_identity_check(s, c);
    meta["identity"] = io::to_json(id);
    std::printf("identity lhs=%.8g rhs=%.8g gap=%.3e\n", id.lhs, id.rhs, id.gap);
  }
  print_bounds(s.diagnostics);
  meta["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const fs::path out(f.out);
  {
    auto os = io::open_out(out / "slab.csv");
    io::write_slab_csv(os, s);
  }
  io::write_json(out / "metadata.json", meta);
  std::printf("wrote %s\n", out.string().c_str());
  return s.converged ? exit_ok : exit_not_converged;
}

struct SweepFlags {
  std::string pipeline = "stability", chi = "1", d = "1", out = "sweep_out", preset = "fig1";
  std::size_t workers = 0;
  SlabFlags slab;
};

int cmd_sweep(const SweepFlags& f) {
  SweepSpec spec;
  try {
    spec.pipeline = parse_pipeline(f.pipeline);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  spec.chi_values = parse_list(f.chi, "chi");
  spec.d_values = parse_list(f.d, "d");
  spec.output_dir = f.out;
  spec.workers = f.workers;
  SimulateFlags sim;
  sim.preset = f.preset;
  spec.cauchy_base = build_run_config(sim);
  SlabFlags sl = f.slab;
  sl.chi = 0.0;
  sl.d = 1.0;
  spec.slab_base = build_slab_config(sl);
  const auto start = std::chrono::steady_clock::now();
  const auto rows = run_sweep(spec);
  io::json meta = io::metadata("sweep");
  meta["pipeline"] = f.pipeline;
  meta["chi_values"] = spec.chi_values;
  meta["d_values"] = spec.d_values;
  if (spec.pipeline == Pipeline::cauchy) meta["base_config"] = io::to_json(spec.cauchy_base);
  if (spec.pipeline == Pipeline::slab) meta["base_config"] = io::to_json(spec.slab_base);
  meta["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_json(spec.output_dir / "metadata.json", meta);
  std::size_t failed = 0;
  write_summary_csv(std::cout, rows, spec.pipeline);
  for (const auto& r : rows)
    if (r.status != "ok") {
      ++failed;
      std::fprintf(stderr, "point chi=%g d=%g %s: %s\n", r.chi, r.d, r.status.c_str(), r.error.c_str());
    }
  return failed == 0 ? exit_ok : exit_solver;
}

int cmd_stability(double chi, double d) {
  const Params p{chi, d};
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const StabilityReport r = stability_report(p);
  std::printf("verdict=%s chi_star=%.17g lambda_max=%.17g k_star=%.17g\n", to_string(r.verdict), r.chi_star,
              r.lambda_max, r.k_star);
  return exit_ok;
}

struct BifurcationFlags {
  std::string d = "1";
  double chi_lo = 3.0, chi_hi = 5.0, tol = 0.25;
  std::string out;
};

int cmd_bifurcation(const BifurcationFlags& f) {
  const auto ds = parse_list(f.d, "d");
  if (!(f.chi_lo < f.chi_hi) || !(f.tol > 0.0)) throw UsageError("need chi-lo < chi-hi and tol > 0");
  const auto start = std::chrono::steady_clock::now();
  std::vector<BifurcationPoint> pts;
  try {
    pts = bifurcation_scan(ds, {f.chi_lo, f.chi_hi}, f.tol);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_solver;
  }
  std::ostringstream csv;
  csv << "d,chi_crit,analytic,lo,hi,runs\n";
  for (const auto& p : pts)
    csv << format_real(p.d) << ',' << format_real(p.chi_crit) << ',' << format_real(p.analytic) << ','
        << format_real(p.lo) << ',' << format_real(p.hi) << ',' << p.runs << '\n';
  std::cout << csv.str();
  if (!f.out.empty()) {
    const fs::path out(f.out);
    {
      auto os = io::open_out(out / "bifurcation.csv");
      os << csv.str();
    }
    io::json meta = io::metadata("bifurcation");
    meta["d_values"] = ds;
    meta["chi_range"] = {f.chi_lo, f.chi_hi};
    meta["tol"] = f.tol;
    io::json trace = io::json::array();
    for (const auto& p : pts)
      for (const auto& [chi, cl] : p.trace) trace.push_back({{"d", p.d}, {"chi", chi}, {"classification", cl}});
    meta["trace"] = trace;
    meta["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    io::write_json(out / "metadata.json", meta);
  }
  return exit_ok;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  std::string t = s.substr(b, e - b + 1);
  if (t.size() >= 2 && (t.front() == '"' || t.front() == '\'') && t.back() == t.front()) t = t.substr(1, t.size() - 2);
  return t;
}

// Replaces `--config FILE` with the file's key=value pairs as flags, placed
// right after the subcommand so later flags on the command line win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string file;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (file.empty()) return args;
  std::ifstream is(file);
  if (!is) throw UsageError("--config: cannot read '" + file + "'");
  std::vector<std::string> flags;
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("--config: expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    for (char& ch : key)
      if (ch == '_') ch = '-';
    flags.push_back("--" + key);
    flags.push_back(trim(line.substr(eq + 1)));
  }
  args.insert(args.begin() + 1, flags.begin(), flags.end());
  return args;
}

void add_slab_options(CLI::App* s, SlabFlags& f, bool params) {
  if (params) {
    s->add_option("--chi", f.chi, "chemotactic sensitivity");
    s->add_option("--d", f.d, "signal diffusivity");
  }
  s->add_option("--a", f.a, "slab half-length");
  s->add_option("--theta", f.theta, "normalisation level, in (0, 1/4)");
  s->add_option("--tau", f.tau, "homotopy parameter");
  s->add_option("--n", f.n, "grid nodes (odd)");
  s->add_option("--damping", f.damping, "fixed-point damping");
  s->add_option("--max-iters", f.max_iters, "fixed-point iteration cap");
  s->add_option("--tol", f.tol, "residual tolerance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keller-Segel-FKPP front lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_file;

  SimulateFlags sim;
  auto* s_sim = app.add_subcommand("simulate", "explicit run of the Cauchy problem");
  s_sim->add_option("--config", config_file, "flat key=value file; flags override it");
  s_sim->add_option("--preset", sim.preset, "fig1 or fig2");
  s_sim->add_option("--chi", sim.chi);
  s_sim->add_option("--d", sim.d);
  s_sim->add_option("--dx", sim.dx);
  s_sim->add_option("--dt", sim.dt, "time step (default dx^2/10)");
  s_sim->add_option("--x-max", sim.x_max, "right end of the domain [0, x_max]");
  s_sim->add_option("--t-max", sim.t_max);
  s_sim->add_option("--snapshots", sim.snapshots, "start:step:stop or comma list");
  s_sim->add_option("--level", sim.level);
  s_sim->add_option("--fallback-level", sim.fallback);
  s_sim->add_option("--initial", sim.initial, "gaussian_plateau or heaviside");
  s_sim->add_option("--center", sim.center, "plateau edge / jump location");
  s_sim->add_option("--t-lo", sim.t_lo, "speed window start");
  s_sim->add_option("--t-hi", sim.t_hi, "speed window end");
  s_sim->add_option("--out", sim.out, "output directory");

  SlabFlags slab;
  auto* s_slab = app.add_subcommand("slab", "traveling wave on [-a, a]");
  s_slab->add_option("--config", config_file, "flat key=value file; flags override it");
  add_slab_options(s_slab, slab, true);
  s_slab->add_option("--out", slab.out, "output directory");

  SweepFlags sw;
  auto* s_sw = app.add_subcommand("sweep", "Cartesian sweep over chi and d");
  s_sw->add_option("--config", config_file, "flat key=value file; flags override it");
  s_sw->add_option("--pipeline", sw.pipeline, "cauchy, slab or stability");
  s_sw->add_option("--chi", sw.chi, "comma list");
  s_sw->add_option("--d", sw.d, "comma list");
  s_sw->add_option("--preset", sw.preset, "base config for the cauchy pipeline");
  s_sw->add_option("--workers", sw.workers, "parallel points (0: all cores)");
  s_sw->add_option("--out", sw.out, "output directory");
  add_slab_options(s_sw, sw.slab, false);

  double st_chi = 4.0, st_d = 1.0;
  auto* s_st = app.add_subcommand("stability", "linear stability of u = 1");
  s_st->add_option("--config", config_file, "flat key=value file; flags override it");
  s_st->add_option("--chi", st_chi);
  s_st->add_option("--d", st_d);

  BifurcationFlags bf;
  auto* s_bf = app.add_subcommand("bifurcation", "bisection on the pulsating-front classification");
  s_bf->add_option("--config", config_file, "flat key=value file; flags override it");
  s_bf->add_option("--d", bf.d, "comma list");
  s_bf->add_option("--chi-lo", bf.chi_lo);
  s_bf->add_option("--chi-hi", bf.chi_hi);
  s_bf->add_option("--tol", bf.tol);
  s_bf->add_option("--out", bf.out, "output directory (optional)");

  try {
    std::vector<std::string> args;
    try {
      args = expand_config(argc, argv);
    } catch (const UsageError& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return exit_usage;
    }
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*s_sim) return cmd_simulate(sim);
    if (*s_slab) return cmd_slab(slab);
    if (*s_sw) return cmd_sweep(sw);
    if (*s_st) return cmd_stability(st_chi, st_d);
    if (*s_bf) return cmd_bifurcation(bf);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n\n%s", e.what(), app.help().c_str());
    return exit_usage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_solver;
  }
  return exit_usage;
}
