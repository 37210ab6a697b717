// Front speeds for the fig1 setup and the slab speed, side by side.
// Usage: demo_fronts [output_dir]
#include <cstdio>
#include <filesystem>

#include "ksfkpp/ksfkpp.hpp"

using namespace ksfkpp;

int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "demo_out";
  std::printf("%6s %10s %10s %16s\n", "chi", "cauchy c", "slab c", "wake");
  for (double chi : {1.0, 3.0, 4.0, 5.0}) {
    RunConfig c = RunConfig::fig1(chi);
    c.t_max = 38;
    c.snapshot_times.clear();
    for (int t = 10; t <= 38; ++t) c.snapshot_times.push_back(t);
    const RunResult r = run(c);
    const double speed = measure_speed(r, c, 10, 30).speed;
    std::vector<CauchyState> late(r.snapshots.end() - 15, r.snapshots.end());
    const auto sp = track_front(late, c.level, c.fallback_level);
    const auto p = detect_period(late, sp.speed, default_period_window(late, sp.level));

    SlabConfig sc;
    sc.params = {chi, 1.0};
    const SlabSolution s = solve_slab(sc);
    std::printf("%6g %10.4f %10.4f %16s\n", chi, speed, s.c, to_string(p.classification));

    char name[32];
    std::snprintf(name, sizeof name, "chi_%g", chi);
    auto os = io::open_out(out / name / "snapshots.csv");
    io::write_snapshots_csv(os, r.snapshots);
    auto os2 = io::open_out(out / name / "slab.csv");
    io::write_slab_csv(os2, s);
  }
  std::printf("CSV written under %s\n", out.string().c_str());
}
