#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path root = KSFKPP_SCRATCH;

struct Result {
  int code;
  std::string out;
};

Result cli(const std::string& args) {
  fs::create_directories(root);
  const fs::path log = root / "stdout.txt";
  const std::string cmd = std::string(KSFKPP_CLI) + " " + args + " > " + log.string() + " 2>" +
                          (root / "stderr.txt").string();
  const int st = std::system(cmd.c_str());
  std::ifstream is(log);
  std::stringstream ss;
  ss << is.rdbuf();
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, ss.str()};
}

fs::path dir(const std::string& name) {
  const fs::path p = root / name;
  fs::remove_all(p);
  return p;
}

json meta(const fs::path& d) {
  std::ifstream is(d / "metadata.json");
  return json::parse(is);
}

}  // namespace

TEST(Cli, SimulateFig1) {
  const auto out = dir("sim1");
  const auto r = cli("simulate --preset fig1 --chi 1 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const json m = meta(out);
  EXPECT_NEAR(m["speed"]["speed"].get<double>(), 1.90, 0.05);
  EXPECT_EQ(m["config"]["params"]["d"].get<double>(), 1.0);
  EXPECT_NEAR(m["config"]["dt"].get<double>(), 0.004, 1e-15);
  EXPECT_EQ(m["config"]["grid"]["n"].get<int>(), 601);
  EXPECT_EQ(m["config"]["initial"]["name"], "gaussian_plateau");
  EXPECT_EQ(m["config"]["snapshot_times"], json({10.0, 15.0, 20.0, 25.0, 30.0}));
  EXPECT_EQ(m["config"]["level"].get<double>(), 0.5);
  EXPECT_EQ(m["config"]["fallback_level"].get<double>(), 0.4);
  EXPECT_TRUE(m.contains("version"));
  EXPECT_TRUE(fs::exists(out / "snapshots.csv"));
  std::ifstream is(out / "snapshots.csv");
  std::string head;
  std::getline(is, head);
  EXPECT_EQ(head, "t,x,u,v");
}

TEST(Cli, SimulatePeriod) {
  const auto out = dir("sim5");
  const auto r = cli("simulate --chi 5 --preset fig1 --snapshots 24:1:38 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const json m = meta(out);
  ASSERT_TRUE(m.contains("period"));
  EXPECT_EQ(m["period"]["classification"], "pulsating_front");
  EXPECT_NEAR(m["period"]["period"].get<double>(), 3.0, 0.5);
}

TEST(Cli, SimulateRejectsLargeDt) {
  EXPECT_EQ(cli("simulate --dt 1.0 --dx 0.2 --out " + dir("bad").string()).code, 2);
  EXPECT_EQ(cli("simulate --preset nope").code, 2);
  EXPECT_EQ(cli("simulate --chi abc").code, 2);
}

TEST(Cli, ConfigFile) {
  const auto out = dir("cfg");
  fs::create_directories(root);
  const fs::path cfg = root / "sim.ini";
  {
    std::ofstream os(cfg);
    os << "chi=2\nt-max=4\nsnapshots=1,2,3,4\n";
  }
  const auto r = cli("simulate --config " + cfg.string() + " --chi 1.5 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const json m = meta(out);
  EXPECT_EQ(m["config"]["params"]["chi"].get<double>(), 1.5);  // the flag wins
  EXPECT_EQ(m["config"]["t_max"].get<double>(), 4.0);
}

TEST(Cli, Slab) {
  const auto out = dir("slab0");
  const auto r = cli("slab --chi 0 --d 1 --a 40 --theta 0.1 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const json m = meta(out);
  const double c = m["solution"]["c"].get<double>();
  EXPECT_GE(c, 1.8);
  EXPECT_LE(c, 2.0);
  EXPECT_TRUE(fs::exists(out / "slab.csv"));
  EXPECT_TRUE(m.contains("identity"));
}

TEST(Cli, SlabLinfCheck) {
  const auto out = dir("slab5");
  const auto r = cli("slab --chi 0.5 --d 1 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const json m = meta(out);
  bool found = false;
  for (const auto& e : m["solution"]["diagnostics"]["entries"])
    if (e["name"] == "linf_bound") {
      found = true;
      EXPECT_TRUE(e["pass"].get<bool>());
      EXPECT_LE(e["value"].get<double>(), 2.0);
    }
  EXPECT_TRUE(found);
}

TEST(Cli, SlabBadTheta) { EXPECT_EQ(cli("slab --theta 0.3 --out " + dir("slab_bad").string()).code, 2); }

TEST(Cli, SlabNotConverged) {
  const auto out = dir("slab_nc");
  EXPECT_EQ(cli("slab --chi 0 --a 20 --n 401 --tol 1e-300 --out " + out.string()).code, 3);
  EXPECT_TRUE(fs::exists(out / "slab.csv"));
  EXPECT_TRUE(fs::exists(out / "metadata.json"));
}

TEST(Cli, Stability) {
  const auto r = cli("stability --chi 4 --d 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verdict=neutral"), std::string::npos);
  EXPECT_NE(r.out.find("chi_star=4"), std::string::npos);
}

TEST(Cli, SweepStability) {
  const auto out = dir("sweep");
  const auto r = cli("sweep --pipeline stability --chi 1,5 --d 1,4 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream is(out / "summary.csv");
  std::string line;
  int rows = -1;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_TRUE(fs::exists(out / "metadata.json"));
}

TEST(Cli, SweepParseFailure) {
  EXPECT_EQ(cli("sweep --chi ,, --d 1").code, 2);
  EXPECT_EQ(cli("sweep --pipeline bogus").code, 2);
}

TEST(Cli, Usage) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("--help").code, 0);
}
