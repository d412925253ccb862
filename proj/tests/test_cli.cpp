#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "clab/experiments.hpp"

using namespace clab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("clab-cli-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const fs::path& cfg, const fs::path& out, const std::string& extra = "") {
  std::string cmd = std::string(CLAB_CLI) + " run " + cfg.string() + " --out " + out.string() + " " + extra +
                    " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& body) {
  fs::path p = dir / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(parse_config(R"({"experiment":"curvature","seed":1})"));
  CHECK_THROWS_AS(parse_config(R"({"experiment":"curvature"})"), ConfigError);             // no seed
  CHECK_THROWS_AS(parse_config(R"({"experiment":"warp","seed":1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment":"curvature","seed":1,"pionts":3})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment":"curvature","seed":1,"tolerances":{"nope":1}})"), ConfigError);
  // schedules are checked when the experiment reads them
  for (const char* s : {R"({"experiment":"collapse","seed":1,"deltas":[]})",
                        R"({"experiment":"collapse","seed":1,"deltas":[1,"x"]})",
                        R"({"experiment":"collapse","seed":1,"deltas":[2]})",
                        R"({"experiment":"singular-collapse","seed":1,"deltas":[0.5]})",
                        R"({"experiment":"cheeger","seed":1,"t":[-1]})",
                        R"({"experiment":"curvature","seed":1,"points":0})"})
    CHECK_THROWS_AS(run_experiment(parse_config(s)), ConfigError);
}

TEST_CASE("curvature run on the round sphere") {
  RunReport r = run_experiment(parse_config(R"({"experiment":"curvature","seed":1,"manifold":"s3-round"})"));
  CHECK(r.table.rows.size() == 500);
  CHECK(r.pass());
  CHECK(plot_data(r).rfind("# sample K\n", 0) == 0);
}

TEST_CASE("groupoid run reports the flat fixture honestly") {
  RunReport r =
      run_experiment(parse_config(R"({"experiment":"groupoid","seed":1,"action":"t1-t2-translation","eps":[0.5]})"));
  CHECK_FALSE(r.pass());
  RunReport bad =
      run_experiment(parse_config(R"({"experiment":"groupoid","seed":1,"action":"s1-s2-left-on-target"})"));
  CHECK_FALSE(bad.pass());
  CHECK(bad.table.rows.empty());
}

TEST_CASE("exit codes and files") {
  fs::path dir = scratch("codes");
  fs::path good = write(dir, "good.json", R"({"experiment":"collapse","name":"c","seed":3,"deltas":[1,0.5,0.1,0.01]})");
  fs::path out = dir / "out";
  CHECK(cli(good, out) == 0);
  for (const char* f : {"c.csv", "c.json", "c.plot.txt"}) CHECK(fs::exists(out / f));
  CHECK(slurp(out / "c.plot.txt").rfind("# delta max_abs_K diameter volume\n", 0) == 0);

  // determinism: same config and seed give the same CSV bytes
  fs::path out2 = dir / "out2";
  CHECK(cli(good, out2) == 0);
  CHECK(slurp(out / "c.csv") == slurp(out2 / "c.csv"));

  fs::path failing = write(dir, "fail.json", R"({"experiment":"groupoid","name":"g","seed":1,"action":"s1-s2-identity"})");
  CHECK(cli(failing, dir / "out3") == 1);

  fs::path malformed = write(dir, "bad.json", R"({"experiment":"collapse","name":"m","seed":1,"deltas":[]})");
  CHECK(cli(malformed, dir / "out4") == 2);
  CHECK_FALSE(fs::exists(dir / "out4"));
  CHECK(cli(dir / "missing.json", dir / "out5") == 2);
  CHECK(cli(good, dir / "out6", "--budget-scale -1") == 2);
  CHECK_FALSE(fs::exists(dir / "out6"));
}

TEST_CASE("seed flag overrides the config") {
  fs::path dir = scratch("seed");
  fs::path cfg = write(dir, "k.json", R"({"experiment":"curvature","name":"k","seed":1,"points":10})");
  CHECK(cli(cfg, dir / "a") == 0);
  CHECK(cli(cfg, dir / "b", "--seed 99") == 0);
  CHECK(slurp(dir / "a" / "k.csv") != slurp(dir / "b" / "k.csv"));
  CHECK(slurp(dir / "b" / "k.json").find("\"seed\": 99") != std::string::npos);
}

TEST_CASE("verify-all verdicts do not depend on the seed at reduced budget") {
  auto verdicts = [](std::uint64_t seed) {
    VerifyOptions o;
    o.seed = seed;
    o.budget_scale = 0.1;
    o.determinism = false;
    std::vector<bool> v;
    for (const auto& c : verify_all(o).criteria) v.push_back(c.pass());
    return v;
  };
  std::vector<bool> a = verdicts(1), b = verdicts(2);
  CHECK(a == b);
  CHECK(std::count(a.begin(), a.end(), true) == 7);
}
