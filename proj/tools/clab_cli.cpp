// clab run <config.json> [--out DIR] [--seed N] [--budget-scale F]
// exit 0: every verdict passes, 1: some verdict fails, 2: config or IO error (no files written)
#include <iostream>

#include <CLI11.hpp>

#include "clab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"curvature and collapse experiments"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
  std::string config, out = ".";
  std::uint64_t seed = 0;
  double scale = 0;
  run->add_option("config", config, "config file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  auto* scale_opt = run->add_option("--budget-scale", scale, "multiply sample budgets by F");
  run->add_option("--out", out, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    clab::RunConfig c = clab::load_config(config);
    if (*seed_opt) c.seed = seed;
    if (*scale_opt) {
      if (!(scale > 0)) throw clab::ConfigError("--budget-scale must be > 0");
      c.budget_scale = scale;
    }
    clab::RunReport r = clab::run_experiment(c);
    for (const auto& f : clab::write_outputs(r, out)) std::cout << "wrote " << f << "\n";
    for (const auto& v : r.verdicts)
      if (!v.pass())
        std::cerr << "FAIL " << v.quantity << " [" << v.parameter << "] = " << clab::format_double(v.value)
                  << " outside [" << clab::format_double(v.lo) << ", " << clab::format_double(v.hi) << "]\n";
    std::cout << (r.pass() ? "PASS" : "FAIL") << " " << c.kind << " (" << r.verdicts.size() << " verdicts, "
              << r.seconds << " s)\n";
    return r.pass() ? 0 : 1;
  } catch (const clab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
