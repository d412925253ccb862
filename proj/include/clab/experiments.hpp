#pragma once
// Config-driven experiment runner behind the command line tool. One JSON document in,
// a CSV table, a JSON summary and a plot-data file out.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clab/verify.hpp"

namespace clab {

// Anything wrong with the config or the files: maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string kind;   // curvature | cheeger | collapse | singular-collapse | gh | groupoid | verify-all
  std::string name;   // output file stem, defaults to kind
  std::uint64_t seed = 0;
  double budget_scale = 1.0;
  std::string text;   // the validated document, echoed into the summary
};

// Parses and validates: known kind, seed present, schedules nonempty and in range,
// budgets positive, no unknown keys. Throws ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct RunReport {
  RunConfig config;
  Table table;                   // one row per sample / parameter
  std::vector<VerifyRow> verdicts;
  std::string plot_header;       // column names for the plot file
  std::vector<std::vector<double>> plot;
  double seconds = 0;
  bool pass() const;
};

RunReport run_experiment(const RunConfig& c);

std::string to_csv(const Table& t);
std::string summary_json(const RunReport& r);  // config echo, verdicts, wall clock
std::string plot_data(const RunReport& r);     // '#' header line, whitespace columns

// Writes <dir>/<name>.csv, .json and .plot.txt. Throws ConfigError on IO failure.
std::vector<std::string> write_outputs(const RunReport& r, const std::string& dir);

}  // namespace clab
