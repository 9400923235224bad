#ifndef SADDLE_EXPERIMENT_H_
#define SADDLE_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "saddle/problem.h"
#include "saddle/solvers.h"

namespace saddle {

using Json = nlohmann::json;

// Rejected experiment configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct OutputOptions {
  std::string dir = "out";
  int trace_every = 1;
  bool gap = false;
  int gap_budget = 200;
  bool timing = false;
};

// A validated experiment. `problem` holds the problem block with every
// default filled in; ToJson() of a parsed spec is the resolved config.
struct ExperimentSpec {
  Json problem;
  RunConfig run;
  std::optional<std::int64_t> oracle_budget;
  OutputOptions output;
  Json metadata = Json::object();
};

// Parses and validates a spec. Unknown keys anywhere are rejected. A
// summary.json is accepted too: its "resolved_config" block is used.
ExperimentSpec ParseExperimentSpec(const Json& j);
ExperimentSpec LoadExperimentSpec(const std::string& path);
Json ToJson(const ExperimentSpec& spec);

// Builds the problem described by a (resolved or partial) problem block.
ProblemInstance BuildProblem(const Json& problem_block);

// Per-run seed from the master seed, the solver name and the horizon.
std::uint64_t DeriveSeed(std::uint64_t master, const std::string& solver,
                         int horizon);

// Locale-independent shortest round-trip formatting.
std::string FormatDouble(double v);

inline constexpr const char* kTraceHeader =
    "k,oracle_calls,stationarity,grad_x_norm,primal_value,wall_ns,best_so_far";

std::string FormatTraceCsv(const std::vector<TraceRecord>& trace);

struct ExperimentResult {
  RunResult run;
  Json summary;
  int exit_code = 0;
};

// Runs one experiment and writes trace.csv and summary.json into out_dir.
// The trace is flushed even when the solver fails.
ExperimentResult RunExperiment(const ExperimentSpec& spec,
                               const std::filesystem::path& out_dir);

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> gap_budget;
};

// Command entry points. Return the process exit code: 0 success, 2 bad
// config, 3 solver divergence, 1 any other failure.
int CmdRun(const std::string& spec_path, const CliOverrides& overrides);
int CmdSweep(const std::string& spec_path, const std::vector<int>& horizons,
             const CliOverrides& overrides);
int CmdCompare(const std::string& spec_path,
               const std::vector<std::string>& solvers,
               const CliOverrides& overrides);

// Row-aligns traces on oracle calls: for every budget in the union of the
// traces' oracle_calls, each column holds best_so_far from the record with
// the nearest oracle count (ties go to the earlier record).
std::string FormatCompareCsv(const std::vector<std::string>& names,
                             const std::vector<std::vector<TraceRecord>>& traces);

}  // namespace saddle

#endif  // SADDLE_EXPERIMENT_H_
