#include "saddle/experiment.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "saddle/problems/dro.h"
#include "saddle/problems/libsvm.h"
#include "saddle/problems/lqr.h"
#include "saddle/problems/synthetic.h"
#include "saddle/schedule.h"

namespace saddle {
namespace {

namespace fs = std::filesystem;

// Null defaults accept null or a number; other defaults fix the type.
Json ProblemDefaults(const std::string& kind) {
  if (kind == "synthetic") {
    return {{"kind", kind},        {"dim_x", 20},      {"dim_y", 10},
            {"mu", 0.5},           {"rank_deficiency", 0},
            {"coupling", 1.0},     {"seed", 1},        {"noise_x", 0.0},
            {"noise_y", 0.0},      {"noise_samples", 64},
            {"l_xx", nullptr},     {"l_xy", nullptr}};
  }
  if (kind == "dro") {
    return {{"kind", kind},         {"dataset", nullptr},
            {"n", 60},              {"d", 100},
            {"seed", 3},            {"flip_probability", 0.1},
            {"delta", 0.01},        {"radius", 100.0},
            {"mu", 0.1},            {"l_xx", nullptr},
            {"l_xy", nullptr}};
  }
  if (kind == "lqr") {
    return {{"kind", kind},          {"state_dim", 4},
            {"input_dim", 3},        {"seed", 1},
            {"alpha_q", 0.1},        {"beta_q", 100.0},
            {"alpha_r", 0.1},        {"beta_r", 100.0},
            {"open_loop_radius", 0.9}, {"n_samples", 0},
            {"regularizer", 0.0},    {"mu", 0.1},
            {"l_xx", 200.0},         {"l_xy", 100.0}};
  }
  throw ConfigError("problem.kind must be one of synthetic, dro, lqr (got '" +
                    kind + "')");
}

Json SolverDefaults() {
  return {{"name", "pdm"},       {"horizon", 100},
          {"batch_size", 0},     {"sampling", "uniform"},
          {"seed", 0},           {"schedule", Json::object()},
          {"oracle_budget", nullptr}};
}

Json ScheduleDefaults() {
  return {{"alpha", nullptr},          {"gamma", nullptr},
          {"lambda", nullptr},         {"sigma", nullptr},
          {"gamma_rule", "window_top"}, {"lambda_rule", "half_inverse_lxx"},
          {"sigma_rule", "standard"}};
}

Json OutputDefaults() {
  return {{"dir", "out"},      {"trace_every", 1}, {"gap", false},
          {"gap_budget", 200}, {"timing", false}};
}

// Overlays `in` on `defaults`, rejecting unknown keys and type changes.
Json Merge(const Json& defaults, const Json& in, const std::string& where) {
  if (!in.is_object()) throw ConfigError(where + " must be a JSON object");
  Json out = defaults;
  for (const auto& [key, value] : in.items()) {
    if (!defaults.contains(key)) {
      throw ConfigError("unknown key '" + where + "." + key + "'");
    }
    const Json& def = defaults.at(key);
    bool ok = true;
    if (def.is_null()) {
      ok = value.is_null() || value.is_number() || value.is_string();
    } else if (def.is_number_integer()) {
      ok = value.is_number_integer();
    } else if (def.is_number()) {
      ok = value.is_number();
    } else if (def.is_boolean()) {
      ok = value.is_boolean();
    } else if (def.is_string()) {
      ok = value.is_string();
    } else if (def.is_object()) {
      ok = value.is_object();
    }
    if (!ok) {
      throw ConfigError("key '" + where + "." + key + "' has the wrong type");
    }
    out[key] = value;
  }
  return out;
}

std::optional<double> OptionalNumber(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) {
    throw ConfigError(std::string("key '") + key + "' must be a number");
  }
  return v.get<double>();
}

Json ResolveProblem(const Json& in) {
  if (!in.is_object() || !in.contains("kind") || !in.at("kind").is_string()) {
    throw ConfigError("problem block needs a string 'kind'");
  }
  return Merge(ProblemDefaults(in.at("kind").get<std::string>()), in,
               "problem");
}

std::uint64_t Fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t Mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

Json NumberOrNull(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json ScheduleSummary(const ProblemInstance& problem, const RunConfig& cfg) {
  const Schedule s = MakeSchedule(problem.constants, cfg.horizon, cfg.schedule);
  Json j = {{"alpha_0", s.alpha(0)},
            {"gamma_0", s.gamma(0)},
            {"lambda_0", s.lambda(0)},
            {"sigma_0", s.sigma(0)},
            {"gamma_rule", ToString(cfg.schedule.gamma_rule)},
            {"lambda_rule", ToString(cfg.schedule.lambda_rule)},
            {"sigma_rule", ToString(cfg.schedule.sigma_rule)}};
  bool window = true;
  for (int k = 0; k < s.horizon(); ++k) window = window && s.InGammaWindow(k);
  j["in_gamma_window"] = window;
  double min_c = std::numeric_limits<double>::infinity();
  try {
    for (int k = 0; k < s.horizon(); ++k) {
      min_c = std::min(min_c, CCoefficient(s, problem.constants, k));
    }
    j["min_c_k"] = NumberOrNull(min_c);
  } catch (const ScheduleError&) {
    j["min_c_k"] = nullptr;
  }
  return j;
}

ExperimentSpec ApplyOverrides(ExperimentSpec spec, const CliOverrides& o) {
  if (o.seed) spec.run.seed = *o.seed;
  if (o.out_dir) spec.output.dir = *o.out_dir;
  if (o.gap_budget) {
    spec.output.gap = true;
    spec.output.gap_budget = *o.gap_budget;
  }
  return spec;
}

// Maps exceptions to exit codes around a command body.
template <typename Body>
int Guarded(Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "solver diverged: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

ExperimentSpec ParseExperimentSpec(const Json& root) {
  if (!root.is_object()) throw ConfigError("spec must be a JSON object");
  if (root.contains("resolved_config")) {
    return ParseExperimentSpec(root.at("resolved_config"));
  }
  for (const auto& [key, value] : root.items()) {
    if (key != "problem" && key != "solver" && key != "output" &&
        key != "metadata") {
      throw ConfigError("unknown top-level key '" + key + "'");
    }
  }
  if (!root.contains("problem")) throw ConfigError("spec needs a 'problem'");

  ExperimentSpec spec;
  spec.problem = ResolveProblem(root.at("problem"));

  const Json solver =
      Merge(SolverDefaults(), root.value("solver", Json::object()), "solver");
  const Json sched =
      Merge(ScheduleDefaults(), solver.at("schedule"), "solver.schedule");
  const Json output =
      Merge(OutputDefaults(), root.value("output", Json::object()), "output");
  if (root.contains("metadata")) {
    if (!root.at("metadata").is_object()) {
      throw ConfigError("metadata must be a JSON object");
    }
    spec.metadata = root.at("metadata");
  }

  try {
    RunConfig& run = spec.run;
    run.solver = ParseSolverKind(solver.at("name").get<std::string>());
    run.horizon = solver.at("horizon").get<int>();
    run.batch_size = solver.at("batch_size").get<int>();
    run.sampling = ParseSampling(solver.at("sampling").get<std::string>());
    if (solver.at("seed").is_number_unsigned()) {
      run.seed = solver.at("seed").get<std::uint64_t>();
    } else {
      const auto s = solver.at("seed").get<std::int64_t>();
      if (s < 0) throw ConfigError("solver.seed must be nonnegative");
      run.seed = static_cast<std::uint64_t>(s);
    }
    run.schedule.alpha = OptionalNumber(sched, "alpha");
    run.schedule.gamma = OptionalNumber(sched, "gamma");
    run.schedule.lambda = OptionalNumber(sched, "lambda");
    run.schedule.sigma = OptionalNumber(sched, "sigma");
    run.schedule.gamma_rule =
        ParseGammaRule(sched.at("gamma_rule").get<std::string>());
    run.schedule.lambda_rule =
        ParseLambdaRule(sched.at("lambda_rule").get<std::string>());
    run.schedule.sigma_rule =
        ParseSigmaRule(sched.at("sigma_rule").get<std::string>());
    if (!solver.at("oracle_budget").is_null()) {
      if (!solver.at("oracle_budget").is_number_integer()) {
        throw ConfigError("solver.oracle_budget must be an integer");
      }
      spec.oracle_budget = solver.at("oracle_budget").get<std::int64_t>();
      if (*spec.oracle_budget < 0) {
        throw ConfigError("solver.oracle_budget must be nonnegative");
      }
    }
    spec.output.dir = output.at("dir").get<std::string>();
    spec.output.trace_every = output.at("trace_every").get<int>();
    spec.output.gap = output.at("gap").get<bool>();
    spec.output.gap_budget = output.at("gap_budget").get<int>();
    spec.output.timing = output.at("timing").get<bool>();
    run.trace_every = spec.output.trace_every;
    run.record_wall_time = spec.output.timing;
    run.Validate();
    if (spec.output.gap_budget < 1) {
      throw ConfigError("output.gap_budget must be >= 1");
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

ExperimentSpec LoadExperimentSpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
  return ParseExperimentSpec(j);
}

Json ToJson(const ExperimentSpec& spec) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
  };
  const RunConfig& r = spec.run;
  Json solver = {
      {"name", ToString(r.solver)},
      {"horizon", r.horizon},
      {"batch_size", r.batch_size},
      {"sampling", ToString(r.sampling)},
      {"seed", r.seed},
      {"schedule",
       {{"alpha", opt(r.schedule.alpha)},
        {"gamma", opt(r.schedule.gamma)},
        {"lambda", opt(r.schedule.lambda)},
        {"sigma", opt(r.schedule.sigma)},
        {"gamma_rule", ToString(r.schedule.gamma_rule)},
        {"lambda_rule", ToString(r.schedule.lambda_rule)},
        {"sigma_rule", ToString(r.schedule.sigma_rule)}}},
      {"oracle_budget", spec.oracle_budget ? Json(*spec.oracle_budget)
                                           : Json(nullptr)}};
  Json output = {{"dir", spec.output.dir},
                 {"trace_every", spec.output.trace_every},
                 {"gap", spec.output.gap},
                 {"gap_budget", spec.output.gap_budget},
                 {"timing", spec.output.timing}};
  return {{"problem", spec.problem},
          {"solver", solver},
          {"output", output},
          {"metadata", spec.metadata}};
}

ProblemInstance BuildProblem(const Json& problem_block) {
  const Json p = ResolveProblem(problem_block);
  const std::string kind = p.at("kind").get<std::string>();
  try {
    ProblemInstance inst;
    if (kind == "synthetic") {
      SyntheticOptions o;
      o.dim_x = p.at("dim_x").get<int>();
      o.dim_y = p.at("dim_y").get<int>();
      o.mu = p.at("mu").get<double>();
      o.rank_deficiency = p.at("rank_deficiency").get<int>();
      o.coupling = p.at("coupling").get<double>();
      o.seed = p.at("seed").get<std::uint64_t>();
      o.noise_x = p.at("noise_x").get<double>();
      o.noise_y = p.at("noise_y").get<double>();
      o.noise_samples = p.at("noise_samples").get<int>();
      inst = MakeSynthetic(o);
      if (auto v = OptionalNumber(p, "l_xx")) inst.constants.l_xx = *v;
      if (auto v = OptionalNumber(p, "l_xy")) inst.constants.l_xy = *v;
    } else if (kind == "dro") {
      DroOptions o;
      o.delta = p.at("delta").get<double>();
      o.radius = p.at("radius").get<double>();
      o.mu = p.at("mu").get<double>();
      o.l_xx = OptionalNumber(p, "l_xx");
      o.l_xy = OptionalNumber(p, "l_xy");
      LibsvmData data;
      if (p.at("dataset").is_string()) {
        data = LoadLibsvm(p.at("dataset").get<std::string>());
      } else {
        data = MakeSyntheticClassification(
            p.at("n").get<int>(), p.at("d").get<int>(),
            p.at("seed").get<std::uint64_t>(),
            p.at("flip_probability").get<double>());
      }
      inst = MakeDro(data, o);
    } else {
      LqrOptions o;
      o.state_dim = p.at("state_dim").get<int>();
      o.input_dim = p.at("input_dim").get<int>();
      o.seed = p.at("seed").get<std::uint64_t>();
      o.alpha_q = p.at("alpha_q").get<double>();
      o.beta_q = p.at("beta_q").get<double>();
      o.alpha_r = p.at("alpha_r").get<double>();
      o.beta_r = p.at("beta_r").get<double>();
      o.open_loop_radius = p.at("open_loop_radius").get<double>();
      o.n_samples = p.at("n_samples").get<int>();
      o.regularizer = p.at("regularizer").get<double>();
      o.mu = p.at("mu").get<double>();
      o.l_xx = p.at("l_xx").get<double>();
      o.l_xy = p.at("l_xy").get<double>();
      inst = MakeLqrGail(o);
    }
    inst.Validate();
    return inst;
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

std::uint64_t DeriveSeed(std::uint64_t master, const std::string& solver,
                         int horizon) {
  std::uint64_t h = Mix(master);
  h = Mix(h ^ Fnv1a(solver));
  return Mix(h ^ static_cast<std::uint64_t>(horizon));
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string FormatTraceCsv(const std::vector<TraceRecord>& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& r : trace) {
    out += std::to_string(r.k);
    out += ',';
    out += std::to_string(r.oracle_calls);
    out += ',';
    out += FormatDouble(r.stationarity);
    out += ',';
    out += FormatDouble(r.grad_x_norm);
    out += ',';
    out += FormatDouble(r.primal_value);
    out += ',';
    out += std::to_string(r.wall_ns);
    out += ',';
    out += FormatDouble(r.best_so_far);
    out += '\n';
  }
  return out;
}

ExperimentResult RunExperiment(const ExperimentSpec& spec,
                               const fs::path& out_dir) {
  const ProblemInstance problem = BuildProblem(spec.problem);
  RunConfig cfg = spec.run;
  cfg.trace_every = spec.output.trace_every;
  cfg.record_wall_time = spec.output.timing;
  if (spec.oracle_budget) {
    const std::int64_t per_step =
        CallsPerStep(cfg.solver, cfg.EffectiveBatchSize(), cfg.sampling);
    cfg.horizon = static_cast<int>(*spec.oracle_budget / per_step);
  }
  const std::string solver_name = ToString(cfg.solver);
  cfg.seed = DeriveSeed(spec.run.seed, solver_name, cfg.horizon);

  ExperimentResult out;
  Json schedule;
  try {
    schedule = ScheduleSummary(problem, cfg);
    out.run = Run(problem, cfg);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  } catch (const ScheduleError& e) {
    throw ConfigError(e.what());
  }

  fs::create_directories(out_dir);
  WriteFile(out_dir / "trace.csv", FormatTraceCsv(out.run.trace));

  const RunResult& r = out.run;
  Json summary;
  summary["status"] = r.ok() ? "ok" : "diverged";
  summary["error"] = r.error ? Json(*r.error) : Json(nullptr);
  summary["error_iteration"] =
      r.ok() ? Json(nullptr) : Json(r.error_iteration);
  summary["solver"] = solver_name;
  summary["horizon"] = cfg.horizon;
  summary["run_seed"] = cfg.seed;
  summary["oracle_calls"] = r.oracle_calls;
  summary["final_stationarity"] =
      r.trace.empty() ? Json(nullptr) : NumberOrNull(r.trace.back().stationarity);
  summary["best_stationarity"] = NumberOrNull(r.best.stationarity);
  summary["k_star"] = r.best.k;
  summary["constants"] = {{"l_xx", problem.constants.l_xx},
                          {"l_xy", problem.constants.l_xy},
                          {"mu", problem.constants.mu},
                          {"nu_x", problem.constants.nu_x},
                          {"nu_y", problem.constants.nu_y}};
  summary["schedule"] = schedule;
  summary["gap"] = nullptr;
  if (spec.output.gap && r.ok()) {
    GapOptions go;
    go.budget = spec.output.gap_budget;
    go.seed = cfg.seed;
    try {
      const GapReport g = GapFunction(problem, r.final_state.x,
                                      r.final_state.y, go);
      summary["gap"] = {{"estimate", NumberOrNull(g.gap)},
                        {"sup_value", NumberOrNull(g.sup_value)},
                        {"inf_value", NumberOrNull(g.inf_value)},
                        {"sup_residual", NumberOrNull(g.sup_residual)},
                        {"inf_residual", NumberOrNull(g.inf_residual)},
                        {"starts_used", g.starts_used}};
    } catch (const Error& e) {
      summary["gap"] = {{"error", e.what()}};
    }
  }
  summary["resolved_config"] = ToJson(spec);
  out.summary = summary;
  WriteFile(out_dir / "summary.json", summary.dump(2) + "\n");
  out.exit_code = r.ok() ? 0 : 3;
  return out;
}

int CmdRun(const std::string& spec_path, const CliOverrides& overrides) {
  return Guarded([&] {
    const ExperimentSpec spec =
        ApplyOverrides(LoadExperimentSpec(spec_path), overrides);
    const ExperimentResult r = RunExperiment(spec, spec.output.dir);
    if (!r.run.ok()) std::cerr << "solver diverged: " << *r.run.error << "\n";
    return r.exit_code;
  });
}

int CmdSweep(const std::string& spec_path, const std::vector<int>& horizons,
             const CliOverrides& overrides) {
  return Guarded([&] {
    if (horizons.size() < 2) throw ConfigError("sweep needs >= 2 horizons");
    const ExperimentSpec base =
        ApplyOverrides(LoadExperimentSpec(spec_path), overrides);
    const fs::path root = base.output.dir;
    std::vector<RatePoint> points;
    int exit_code = 0;
    for (const int t : horizons) {
      if (t < 1) throw ConfigError("sweep horizons must be >= 1");
      ExperimentSpec spec = base;
      spec.run.horizon = t;
      spec.oracle_budget.reset();
      spec.output.dir = (root / ("T_" + std::to_string(t))).string();
      const ExperimentResult r = RunExperiment(spec, spec.output.dir);
      exit_code = std::max(exit_code, r.exit_code);
      points.push_back({static_cast<double>(t), r.run.best.stationarity});
    }
    double slope = std::numeric_limits<double>::quiet_NaN();
    try {
      slope = RateFit(points);
    } catch (const InvalidArgument& e) {
      std::cerr << "rate fit skipped: " << e.what() << "\n";
    }
    std::string csv = "T,best_stationarity,fitted_slope\n";
    for (const auto& p : points) {
      csv += std::to_string(static_cast<long long>(p.horizon)) + "," +
             FormatDouble(p.best_stationarity) + "," + FormatDouble(slope) +
             "\n";
    }
    fs::create_directories(root);
    WriteFile(root / "rate.csv", csv);
    return exit_code;
  });
}

std::string FormatCompareCsv(
    const std::vector<std::string>& names,
    const std::vector<std::vector<TraceRecord>>& traces) {
  std::set<std::int64_t> budgets;
  for (const auto& t : traces) {
    for (const auto& r : t) budgets.insert(r.oracle_calls);
  }
  std::string csv = "oracle_calls";
  for (const auto& n : names) csv += "," + n;
  csv += '\n';
  for (const std::int64_t b : budgets) {
    csv += std::to_string(b);
    for (const auto& t : traces) {
      csv += ',';
      if (t.empty()) continue;
      const TraceRecord* best = &t.front();
      for (const auto& r : t) {
        if (std::llabs(r.oracle_calls - b) < std::llabs(best->oracle_calls - b)) {
          best = &r;
        }
      }
      csv += FormatDouble(best->best_so_far);
    }
    csv += '\n';
  }
  return csv;
}

int CmdCompare(const std::string& spec_path,
               const std::vector<std::string>& solvers,
               const CliOverrides& overrides) {
  return Guarded([&] {
    if (solvers.size() < 2) throw ConfigError("compare needs >= 2 solvers");
    const ExperimentSpec base =
        ApplyOverrides(LoadExperimentSpec(spec_path), overrides);
    const fs::path root = base.output.dir;
    std::vector<SolverKind> kinds;
    try {
      for (const auto& s : solvers) kinds.push_back(ParseSolverKind(s));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    const std::int64_t budget =
        base.oracle_budget.value_or(
            static_cast<std::int64_t>(base.run.horizon) *
            CallsPerStep(kinds.front(), base.run.EffectiveBatchSize(),
                         base.run.sampling));
    std::vector<std::string> names;
    std::vector<std::vector<TraceRecord>> traces;
    int exit_code = 0;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      std::string name = ToString(kinds[i]);
      if (std::count(names.begin(), names.end(), name) > 0) {
        name += "_" + std::to_string(i + 1);
      }
      ExperimentSpec spec = base;
      spec.run.solver = kinds[i];
      spec.oracle_budget = budget;
      spec.output.dir = (root / name).string();
      const ExperimentResult r = RunExperiment(spec, spec.output.dir);
      exit_code = std::max(exit_code, r.exit_code);
      names.push_back(name);
      traces.push_back(r.run.trace);
    }
    fs::create_directories(root);
    WriteFile(root / "compare.csv", FormatCompareCsv(names, traces));
    return exit_code;
  });
}

}  // namespace saddle
