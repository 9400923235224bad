#include "saddle/solvers.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace saddle {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t StreamSeed(std::uint64_t seed, std::int64_t k, int role) {
  std::uint64_t h = SplitMix64(seed);
  h = SplitMix64(h ^ static_cast<std::uint64_t>(k));
  return SplitMix64(h ^ static_cast<std::uint64_t>(role));
}

std::vector<std::size_t> DrawIndices(std::uint64_t stream_seed, int count,
                                     std::size_t num_samples) {
  std::mt19937_64 rng(stream_seed);
  std::uniform_int_distribution<std::size_t> dist(0, num_samples - 1);
  std::vector<std::size_t> out(count);
  for (auto& i : out) i = dist(rng);
  return out;
}

bool BitwiseEqual(const Vec& a, const Vec& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

// Shared body of the deterministic and stochastic steps. `grad_x`/`grad_y`
// are the (possibly mini-batch) oracles and `cost` the calls one of them
// spends. With `use_cache` the previous step's grad_y at x_prev is reused.
template <typename GradX, typename GradY>
StepOutput PrimalDualStep(const ProblemInstance& problem,
                          const Schedule& schedule, const IterateState& state,
                          GradX&& grad_x, GradY&& grad_y, std::int64_t cost,
                          bool use_cache) {
  const std::int64_t k = state.k;
  if (k >= schedule.horizon()) {
    throw InvalidArgument("step index beyond the schedule horizon");
  }
  const int ki = static_cast<int>(k);
  const double a = schedule.alpha(ki);
  const double g = schedule.gamma(ki);
  const double l = schedule.lambda(ki);
  const double s = schedule.sigma(ki);
  const double lxx = problem.constants.l_xx;
  const double mu = problem.constants.mu;

  StepOutput out;
  std::int64_t calls = 0;
  try {
    const Vec z = (1.0 - a) * state.x_tilde + a * state.x;
    out.p = grad_y(z, state.y);
    const Vec gy_x = grad_y(state.x, state.y);
    calls += 2 * cost;
    Vec gy_prev;
    if (BitwiseEqual(state.x_prev, state.x)) {
      gy_prev = gy_x;
    } else if (use_cache && state.grad_y_prev) {
      gy_prev = *state.grad_y_prev;
    } else {
      gy_prev = grad_y(state.x_prev, state.y);
      calls += cost;
    }
    out.q = (gy_x - gy_prev) / (g * (1.0 - lxx * g) * mu);
    const Vec y_next = problem.h->Prox(state.y + s * (out.p + out.q), s);
    out.r = grad_x(z, y_next);
    calls += cost;

    IterateState& next = out.state;
    next.x = state.x - g * out.r;
    next.x_tilde = z - l * out.r;
    next.x_prev = state.x;
    next.y = y_next;
    next.k = k + 1;
    next.z_last = z;
    if (use_cache) next.grad_y_prev = gy_x;
    out.y_move = (y_next - state.y).norm();
    out.grad_x_norm = out.r.norm();
  } catch (const InstabilityError& e) {
    throw DivergenceError(e.what(), k);
  }
  if (!out.p.allFinite() || !out.q.allFinite() || !out.r.allFinite()) {
    throw DivergenceError("non-finite gradient", k);
  }
  out.state.CheckFinite();
  out.oracle_calls = calls;
  return out;
}

template <bool kAlternating>
StepOutput GradientDescentAscentStep(const ProblemInstance& problem,
                                     double gamma, double sigma,
                                     const IterateState& state) {
  StepOutput out;
  try {
    out.r = problem.oracle->GradX(state.x, state.y);
    const Vec x_next = state.x - gamma * out.r;
    out.p = problem.oracle->GradY(kAlternating ? x_next : state.x, state.y);
    out.q = Vec::Zero(out.p.size());
    const Vec y_next = problem.h->Prox(state.y + sigma * out.p, sigma);

    IterateState& next = out.state;
    next.x = x_next;
    next.x_tilde = x_next;
    next.x_prev = state.x;
    next.y = y_next;
    next.k = state.k + 1;
    next.z_last = state.x;
    out.y_move = (y_next - state.y).norm();
    out.grad_x_norm = out.r.norm();
  } catch (const InstabilityError& e) {
    throw DivergenceError(e.what(), state.k);
  }
  if (!out.r.allFinite() || !out.p.allFinite()) {
    throw DivergenceError("non-finite gradient", state.k);
  }
  out.state.CheckFinite();
  out.oracle_calls = 2;
  return out;
}

}  // namespace

SampleBatch DrawBatch(std::uint64_t seed, std::int64_t k, int batch_size,
                      std::size_t num_samples) {
  if (batch_size < 1) throw InvalidArgument("DrawBatch: empty batch");
  if (num_samples == 0) {
    throw InvalidArgument("DrawBatch: problem has no sample space");
  }
  SampleBatch batch;
  batch.u_indices = DrawIndices(StreamSeed(seed, k, 0), batch_size, num_samples);
  batch.v_indices = DrawIndices(StreamSeed(seed, k, 1), batch_size, num_samples);
  return batch;
}

StepOutput PdmStep(const ProblemInstance& problem, const Schedule& schedule,
                   const IterateState& state) {
  const SaddleOracle& o = *problem.oracle;
  return PrimalDualStep(
      problem, schedule, state,
      [&o](const Vec& x, const Vec& y) { return o.GradX(x, y); },
      [&o](const Vec& x, const Vec& y) { return o.GradY(x, y); }, 1, true);
}

StepOutput SpdmStep(const ProblemInstance& problem, const Schedule& schedule,
                    const IterateState& state, const SampleBatch& batch) {
  if (batch.exhaustive) return PdmStep(problem, schedule, state);
  if (batch.u_indices.empty() || batch.v_indices.empty()) {
    throw InvalidArgument("SpdmStep: empty mini-batch");
  }
  if (batch.u_indices.size() != batch.v_indices.size()) {
    throw InvalidArgument("SpdmStep: U_k and V_k must have the same size");
  }
  const std::size_t n = problem.oracle->num_samples();
  for (const auto* idx : {&batch.u_indices, &batch.v_indices}) {
    for (const std::size_t i : *idx) {
      if (i >= n) throw InvalidArgument("SpdmStep: sample index out of range");
    }
  }
  const SaddleOracle& o = *problem.oracle;
  const auto& u = batch.u_indices;
  const auto& v = batch.v_indices;
  return PrimalDualStep(
      problem, schedule, state,
      [&o, &u](const Vec& x, const Vec& y) { return o.GradXBatch(x, y, u); },
      [&o, &v](const Vec& x, const Vec& y) { return o.GradYBatch(x, y, v); },
      static_cast<std::int64_t>(u.size()), false);
}

StepOutput SpdmStep(const ProblemInstance& problem, const Schedule& schedule,
                    const IterateState& state, std::uint64_t seed,
                    int batch_size, Sampling sampling) {
  if (sampling == Sampling::kExhaustive) {
    SampleBatch all;
    all.exhaustive = true;
    return SpdmStep(problem, schedule, state, all);
  }
  return SpdmStep(problem, schedule, state,
                  DrawBatch(seed, state.k, batch_size,
                            problem.oracle->num_samples()));
}

StepOutput AgdaStep(const ProblemInstance& problem, double gamma, double sigma,
                    const IterateState& state) {
  return GradientDescentAscentStep<true>(problem, gamma, sigma, state);
}

StepOutput GdaStep(const ProblemInstance& problem, double gamma, double sigma,
                   const IterateState& state) {
  return GradientDescentAscentStep<false>(problem, gamma, sigma, state);
}

std::int64_t CallsPerStep(SolverKind solver, int batch_size,
                          Sampling sampling) {
  switch (solver) {
    case SolverKind::kPdm:
      return 3;
    case SolverKind::kSpdm:
      return sampling == Sampling::kExhaustive
                 ? 3
                 : 4 * static_cast<std::int64_t>(batch_size);
    case SolverKind::kGda:
    case SolverKind::kAgda:
      return 2;
  }
  return 0;
}

StationarityReport MeasureAtState(const ProblemInstance& problem,
                                  const Schedule& schedule,
                                  const IterateState& state,
                                  SolverKind solver) {
  const int k = static_cast<int>(state.k);
  const double sigma = schedule.sigma(k);
  try {
    if (solver == SolverKind::kGda || solver == SolverKind::kAgda) {
      return StationarityMeasure(problem, state.x, state.y, sigma,
                                 Vec::Zero(problem.dim_y()));
    }
    const double a = schedule.alpha(k);
    const double g = schedule.gamma(k);
    const Vec z = (1.0 - a) * state.x_tilde + a * state.x;
    Vec q = Vec::Zero(problem.dim_y());
    if (!BitwiseEqual(state.x_prev, state.x)) {
      q = (problem.oracle->GradY(state.x, state.y) -
           problem.oracle->GradY(state.x_prev, state.y)) /
          (g * (1.0 - problem.constants.l_xx * g) * problem.constants.mu);
    }
    return StationarityMeasure(problem, z, state.y, sigma, q);
  } catch (const InstabilityError& e) {
    throw DivergenceError(e.what(), state.k);
  }
}

RunResult Run(const ProblemInstance& problem, const RunConfig& config) {
  problem.Validate();
  return Run(problem, config, IterateState::Initial(problem.x0, problem.y0));
}

RunResult Run(const ProblemInstance& problem, const RunConfig& config,
              const IterateState& initial) {
  config.Validate();
  problem.constants.Validate();
  const int horizon = config.horizon;
  const Schedule schedule =
      MakeSchedule(problem.constants, horizon, config.schedule);
  const int batch = config.EffectiveBatchSize();
  if (config.solver == SolverKind::kSpdm &&
      config.sampling == Sampling::kUniform && horizon > 0 &&
      problem.oracle->num_samples() == 0) {
    throw InvalidArgument(
        "SPDM with uniform sampling needs a problem with a sample space");
  }

  RunResult result;
  result.final_state = initial;
  result.best.stationarity = std::numeric_limits<double>::infinity();
  IterateState& state = result.final_state;
  const auto start = std::chrono::steady_clock::now();

  for (int k = 0; k <= horizon; ++k) {
    try {
      state.k = k;
      const StationarityReport m =
          MeasureAtState(problem, schedule, state, config.solver);
      if (!std::isfinite(m.value)) {
        throw DivergenceError("non-finite stationarity measure", k);
      }
      if (m.value < result.best.stationarity) {
        result.best.k = k;
        result.best.stationarity = m.value;
        const double a = schedule.alpha(k);
        result.best.z =
            (config.solver == SolverKind::kGda ||
             config.solver == SolverKind::kAgda)
                ? state.x
                : Vec((1.0 - a) * state.x_tilde + a * state.x);
        result.best.y = state.y;
      }
      if (k == 0 || k % config.trace_every == 0 || k == horizon) {
        TraceRecord rec;
        rec.k = k;
        rec.oracle_calls = result.oracle_calls;
        rec.stationarity = m.value;
        rec.grad_x_norm = std::sqrt(m.grad_x_sq);
        try {
          rec.primal_value = problem.Objective(state.x, state.y);
        } catch (const InstabilityError&) {
          rec.primal_value = std::numeric_limits<double>::infinity();
        }
        if (config.record_wall_time) {
          rec.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        }
        rec.best_so_far = result.best.stationarity;
        result.trace.push_back(rec);
      }
      if (k == horizon) break;

      StepOutput out;
      switch (config.solver) {
        case SolverKind::kPdm:
          out = PdmStep(problem, schedule, state);
          break;
        case SolverKind::kSpdm:
          out = SpdmStep(problem, schedule, state, config.seed, batch,
                         config.sampling);
          break;
        case SolverKind::kGda:
          out = GdaStep(problem, schedule.lambda(k), schedule.sigma(k), state);
          break;
        case SolverKind::kAgda:
          out = AgdaStep(problem, schedule.lambda(k), schedule.sigma(k), state);
          break;
      }
      result.oracle_calls += out.oracle_calls;
      state = std::move(out.state);
    } catch (const Error& e) {
      result.error = e.what();
      result.error_iteration = k;
      break;
    }
  }
  return result;
}

}  // namespace saddle
