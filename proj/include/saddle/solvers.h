#ifndef SADDLE_SOLVERS_H_
#define SADDLE_SOLVERS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "saddle/metrics.h"
#include "saddle/problem.h"
#include "saddle/schedule.h"
#include "saddle/state.h"

namespace saddle {

struct StepOutput {
  IterateState state;  // advanced to k + 1
  Vec p;               // dual gradient at the extrapolation point
  Vec q;               // dual momentum
  Vec r;               // primal gradient at (z, y+)
  double y_move = 0.0;       // ||y+ - y||
  double grad_x_norm = 0.0;  // ||r||
  // Gradient evaluations spent by this step: one per full gradient, b per
  // mini-batch gradient.
  std::int64_t oracle_calls = 0;
};

// Index sets for one stochastic step. `exhaustive` means the whole sample
// set; the step then uses exact gradients and the index lists are empty.
struct SampleBatch {
  std::vector<std::size_t> u_indices;  // primal gradient samples
  std::vector<std::size_t> v_indices;  // dual gradient samples
  bool exhaustive = false;
};

// Uniform sampling with replacement. U_k and V_k come from separate streams
// keyed by (seed, k, role), so the draw does not depend on evaluation order.
SampleBatch DrawBatch(std::uint64_t seed, std::int64_t k, int batch_size,
                      std::size_t num_samples);

// One deterministic primal-dual-with-momentum step:
//   z  = (1 - a) x_tilde + a x
//   p  = grad_y L(z, y)
//   q  = (grad_y L(x, y) - grad_y L(x_prev, y)) / (g (1 - l_xx g) mu)
//   y+ = prox_{s h}(y + s (p + q))
//   r  = grad_x L(z, y+)
//   x+ = x - g r,  x_tilde+ = z - l r
// with (a, g, l, s) = (alpha_k, gamma_k, lambda_k, sigma_k).
StepOutput PdmStep(const ProblemInstance& problem, const Schedule& schedule,
                   const IterateState& state);

// The stochastic variant: p and q use the V_k mini-batch, r uses U_k.
StepOutput SpdmStep(const ProblemInstance& problem, const Schedule& schedule,
                    const IterateState& state, const SampleBatch& batch);

// Draws the batch with DrawBatch(seed, state.k, b, ...) and steps.
StepOutput SpdmStep(const ProblemInstance& problem, const Schedule& schedule,
                    const IterateState& state, std::uint64_t seed,
                    int batch_size,
                    Sampling sampling = Sampling::kUniform);

// Baselines. AGDA: x+ = x - gamma grad_x L(x, y);
// y+ = prox_{sigma h}(y + sigma grad_y L(x+, y)). GDA evaluates the dual
// gradient at x instead of x+.
StepOutput AgdaStep(const ProblemInstance& problem, double gamma,
                    double sigma, const IterateState& state);
StepOutput GdaStep(const ProblemInstance& problem, double gamma, double sigma,
                   const IterateState& state);

// Gradient evaluations per step, used to equalize oracle budgets.
std::int64_t CallsPerStep(SolverKind solver, int batch_size, Sampling sampling);

struct BestIterate {
  std::int64_t k = 0;
  double stationarity = 0.0;
  Vec z;
  Vec y;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  IterateState final_state;
  BestIterate best;
  std::int64_t oracle_calls = 0;
  // Set when a step failed; the trace stops at the failure point.
  std::optional<std::string> error;
  std::int64_t error_iteration = -1;

  bool ok() const { return !error.has_value(); }
};

// Stationarity measure of a solver at the start of step k. PDM/SPDM use the
// extrapolation point z formed at step k and the exact dual momentum; the
// baselines use (x_k, y_k) with zero momentum.
StationarityReport MeasureAtState(const ProblemInstance& problem,
                                  const Schedule& schedule,
                                  const IterateState& state,
                                  SolverKind solver);

// Runs config.horizon steps. A record is emitted at k = 0, every
// trace_every steps and at k = T. The best iterate is the argmin of the
// stationarity measure over every k in [0, T].
RunResult Run(const ProblemInstance& problem, const RunConfig& config);
RunResult Run(const ProblemInstance& problem, const RunConfig& config,
              const IterateState& initial);

}  // namespace saddle

#endif  // SADDLE_SOLVERS_H_
