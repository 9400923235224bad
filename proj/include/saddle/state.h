#ifndef SADDLE_STATE_H_
#define SADDLE_STATE_H_

#include <cstdint>
#include <optional>
#include <string>

#include "saddle/schedule.h"
#include "saddle/types.h"

namespace saddle {

// Live variables of a primal-dual run. Owned by exactly one run.
struct IterateState {
  Vec x;
  Vec x_tilde;
  Vec x_prev;  // x_{k-1}; equals x at k = 0 so the first dual momentum is 0.
  Vec y;
  std::int64_t k = 0;
  Vec z_last;  // extrapolation point formed by the most recent step
  // grad_y L(x_prev, .) from the previous deterministic step. L is linear in
  // y, so the value does not depend on the y it was evaluated at.
  std::optional<Vec> grad_y_prev;

  // x_tilde = x_prev = z_last = x0, k = 0.
  static IterateState Initial(const Vec& x0, const Vec& y0);

  // Throws DivergenceError if any component is non-finite or ||x||, ||y||
  // exceed kDivergenceBound.
  void CheckFinite() const;

  static constexpr double kDivergenceBound = 1e12;
};

enum class SolverKind { kPdm, kSpdm, kGda, kAgda };

std::string ToString(SolverKind kind);
SolverKind ParseSolverKind(const std::string& s);

enum class Sampling {
  kUniform,     // with replacement, U_k and V_k independent
  kExhaustive,  // the whole sample set: exact gradients
};

std::string ToString(Sampling sampling);
Sampling ParseSampling(const std::string& s);

struct RunConfig {
  SolverKind solver = SolverKind::kPdm;
  int horizon = 100;
  // SPDM mini-batch size; 0 selects b = T.
  int batch_size = 0;
  Sampling sampling = Sampling::kUniform;
  std::uint64_t seed = 0;
  ScheduleOverrides schedule;
  int trace_every = 1;
  // Off by default so traces are bit-reproducible (wall_ns is then 0).
  bool record_wall_time = false;

  int EffectiveBatchSize() const {
    return batch_size > 0 ? batch_size : horizon;
  }

  // Throws InvalidArgument on negative horizon, trace_every < 1 or an
  // SPDM batch size below 1.
  void Validate() const;
};

}  // namespace saddle

#endif  // SADDLE_STATE_H_
