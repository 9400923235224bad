#include "saddle/state.h"

namespace saddle {

IterateState IterateState::Initial(const Vec& x0, const Vec& y0) {
  IterateState s;
  s.x = x0;
  s.x_tilde = x0;
  s.x_prev = x0;
  s.y = y0;
  s.k = 0;
  s.z_last = x0;
  return s;
}

void IterateState::CheckFinite() const {
  if (!x.allFinite() || !x_tilde.allFinite() || !x_prev.allFinite() ||
      !y.allFinite() || !z_last.allFinite()) {
    throw DivergenceError("non-finite iterate", k);
  }
  if (x.norm() > kDivergenceBound || y.norm() > kDivergenceBound ||
      x_tilde.norm() > kDivergenceBound) {
    throw DivergenceError("iterate norm exceeded 1e12", k);
  }
}

std::string ToString(SolverKind kind) {
  switch (kind) {
    case SolverKind::kPdm:
      return "pdm";
    case SolverKind::kSpdm:
      return "spdm";
    case SolverKind::kGda:
      return "gda";
    case SolverKind::kAgda:
      return "agda";
  }
  return "unknown";
}

SolverKind ParseSolverKind(const std::string& s) {
  if (s == "pdm") return SolverKind::kPdm;
  if (s == "spdm") return SolverKind::kSpdm;
  if (s == "gda") return SolverKind::kGda;
  if (s == "agda") return SolverKind::kAgda;
  throw InvalidArgument("unknown solver '" + s + "'");
}

std::string ToString(Sampling sampling) {
  return sampling == Sampling::kUniform ? "uniform" : "exhaustive";
}

Sampling ParseSampling(const std::string& s) {
  if (s == "uniform") return Sampling::kUniform;
  if (s == "exhaustive") return Sampling::kExhaustive;
  throw InvalidArgument("unknown sampling mode '" + s + "'");
}

void RunConfig::Validate() const {
  if (horizon < 0) throw InvalidArgument("horizon must be nonnegative");
  if (trace_every < 1) throw InvalidArgument("trace_every must be >= 1");
  if (batch_size < 0) throw InvalidArgument("batch_size must be >= 0");
  if (solver == SolverKind::kSpdm && sampling == Sampling::kUniform &&
      horizon > 0 && EffectiveBatchSize() < 1) {
    throw InvalidArgument("SPDM requires batch_size >= 1");
  }
}

}  // namespace saddle
