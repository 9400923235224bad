#include "saddle/problem.h"

#include <algorithm>
#include <cmath>

namespace saddle {

void ProblemConstants::Validate() const {
  if (!(l_xx > 0.0) || !std::isfinite(l_xx)) {
    throw InvalidArgument("l_xx must be positive and finite");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw InvalidArgument("mu must be positive and finite");
  }
  if (!(l_xy >= 0.0) || !(nu_x >= 0.0) || !(nu_y >= 0.0)) {
    throw InvalidArgument("l_xy, nu_x and nu_y must be nonnegative");
  }
}

Vec SaddleOracle::GradXSample(const Vec& x, const Vec& y,
                              std::size_t /*i*/) const {
  return GradX(x, y);
}

Vec SaddleOracle::GradYSample(const Vec& x, const Vec& y,
                              std::size_t /*i*/) const {
  return GradY(x, y);
}

Vec SaddleOracle::GradXBatch(const Vec& x, const Vec& y,
                             std::span<const std::size_t> samples) const {
  if (samples.empty()) throw InvalidArgument("GradXBatch: empty batch");
  Vec acc = Vec::Zero(dim_x());
  for (const std::size_t i : samples) acc += GradXSample(x, y, i);
  return acc / static_cast<double>(samples.size());
}

Vec SaddleOracle::GradYBatch(const Vec& x, const Vec& y,
                             std::span<const std::size_t> samples) const {
  if (samples.empty()) throw InvalidArgument("GradYBatch: empty batch");
  Vec acc = Vec::Zero(dim_y());
  for (const std::size_t i : samples) acc += GradYSample(x, y, i);
  return acc / static_cast<double>(samples.size());
}

double ProblemInstance::Objective(const Vec& x, const Vec& y) const {
  return oracle->Value(x, y) - h->Value(y);
}

void ProblemInstance::Validate() const {
  if (!oracle) throw InvalidArgument("problem has no oracle");
  if (!h) throw InvalidArgument("problem has no prox operator");
  if (oracle->dim_x() <= 0 || oracle->dim_y() <= 0) {
    throw InvalidArgument("problem dimensions must be positive");
  }
  constants.Validate();
  if (x0.size() != oracle->dim_x() || y0.size() != oracle->dim_y()) {
    throw InvalidArgument("starting point has the wrong dimension");
  }
  if (!x0.allFinite() || !y0.allFinite()) {
    throw InvalidArgument("starting point is not finite");
  }
}

double LinearityDefect(const SaddleOracle& oracle, const Vec& x,
                       const Vec& y1, const Vec& y2) {
  const Vec g1 = oracle.GradY(x, y1);
  const Vec g2 = oracle.GradY(x, y2);
  return (g1 - g2).norm() / std::max(1.0, g1.norm());
}

}  // namespace saddle
