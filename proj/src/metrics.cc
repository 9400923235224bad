#include "saddle/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace saddle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// L(x, y) with an unstable / undefined point mapped to +inf.
double SafeValue(const SaddleOracle& oracle, const Vec& x, const Vec& y) {
  try {
    const double v = oracle.Value(x, y);
    return std::isfinite(v) ? v : kInf;
  } catch (const InstabilityError&) {
    return kInf;
  }
}

struct DescentResult {
  Vec x;
  double value = kInf;
  double residual = kInf;
};

DescentResult Descend(const SaddleOracle& oracle, const Vec& start,
                      const Vec& y, double initial_step, int budget) {
  DescentResult out;
  out.x = start;
  out.value = SafeValue(oracle, start, y);
  if (!std::isfinite(out.value)) return out;
  double step = initial_step;
  Vec g = oracle.GradX(out.x, y);
  for (int it = 0; it < budget; ++it) {
    const double gsq = g.squaredNorm();
    if (gsq == 0.0) break;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      const Vec trial = out.x - step * g;
      const double v = SafeValue(oracle, trial, y);
      if (v <= out.value - 0.5 * step * gsq) {
        out.x = trial;
        out.value = v;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    if (out.x.norm() > 1e12) {
      throw DivergenceError("gap function: x descent diverged", it);
    }
    g = oracle.GradX(out.x, y);
    step *= 2.0;
  }
  out.residual = g.norm();
  return out;
}

}  // namespace

StationarityReport StationarityMeasure(const ProblemInstance& problem,
                                       const Vec& z, const Vec& y,
                                       double sigma, const Vec& q) {
  StationarityReport r;
  const Vec gx = problem.oracle->GradX(z, y);
  const Vec gy = problem.oracle->GradY(z, y);
  r.y_bar = problem.h->Prox(y + sigma * (gy + q), sigma);
  r.grad_x_sq = gx.squaredNorm();
  r.y_move_sq = (r.y_bar - y).squaredNorm();
  r.value = r.grad_x_sq + r.y_move_sq;
  return r;
}

GapReport GapFunction(const ProblemInstance& problem, const Vec& x_t,
                      const Vec& y_t, const GapOptions& options) {
  if (options.budget < 1 || options.num_starts < 1) {
    throw InvalidArgument("GapFunction: budget and num_starts must be >= 1");
  }
  const SaddleOracle& oracle = *problem.oracle;
  const ProxOperator& h = *problem.h;
  GapReport report;

  // sup_y: L(x_T, .) is linear, so grad_y is a constant direction c.
  const Vec c = oracle.GradY(x_t, y_t);
  const double cnorm = c.norm();
  Vec y = std::isfinite(h.Value(y_t)) ? y_t : h.Prox(y_t, 1.0);
  auto dual_value = [&](const Vec& v) {
    return oracle.Value(x_t, v) - h.Value(v);
  };
  double best_sup = dual_value(y);
  Vec best_y = y;
  if (cnorm > 0.0) {
    const double s0 = (1.0 + y_t.norm()) / cnorm;
    for (int j = 0; j < options.budget; ++j) {
      const double s = s0 / std::sqrt(j + 1.0);
      y = h.Prox(y + s * c, s);
      if (!y.allFinite() || y.norm() > 1e12) {
        throw DivergenceError("gap function: y ascent diverged", j);
      }
      const double v = dual_value(y);
      if (v > best_sup) {
        best_sup = v;
        best_y = y;
      }
    }
  }
  report.sup_value = best_sup;
  report.y_star = best_y;
  report.sup_residual = (best_y - h.Prox(best_y + c, 1.0)).norm();

  // inf_x: multi-start descent on L(., y_T).
  const double h_y = h.Value(y_t);
  const double step0 = 1.0 / problem.constants.l_xx;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = options.perturbation * (1.0 + x_t.norm()) /
                       std::sqrt(static_cast<double>(x_t.size()));
  DescentResult best;
  for (int s = 0; s < options.num_starts; ++s) {
    Vec start = x_t;
    if (s > 0) {
      for (Eigen::Index i = 0; i < start.size(); ++i) {
        start[i] += scale * normal(rng);
      }
    }
    DescentResult r = Descend(oracle, start, y_t, step0, options.budget);
    if (!std::isfinite(r.value)) continue;
    ++report.starts_used;
    if (r.value < best.value) best = std::move(r);
  }
  if (report.starts_used == 0) {
    throw DivergenceError("gap function: no finite descent start", 0);
  }
  report.inf_value = best.value - h_y;
  report.inf_residual = best.residual;
  report.x_star = best.x;
  report.gap = report.sup_value - report.inf_value;
  return report;
}

double RateFit(std::span<const RatePoint> points) {
  if (points.size() < 3) {
    throw InvalidArgument("RateFit: need at least 3 horizons");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].horizon > 0.0) || !(points[i].best_stationarity > 0.0)) {
      throw InvalidArgument("RateFit: horizons and values must be positive");
    }
    if (i > 0 && points[i].horizon < 2.0 * points[i - 1].horizon) {
      throw InvalidArgument(
          "RateFit: each horizon must be at least twice the previous one");
    }
  }
  const auto n = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& p : points) {
    mx += std::log(p.horizon);
    my += std::log(p.best_stationarity);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& p : points) {
    const double dx = std::log(p.horizon) - mx;
    sxy += dx * (std::log(p.best_stationarity) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace saddle
