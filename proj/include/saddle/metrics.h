#ifndef SADDLE_METRICS_H_
#define SADDLE_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "saddle/problem.h"

namespace saddle {

// One row of convergence telemetry.
struct TraceRecord {
  std::int64_t k = 0;
  std::int64_t oracle_calls = 0;
  double stationarity = 0.0;
  double grad_x_norm = 0.0;
  double primal_value = 0.0;
  std::int64_t wall_ns = 0;
  double best_so_far = 0.0;
};

struct StationarityReport {
  double value = 0.0;           // grad_x_sq + y_move_sq
  double grad_x_sq = 0.0;       // ||grad_x L(z, y)||^2
  double y_move_sq = 0.0;       // ||y_bar - y||^2
  Vec y_bar;
};

// y_bar = prox_{sigma h}(y + sigma (grad_y L(z, y) + q)) and the measure
// ||grad_x L(z, y)||^2 + ||y_bar - y||^2. A value <= eps^2 certifies
// ||grad_x L(z, y)|| <= eps and approximate dual optimality.
StationarityReport StationarityMeasure(const ProblemInstance& problem,
                                       const Vec& z, const Vec& y,
                                       double sigma, const Vec& q);

struct GapReport {
  double gap = 0.0;        // sup_value - inf_value
  double sup_value = 0.0;  // estimate of max_y Phi(x_T, y)
  double inf_value = 0.0;  // estimate of min_x Phi(x, y_T)
  double sup_residual = 0.0;  // ||y - prox(y + grad)|| at the returned y
  double inf_residual = 0.0;  // ||grad_x|| at the best x found
  int starts_used = 0;        // descent starts that stayed finite
  Vec y_star;
  Vec x_star;
};

struct GapOptions {
  int budget = 200;
  int num_starts = 5;
  std::uint64_t seed = 0;
  // Relative size of the start perturbations around x_T.
  double perturbation = 0.1;
};

// Estimate of sup_y Phi(x_T, y) - inf_x Phi(x, y_T).
//
// The y part maximizes the linear function grad_y L(x_T, .)^T y - h(y) by
// proximal gradient ascent with diminishing steps; the x part runs
// backtracking gradient descent from x_T and num_starts - 1 perturbations
// and keeps the lowest value. Neither inner problem is certified: the
// residuals are reported next to the estimate.
GapReport GapFunction(const ProblemInstance& problem, const Vec& x_t,
                      const Vec& y_t, const GapOptions& options = {});

struct RatePoint {
  double horizon = 0.0;
  double best_stationarity = 0.0;
};

// Least-squares slope of log(best_stationarity) against log(horizon).
// Requires >= 3 points with each horizon at least twice the previous one
// and positive stationarity values.
double RateFit(std::span<const RatePoint> points);

}  // namespace saddle

#endif  // SADDLE_METRICS_H_
