#ifndef SADDLE_PROBLEM_H_
#define SADDLE_PROBLEM_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "saddle/prox.h"
#include "saddle/types.h"

namespace saddle {

// Smoothness and PL constants of L(x, y):
//   ||grad_x L(x,y) - grad_x L(x',y')|| <= l_xx ||x - x'|| + l_xy ||y - y'||
//   0.5 ||grad_x L(x,y)||^2 >= mu (L(x,y) - min_x L(x,y)).
// nu_x, nu_y bound the standard deviation of per-sample gradients.
struct ProblemConstants {
  double l_xx = 1.0;
  double l_xy = 1.0;
  double mu = 1.0;
  double nu_x = 0.0;
  double nu_y = 0.0;

  // Throws InvalidArgument unless l_xx > 0, mu > 0, l_xy, nu_x, nu_y >= 0.
  void Validate() const;
};

// First-order oracle for a coupling L(x, y) that is linear in y. Finite-sum
// problems also expose per-sample gradients; sample i is drawn uniformly and
// the average over all samples equals the full gradient.
class SaddleOracle {
 public:
  virtual ~SaddleOracle() = default;

  virtual int dim_x() const = 0;
  virtual int dim_y() const = 0;

  virtual double Value(const Vec& x, const Vec& y) const = 0;
  virtual Vec GradX(const Vec& x, const Vec& y) const = 0;
  virtual Vec GradY(const Vec& x, const Vec& y) const = 0;

  // 0 for purely deterministic oracles.
  virtual std::size_t num_samples() const { return 0; }
  virtual Vec GradXSample(const Vec& x, const Vec& y, std::size_t i) const;
  virtual Vec GradYSample(const Vec& x, const Vec& y, std::size_t i) const;

  // Mini-batch means over `samples`, accumulated in the given order.
  virtual Vec GradXBatch(const Vec& x, const Vec& y,
                         std::span<const std::size_t> samples) const;
  virtual Vec GradYBatch(const Vec& x, const Vec& y,
                         std::span<const std::size_t> samples) const;
};

// min_x max_y  L(x, y) - h(y).
struct ProblemInstance {
  std::string name;
  ProblemConstants constants;
  std::shared_ptr<const SaddleOracle> oracle;
  std::shared_ptr<const ProxOperator> h;
  // Default starting point.
  Vec x0;
  Vec y0;

  int dim_x() const { return oracle->dim_x(); }
  int dim_y() const { return oracle->dim_y(); }

  // Phi(x, y) = L(x, y) - h(y).
  double Objective(const Vec& x, const Vec& y) const;

  // Checks dimensions, constants and the starting point.
  void Validate() const;
};

// Relative deviation of grad_y L(x, .) between two y's. Zero (bitwise) for
// every oracle that is linear in y and evaluates grad_y from x alone.
double LinearityDefect(const SaddleOracle& oracle, const Vec& x,
                       const Vec& y1, const Vec& y2);

}  // namespace saddle

#endif  // SADDLE_PROBLEM_H_
