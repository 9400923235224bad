#ifndef SADDLE_PROX_H_
#define SADDLE_PROX_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "saddle/types.h"

namespace saddle {

// Proximal operator of a convex function h:
//   prox_{step*h}(v) = argmin_u  0.5*||u - v||^2 + step*h(u).
class ProxOperator {
 public:
  virtual ~ProxOperator() = default;

  virtual Vec Prox(const Vec& v, double step) const = 0;

  // h(y). Indicator functions return 0 inside the set (up to `kFeasTol`) and
  // +inf outside.
  virtual double Value(const Vec& y) const = 0;

  virtual std::string Name() const = 0;

  static constexpr double kFeasTol = 1e-9;
};

// h == 0.
class ZeroProx final : public ProxOperator {
 public:
  Vec Prox(const Vec& v, double /*step*/) const override { return v; }
  double Value(const Vec& /*y*/) const override { return 0.0; }
  std::string Name() const override { return "zero"; }
};

// Returns v unchanged.
Vec ProxZero(const Vec& v, double step);

// Frobenius projection of a square matrix onto {X = X^T : lo*I <= X <= hi*I}.
// Symmetrizes first, then clamps the eigenvalues.
Mat ProjectSpectralBox(const Mat& m, double lo, double hi);

struct DykstraReport {
  int sweeps = 0;
  double last_change = 0.0;
};

// Euclidean projection onto {y : y_i >= delta/n} ∩ {y : ||n*y - 1|| <= radius}
// by Dykstra's alternating projections between the box and the ball.
Vec ProjectBoxBall(const Vec& v, double delta, double radius,
                   DykstraReport* report = nullptr);

// Indicator of the DRO uncertainty set used by ProjectBoxBall.
class BoxBallProjection final : public ProxOperator {
 public:
  BoxBallProjection(int n, double delta, double radius);

  Vec Prox(const Vec& v, double step) const override;
  double Value(const Vec& y) const override;
  std::string Name() const override { return "box_ball"; }

  int n() const { return n_; }
  double delta() const { return delta_; }
  double radius() const { return radius_; }

 private:
  int n_;
  double delta_;
  double radius_;
};

// One square block of a flattened matrix variable, stored column-major.
struct SpectralBlock {
  int dim = 0;
  double lo = 0.0;
  double hi = 0.0;
};

// Indicator of a product of spectral boxes over consecutive flattened
// matrix blocks, e.g. theta = (vec(Q), vec(R)).
class SpectralBoxProjection final : public ProxOperator {
 public:
  explicit SpectralBoxProjection(std::vector<SpectralBlock> blocks);

  Vec Prox(const Vec& v, double step) const override;
  double Value(const Vec& y) const override;
  std::string Name() const override { return "spectral_box"; }

  const std::vector<SpectralBlock>& blocks() const { return blocks_; }
  int total_size() const { return total_size_; }

 private:
  std::vector<SpectralBlock> blocks_;
  int total_size_ = 0;
};

// h(y) = g(y) + (c/2)||y - center||^2 for a convex g. The prox reduces to
// prox_{step/(1+step*c) g}((v + step*c*center)/(1+step*c)).
class QuadraticRegularizedProx final : public ProxOperator {
 public:
  QuadraticRegularizedProx(std::shared_ptr<const ProxOperator> base,
                           double coefficient, Vec center);

  Vec Prox(const Vec& v, double step) const override;
  double Value(const Vec& y) const override;
  std::string Name() const override { return base_->Name() + "+quadratic"; }

  double coefficient() const { return coefficient_; }

 private:
  std::shared_ptr<const ProxOperator> base_;
  double coefficient_;
  Vec center_;
};

// User-supplied prox and value callbacks.
class CustomProx final : public ProxOperator {
 public:
  using ProxFn = std::function<Vec(const Vec&, double)>;
  using ValueFn = std::function<double(const Vec&)>;

  CustomProx(ProxFn prox, ValueFn value, std::string name = "custom");

  Vec Prox(const Vec& v, double step) const override { return prox_(v, step); }
  double Value(const Vec& y) const override { return value_(y); }
  std::string Name() const override { return name_; }

 private:
  ProxFn prox_;
  ValueFn value_;
  std::string name_;
};

enum class ProxKind { kZero, kSpectralBox, kBoxBall, kCustom };

struct ProxSpec {
  ProxKind kind = ProxKind::kZero;
  // kSpectralBox
  std::vector<SpectralBlock> blocks;
  // kBoxBall
  int n = 0;
  double delta = 0.0;
  double radius = 0.0;
  // kCustom
  CustomProx::ProxFn custom_prox;
  CustomProx::ValueFn custom_value;
};

// Validates the spec and builds the operator.
std::shared_ptr<const ProxOperator> MakeProx(const ProxSpec& spec);

}  // namespace saddle

#endif  // SADDLE_PROX_H_
