#ifndef SADDLE_PROBLEMS_DRO_H_
#define SADDLE_PROBLEMS_DRO_H_

#include <cstdint>
#include <optional>

#include "saddle/problem.h"
#include "saddle/problems/libsvm.h"

namespace saddle {

// Distributionally robust logistic regression
//   L(x, y) = sum_i y_i log(1 + exp(-b_i a_i^T x))
// over the weight set {y >= delta/n, ||n y - 1|| <= radius}.
//
// Sample i (uniform) gives unbiased estimates
//   grad_x: n y_i grad l_i(x),   grad_y: n l_i(x) e_i.
class DroLogisticProblem final : public SaddleOracle {
 public:
  DroLogisticProblem(Mat data, Vec labels);

  int dim_x() const override { return static_cast<int>(data_.cols()); }
  int dim_y() const override { return static_cast<int>(data_.rows()); }

  double Value(const Vec& x, const Vec& y) const override;
  Vec GradX(const Vec& x, const Vec& y) const override;
  Vec GradY(const Vec& x, const Vec& y) const override;

  std::size_t num_samples() const override {
    return static_cast<std::size_t>(data_.rows());
  }
  Vec GradXSample(const Vec& x, const Vec& y, std::size_t i) const override;
  Vec GradYSample(const Vec& x, const Vec& y, std::size_t i) const override;

  // Per-sample losses l_i(x) = softplus(-b_i a_i^T x).
  Vec Losses(const Vec& x) const;

  const Mat& data() const { return data_; }
  const Vec& labels() const { return labels_; }

 private:
  Mat data_;
  Vec labels_;
};

struct DroValueAndGrads {
  double value = 0.0;
  Vec grad_x;
  Vec grad_y;
};

DroValueAndGrads DroValueAndGradients(const DroLogisticProblem& problem,
                                      const Vec& x, const Vec& y);

// log(1 + exp(t)) without overflow.
double Softplus(double t);
// 1 / (1 + exp(-t)) without overflow.
double Sigmoid(double t);

struct DroOptions {
  double delta = 0.01;
  double radius = 100.0;  // ||n y - 1|| <= radius, i.e. 2 * rho
  double mu = 0.1;
  // Defaults: l_xx = 0.25 * lambda_max(A^T A) * (1 + radius) / n (the
  // largest feasible weight), l_xy = ||A||_2.
  std::optional<double> l_xx;
  std::optional<double> l_xy;
};

// x0 = 0, y0 = 1/n.
ProblemInstance MakeDro(const LibsvmData& data, const DroOptions& options);
ProblemInstance MakeDro(Mat features, Vec labels, const DroOptions& options);

// Gaussian features, labels sign(a^T w) for a random w, each flipped with
// probability `flip_probability`.
LibsvmData MakeSyntheticClassification(int n, int d, std::uint64_t seed,
                                       double flip_probability = 0.1);

}  // namespace saddle

#endif  // SADDLE_PROBLEMS_DRO_H_
