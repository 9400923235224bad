#include "saddle/problems/dro.h"

#include <cmath>
#include <random>
#include <utility>

#include "saddle/problems/synthetic.h"

namespace saddle {

double Softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

DroLogisticProblem::DroLogisticProblem(Mat data, Vec labels)
    : data_(std::move(data)), labels_(std::move(labels)) {
  if (data_.rows() == 0 || data_.cols() == 0) {
    throw InvalidArgument("DroLogisticProblem: empty data matrix");
  }
  if (labels_.size() != data_.rows()) {
    throw InvalidArgument("DroLogisticProblem: label count mismatch");
  }
  if (((labels_.array() != 1.0) && (labels_.array() != -1.0)).any()) {
    throw InvalidArgument("DroLogisticProblem: labels must be +1 or -1");
  }
}

Vec DroLogisticProblem::Losses(const Vec& x) const {
  const Vec margins = (data_ * x).cwiseProduct(labels_);
  return margins.unaryExpr([](double m) { return Softplus(-m); });
}

double DroLogisticProblem::Value(const Vec& x, const Vec& y) const {
  return y.dot(Losses(x));
}

Vec DroLogisticProblem::GradX(const Vec& x, const Vec& y) const {
  const Vec margins = (data_ * x).cwiseProduct(labels_);
  // d/dx softplus(-b a^T x) = -b sigmoid(-b a^T x) a
  Vec w(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    w[i] = -y[i] * labels_[i] * Sigmoid(-margins[i]);
  }
  return data_.transpose() * w;
}

Vec DroLogisticProblem::GradY(const Vec& x, const Vec& /*y*/) const {
  return Losses(x);
}

Vec DroLogisticProblem::GradXSample(const Vec& x, const Vec& y,
                                    std::size_t i) const {
  const auto r = static_cast<Eigen::Index>(i);
  const double n = static_cast<double>(data_.rows());
  const double m = labels_[r] * data_.row(r).dot(x);
  return (n * y[r] * -labels_[r] * Sigmoid(-m)) * data_.row(r).transpose();
}

Vec DroLogisticProblem::GradYSample(const Vec& x, const Vec& /*y*/,
                                    std::size_t i) const {
  const auto r = static_cast<Eigen::Index>(i);
  const double n = static_cast<double>(data_.rows());
  Vec g = Vec::Zero(data_.rows());
  g[r] = n * Softplus(-labels_[r] * data_.row(r).dot(x));
  return g;
}

DroValueAndGrads DroValueAndGradients(const DroLogisticProblem& problem,
                                      const Vec& x, const Vec& y) {
  DroValueAndGrads out;
  out.grad_y = problem.Losses(x);
  out.value = y.dot(out.grad_y);
  out.grad_x = problem.GradX(x, y);
  return out;
}

ProblemInstance MakeDro(Mat features, Vec labels, const DroOptions& options) {
  auto oracle = std::make_shared<DroLogisticProblem>(std::move(features),
                                                     std::move(labels));
  const Mat& a = oracle->data();
  const double n = static_cast<double>(a.rows());
  ProblemInstance p;
  p.name = "dro";
  p.constants.mu = options.mu;
  const double a_norm = SpectralNorm(a);
  p.constants.l_xy = options.l_xy.value_or(a_norm);
  p.constants.l_xx = options.l_xx.value_or(0.25 * a_norm * a_norm *
                                           (1.0 + options.radius) / n);
  p.x0 = Vec::Zero(a.cols());
  p.y0 = Vec::Constant(a.rows(), 1.0 / n);
  p.h = std::make_shared<BoxBallProjection>(static_cast<int>(a.rows()),
                                            options.delta, options.radius);
  p.oracle = std::move(oracle);
  return p;
}

ProblemInstance MakeDro(const LibsvmData& data, const DroOptions& options) {
  return MakeDro(Mat(data.features), data.labels, options);
}

LibsvmData MakeSyntheticClassification(int n, int d, std::uint64_t seed,
                                       double flip_probability) {
  if (n <= 0 || d <= 0) {
    throw InvalidArgument("MakeSyntheticClassification: sizes must be > 0");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution flip(flip_probability);
  Vec w(d);
  for (auto& v : w) v = normal(rng);
  Mat a(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = normal(rng) / std::sqrt(d);
  }
  Vec labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = a.row(i).dot(w) >= 0.0 ? 1.0 : -1.0;
    labels[i] = flip(rng) ? -s : s;
  }
  LibsvmData data;
  data.features = a.sparseView();
  data.labels = labels;
  return data;
}

}  // namespace saddle
