#include "saddle/problems/lqr.h"

#include <cmath>
#include <random>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "saddle/problems/lyapunov.h"

namespace saddle {
namespace {

Mat Gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

Mat RandomSpd(int dim, double lo, double hi, std::mt19937_64& rng) {
  const Mat v = Eigen::HouseholderQR<Mat>(Gaussian(dim, dim, rng)).householderQ();
  std::uniform_real_distribution<double> unif(lo, hi);
  Vec ev(dim);
  for (auto& e : ev) e = unif(rng);
  Mat s = v * ev.asDiagonal() * v.transpose();
  return 0.5 * (s + s.transpose());
}

}  // namespace

Mat ValueMatrix(const Mat& a, const Mat& b, const Mat& k, const Mat& q,
                const Mat& r) {
  return SolveDiscreteLyapunov(a - b * k, q + k.transpose() * r * k);
}

Mat StateCovariance(const Mat& a, const Mat& b, const Mat& k,
                    const Mat& sigma0) {
  return SolveDiscreteLyapunov((a - b * k).transpose(), sigma0);
}

double LqrCost(const Mat& a, const Mat& b, const Mat& k, const Mat& q,
               const Mat& r, const Mat& sigma0) {
  return (ValueMatrix(a, b, k, q, r) * sigma0).trace();
}

LqrGailProblem::LqrGailProblem(Mat a, Mat b, Mat k_expert, Mat sigma0,
                               std::optional<Mat> initial_states)
    : d_(static_cast<int>(a.rows())),
      k_(static_cast<int>(b.cols())),
      a_(std::move(a)),
      b_(std::move(b)),
      k_expert_(std::move(k_expert)),
      sigma0_(std::move(sigma0)),
      initial_states_(std::move(initial_states)) {
  if (a_.rows() != a_.cols() || b_.rows() != a_.rows() ||
      k_expert_.rows() != b_.cols() || k_expert_.cols() != a_.rows()) {
    throw InvalidArgument("LqrGailProblem: inconsistent A, B, K_E shapes");
  }
  if (initial_states_) {
    if (initial_states_->cols() != d_ || initial_states_->rows() == 0) {
      throw InvalidArgument("LqrGailProblem: initial states must be n x d");
    }
    sigma0_ = initial_states_->transpose() * *initial_states_ /
              static_cast<double>(initial_states_->rows());
  }
  if (sigma0_.rows() != d_ || sigma0_.cols() != d_) {
    throw InvalidArgument("LqrGailProblem: Sigma_0 must be d x d");
  }
  sigma_expert_ = StateCovariance(a_, b_, k_expert_, sigma0_);
}

Mat LqrGailProblem::UnpackK(const Vec& x) const {
  if (x.size() != dim_x()) throw InvalidArgument("LQR: bad K vector size");
  return Eigen::Map<const Mat>(x.data(), k_, d_);
}

Mat LqrGailProblem::UnpackQ(const Vec& y) const {
  if (y.size() != dim_y()) throw InvalidArgument("LQR: bad theta size");
  return Eigen::Map<const Mat>(y.data(), d_, d_);
}

Mat LqrGailProblem::UnpackR(const Vec& y) const {
  if (y.size() != dim_y()) throw InvalidArgument("LQR: bad theta size");
  return Eigen::Map<const Mat>(y.data() + d_ * d_, k_, k_);
}

Vec LqrGailProblem::PackK(const Mat& k) const {
  return Eigen::Map<const Vec>(k.data(), k.size());
}

Vec LqrGailProblem::PackTheta(const Mat& q, const Mat& r) const {
  Vec y(dim_y());
  y.head(d_ * d_) = Eigen::Map<const Vec>(q.data(), q.size());
  y.tail(k_ * k_) = Eigen::Map<const Vec>(r.data(), r.size());
  return y;
}

std::size_t LqrGailProblem::num_samples() const {
  return initial_states_ ? static_cast<std::size_t>(initial_states_->rows())
                         : 0;
}

double LqrGailProblem::Value(const Vec& x, const Vec& y) const {
  const Mat k = UnpackK(x);
  const Mat q = UnpackQ(y);
  const Mat r = UnpackR(y);
  const Mat sigma_k = StateCovariance(a_, b_, k, sigma0_);
  const double c = ((q + k.transpose() * r * k) * sigma_k).trace();
  const double c_e =
      ((q + k_expert_.transpose() * r * k_expert_) * sigma_expert_).trace();
  return c - c_e;
}

Vec LqrGailProblem::GradXWith(const Vec& x, const Vec& y,
                              const Mat& sigma0) const {
  const Mat k = UnpackK(x);
  const Mat q = UnpackQ(y);
  const Mat r = UnpackR(y);
  const Mat p = ValueMatrix(a_, b_, k, q, r);
  const Mat sigma_k = StateCovariance(a_, b_, k, sigma0);
  const Mat g = 2.0 * ((r + b_.transpose() * p * b_) * k -
                       b_.transpose() * p * a_) *
                sigma_k;
  return PackK(g);
}

Vec LqrGailProblem::GradYWith(const Vec& x, const Mat& sigma0) const {
  const Mat k = UnpackK(x);
  const Mat sigma_k = StateCovariance(a_, b_, k, sigma0);
  const Mat sigma_e = &sigma0 == &sigma0_
                          ? sigma_expert_
                          : StateCovariance(a_, b_, k_expert_, sigma0);
  return PackTheta(sigma_k - sigma_e,
                   k * sigma_k * k.transpose() -
                       k_expert_ * sigma_e * k_expert_.transpose());
}

Vec LqrGailProblem::GradX(const Vec& x, const Vec& y) const {
  return GradXWith(x, y, sigma0_);
}

Vec LqrGailProblem::GradY(const Vec& x, const Vec& /*y*/) const {
  return GradYWith(x, sigma0_);
}

Mat LqrGailProblem::BatchSigma0(std::span<const std::size_t> samples) const {
  if (!initial_states_) {
    throw InvalidArgument("LqrGailProblem: no initial-state samples");
  }
  if (samples.empty()) throw InvalidArgument("LqrGailProblem: empty batch");
  Mat s = Mat::Zero(d_, d_);
  for (const std::size_t i : samples) {
    if (i >= num_samples()) {
      throw InvalidArgument("LqrGailProblem: sample index out of range");
    }
    const Vec x0 = initial_states_->row(static_cast<Eigen::Index>(i));
    s += x0 * x0.transpose();
  }
  return s / static_cast<double>(samples.size());
}

Vec LqrGailProblem::GradXSample(const Vec& x, const Vec& y,
                                std::size_t i) const {
  const std::size_t one[] = {i};
  return GradXBatch(x, y, one);
}

Vec LqrGailProblem::GradYSample(const Vec& x, const Vec& y,
                                std::size_t i) const {
  const std::size_t one[] = {i};
  return GradYBatch(x, y, one);
}

Vec LqrGailProblem::GradXBatch(const Vec& x, const Vec& y,
                               std::span<const std::size_t> samples) const {
  return GradXWith(x, y, BatchSigma0(samples));
}

Vec LqrGailProblem::GradYBatch(const Vec& x, const Vec& /*y*/,
                               std::span<const std::size_t> samples) const {
  return GradYWith(x, BatchSigma0(samples));
}

LqrCostAndGrads LqrCostAndGradients(const LqrGailProblem& problem,
                                    const Mat& k, const Mat& q, const Mat& r) {
  const Vec x = problem.PackK(k);
  const Vec y = problem.PackTheta(q, r);
  LqrCostAndGrads out;
  out.m = problem.Value(x, y);
  out.grad_k = problem.UnpackK(problem.GradX(x, y));
  const Vec gy = problem.GradY(x, y);
  out.grad_q = problem.UnpackQ(gy);
  out.grad_r = problem.UnpackR(gy);
  return out;
}

double LqrSampledCost(const LqrGailProblem& problem, const Mat& k,
                      const Mat& q, const Mat& r, std::uint64_t seed,
                      int n_samples) {
  if (n_samples < 1) throw InvalidArgument("LqrSampledCost: n_samples < 1");
  const Mat p = ValueMatrix(problem.a(), problem.b(), k, q, r);
  Eigen::SelfAdjointEigenSolver<Mat> eig(problem.sigma0());
  const Mat root = eig.eigenvectors() *
                   eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                   eig.eigenvectors().transpose();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = problem.state_dim();
  double total = 0.0;
  Vec z(d);
  for (int i = 0; i < n_samples; ++i) {
    for (auto& v : z) v = normal(rng);
    const Vec x0 = root * z;
    total += x0.dot(p * x0);
  }
  return total / n_samples;
}

Mat SolveLqrGain(const Mat& a, const Mat& b, const Mat& q, const Mat& r) {
  Mat p = q;
  Mat k;
  for (int it = 0; it < 100000; ++it) {
    const Mat btp = b.transpose() * p;
    k = (r + btp * b).partialPivLu().solve(btp * a);
    Mat next = q + a.transpose() * p * a - a.transpose() * p * b * k;
    next = 0.5 * (next + next.transpose());
    const double change = (next - p).norm();
    p = std::move(next);
    if (change <= 1e-14 * p.norm()) break;
  }
  const Mat btp = b.transpose() * p;
  return (r + btp * b).partialPivLu().solve(btp * a);
}

ProblemInstance MakeLqrGail(const LqrOptions& o) {
  if (o.state_dim <= 0 || o.input_dim <= 0) {
    throw InvalidArgument("MakeLqrGail: dimensions must be positive");
  }
  if (!(o.open_loop_radius > 0.0 && o.open_loop_radius < 1.0)) {
    throw InvalidArgument("MakeLqrGail: open-loop radius must be in (0, 1)");
  }
  std::mt19937_64 rng(o.seed);
  const int d = o.state_dim;
  const int k = o.input_dim;
  Mat a = Gaussian(d, d, rng);
  a *= o.open_loop_radius / SpectralRadius(a);
  const Mat b = Gaussian(d, k, rng) / std::sqrt(static_cast<double>(d));
  const Mat q_e = RandomSpd(d, 1.0, 5.0, rng);
  const Mat r_e = RandomSpd(k, 1.0, 5.0, rng);
  Mat k_e = SolveLqrGain(a, b, q_e, r_e);

  std::optional<Mat> states;
  if (o.n_samples > 0) states = Gaussian(o.n_samples, d, rng);
  auto oracle = std::make_shared<LqrGailProblem>(
      a, b, std::move(k_e), Mat::Identity(d, d), std::move(states));

  ProblemInstance p;
  p.name = "lqr";
  p.constants.mu = o.mu;
  p.constants.l_xx = o.l_xx;
  p.constants.l_xy = o.l_xy;
  p.x0 = Vec::Zero(oracle->dim_x());
  p.y0 = oracle->PackTheta(Mat::Identity(d, d), Mat::Identity(k, k));
  std::shared_ptr<const ProxOperator> box =
      std::make_shared<SpectralBoxProjection>(std::vector<SpectralBlock>{
          {d, o.alpha_q, o.beta_q}, {k, o.alpha_r, o.beta_r}});
  if (o.regularizer > 0.0) {
    box = std::make_shared<QuadraticRegularizedProx>(box, o.regularizer, p.y0);
  }
  p.h = std::move(box);
  p.oracle = std::move(oracle);
  return p;
}

}  // namespace saddle
