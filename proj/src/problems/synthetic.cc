#include "saddle/problems/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace saddle {
namespace {

Mat GaussianMatrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = normal(rng);
  }
  return m;
}

// Centers the columns and scales them so mean ||column||^2 = level^2.
Mat NoisePool(int dim, int count, double level, std::mt19937_64& rng) {
  if (level == 0.0 || count < 2) return Mat::Zero(dim, count);
  Mat pool = GaussianMatrix(dim, count, rng);
  const Vec mean = pool.rowwise().mean();
  pool.colwise() -= mean;
  const double ms = pool.colwise().squaredNorm().mean();
  return pool * (level / std::sqrt(ms));
}

}  // namespace

SyntheticPLProblem::SyntheticPLProblem(Mat h, Mat a, Mat noise_x, Mat noise_y)
    : h_(std::move(h)),
      a_(std::move(a)),
      noise_x_(std::move(noise_x)),
      noise_y_(std::move(noise_y)) {
  if (h_.rows() != h_.cols() || a_.cols() != h_.rows()) {
    throw InvalidArgument("SyntheticPLProblem: inconsistent H and A shapes");
  }
  if (noise_x_.rows() != h_.rows() || noise_y_.rows() != a_.rows() ||
      noise_x_.cols() != noise_y_.cols()) {
    throw InvalidArgument("SyntheticPLProblem: inconsistent noise pools");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(h_);
  const Vec& ev = eig.eigenvalues();
  const double cutoff = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  Vec inv = Vec::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff) inv[i] = 1.0 / ev[i];
  }
  h_pinv_ = eig.eigenvectors() * inv.asDiagonal() *
            eig.eigenvectors().transpose();
}

double SyntheticPLProblem::Value(const Vec& x, const Vec& y) const {
  return 0.5 * x.dot(h_ * x) + y.dot(a_ * x);
}

Vec SyntheticPLProblem::GradX(const Vec& x, const Vec& y) const {
  return h_ * x + a_.transpose() * y;
}

Vec SyntheticPLProblem::GradY(const Vec& x, const Vec& /*y*/) const {
  return a_ * x;
}

Vec SyntheticPLProblem::GradXSample(const Vec& x, const Vec& y,
                                    std::size_t i) const {
  return GradX(x, y) + noise_x_.col(static_cast<Eigen::Index>(i));
}

Vec SyntheticPLProblem::GradYSample(const Vec& x, const Vec& y,
                                    std::size_t i) const {
  return GradY(x, y) + noise_y_.col(static_cast<Eigen::Index>(i));
}

double SyntheticPLProblem::InnerMinimum(const Vec& y) const {
  const Vec c = a_.transpose() * y;
  return -0.5 * c.dot(h_pinv_ * c);
}

double PowerIterationSymmetric(const Mat& m, double tol, std::uint64_t seed) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument("PowerIterationSymmetric: need a square matrix");
  }
  std::mt19937_64 rng(seed);
  Vec v = GaussianMatrix(static_cast<int>(m.rows()), 1, rng).col(0);
  v.normalize();
  double lambda = v.dot(m * v);
  for (int it = 0; it < 200000; ++it) {
    Vec w = m * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    lambda = v.dot(w);
    if ((w - lambda * v).norm() <= tol * std::abs(lambda)) break;
    v = w / norm;
  }
  return lambda;
}

double SpectralNorm(const Mat& m, double tol) {
  if (m.size() == 0) return 0.0;
  return std::sqrt(std::max(0.0, PowerIterationSymmetric(m.transpose() * m, tol)));
}

ProblemInstance MakeSynthetic(const SyntheticOptions& o) {
  if (o.dim_x <= 0 || o.dim_y <= 0) {
    throw InvalidArgument("MakeSynthetic: dimensions must be positive");
  }
  if (!(o.mu > 0.0)) throw InvalidArgument("MakeSynthetic: mu must be > 0");
  if (o.rank_deficiency < 0 || o.rank_deficiency >= o.dim_x) {
    throw InvalidArgument("MakeSynthetic: need 0 <= rank_deficiency < dim_x");
  }
  if (o.coupling < 0.0 || o.noise_x < 0.0 || o.noise_y < 0.0) {
    throw InvalidArgument("MakeSynthetic: negative coupling or noise level");
  }
  if (o.noise_samples < 1) {
    throw InvalidArgument("MakeSynthetic: noise_samples must be >= 1");
  }
  std::mt19937_64 rng(o.seed);
  const Mat v = Eigen::HouseholderQR<Mat>(GaussianMatrix(o.dim_x, o.dim_x, rng))
                    .householderQ();
  const int rank = o.dim_x - o.rank_deficiency;
  Vec d = Vec::Zero(o.dim_x);
  std::uniform_real_distribution<double> unif(o.mu, 10.0 * o.mu);
  for (int i = 0; i < rank; ++i) d[i] = i == 0 ? o.mu : unif(rng);
  // Columns of v are the eigenvectors; the first `rank` span range(H).
  Mat h = v * d.asDiagonal() * v.transpose();
  h = 0.5 * (h + h.transpose());

  const Mat range = v.leftCols(rank);
  Mat a = GaussianMatrix(o.dim_y, o.dim_x, rng) * range * range.transpose();
  if (o.coupling > 0.0) {
    a *= o.coupling / SpectralNorm(a, 1e-13);
  } else {
    a.setZero();
  }
  Vec x0 = GaussianMatrix(o.dim_x, 1, rng).col(0);
  Mat noise_x = NoisePool(o.dim_x, o.noise_samples, o.noise_x, rng);
  Mat noise_y = NoisePool(o.dim_y, o.noise_samples, o.noise_y, rng);

  ProblemInstance p;
  p.name = "synthetic";
  p.constants.l_xx = PowerIterationSymmetric(h);
  p.constants.l_xy = o.coupling > 0.0 ? SpectralNorm(a) : 0.0;
  p.constants.mu = o.mu;
  p.constants.nu_x = o.noise_x;
  p.constants.nu_y = o.noise_y;
  p.x0 = std::move(x0);
  p.y0 = Vec::Zero(o.dim_y);
  p.oracle = std::make_shared<SyntheticPLProblem>(
      std::move(h), std::move(a), std::move(noise_x), std::move(noise_y));
  p.h = std::make_shared<ZeroProx>();
  return p;
}

}  // namespace saddle
