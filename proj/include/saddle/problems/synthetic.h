#ifndef SADDLE_PROBLEMS_SYNTHETIC_H_
#define SADDLE_PROBLEMS_SYNTHETIC_H_

#include <cstdint>
#include <memory>

#include "saddle/problem.h"

namespace saddle {

// L(x, y) = 0.5 x^T H x + y^T A x with H PSD (possibly singular) and
// range(A^T) inside range(H), so L(., y) is PL with constant
// lambda_min^+(H) for every y while not strongly convex when H is singular.
//
// The stochastic oracle adds a zero-mean perturbation drawn from a finite
// pool: L(x, y; i) = L(x, y) + e_x[i]^T x + e_y[i]^T y, with the pool
// centered and scaled so that mean ||e_x||^2 = nu_x^2 (same for y).
class SyntheticPLProblem final : public SaddleOracle {
 public:
  SyntheticPLProblem(Mat h, Mat a, Mat noise_x, Mat noise_y);

  int dim_x() const override { return static_cast<int>(h_.rows()); }
  int dim_y() const override { return static_cast<int>(a_.rows()); }

  double Value(const Vec& x, const Vec& y) const override;
  Vec GradX(const Vec& x, const Vec& y) const override;
  Vec GradY(const Vec& x, const Vec& y) const override;

  std::size_t num_samples() const override {
    return static_cast<std::size_t>(noise_x_.cols());
  }
  Vec GradXSample(const Vec& x, const Vec& y, std::size_t i) const override;
  Vec GradYSample(const Vec& x, const Vec& y, std::size_t i) const override;

  // min_x L(x, y) = -0.5 (A^T y)^T H^+ (A^T y).
  double InnerMinimum(const Vec& y) const;

  const Mat& h() const { return h_; }
  const Mat& a() const { return a_; }
  // Columns are the per-sample perturbations.
  const Mat& noise_x() const { return noise_x_; }
  const Mat& noise_y() const { return noise_y_; }

 private:
  Mat h_;
  Mat a_;
  Mat noise_x_;
  Mat noise_y_;
  Mat h_pinv_;
};

struct SyntheticOptions {
  int dim_x = 20;
  int dim_y = 10;
  double mu = 0.5;
  int rank_deficiency = 0;
  double coupling = 1.0;
  std::uint64_t seed = 1;
  double noise_x = 0.0;
  double noise_y = 0.0;
  int noise_samples = 64;
};

// Builds H = V^T D V with `rank_deficiency` zero eigenvalues, smallest
// positive eigenvalue mu and the rest uniform in [mu, 10 mu], and A with
// spectral norm `coupling`. l_xx = lambda_max(H) and l_xy = ||A||_2 are
// computed by power iteration; h = 0; x0 ~ N(0, I), y0 = 0.
ProblemInstance MakeSynthetic(const SyntheticOptions& options);

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double PowerIterationSymmetric(const Mat& m, double tol = 1e-10,
                               std::uint64_t seed = 7);

// ||M||_2 via power iteration on M^T M.
double SpectralNorm(const Mat& m, double tol = 1e-10);

}  // namespace saddle

#endif  // SADDLE_PROBLEMS_SYNTHETIC_H_
