#ifndef SADDLE_PROBLEMS_LQR_H_
#define SADDLE_PROBLEMS_LQR_H_

#include <cstdint>
#include <optional>
#include <span>

#include "saddle/problem.h"

namespace saddle {

// Generative adversarial imitation of an LQR expert:
//   min_K max_{(Q,R) in Theta}  m(K, Q, R) = C(K; Q, R) - C(K_E; Q, R)
// where C(K; Q, R) = E sum_t x_t^T Q x_t + u_t^T R u_t under
// x_{t+1} = (A - B K) x_t, u_t = -K x_t, E[x_0 x_0^T] = Sigma_0.
//
// Primal variable: vec(K) (k x d, column-major). Dual variable:
// (vec(Q), vec(R)), d*d + k*k entries. m is linear in (Q, R).
//
// With initial states supplied, Sigma_0 is their empirical second moment and
// sample i contributes Sigma_0 = x0_i x0_i^T, so per-sample gradients are
// exact for the sample-average cost C_n.
class LqrGailProblem final : public SaddleOracle {
 public:
  LqrGailProblem(Mat a, Mat b, Mat k_expert, Mat sigma0,
                 std::optional<Mat> initial_states = std::nullopt);

  int dim_x() const override { return k_ * d_; }
  int dim_y() const override { return d_ * d_ + k_ * k_; }

  double Value(const Vec& x, const Vec& y) const override;
  Vec GradX(const Vec& x, const Vec& y) const override;
  Vec GradY(const Vec& x, const Vec& y) const override;

  std::size_t num_samples() const override;
  Vec GradXSample(const Vec& x, const Vec& y, std::size_t i) const override;
  Vec GradYSample(const Vec& x, const Vec& y, std::size_t i) const override;
  // Second moments are linear in Sigma_0: one solve per batch.
  Vec GradXBatch(const Vec& x, const Vec& y,
                 std::span<const std::size_t> samples) const override;
  Vec GradYBatch(const Vec& x, const Vec& y,
                 std::span<const std::size_t> samples) const override;

  int state_dim() const { return d_; }
  int input_dim() const { return k_; }
  const Mat& a() const { return a_; }
  const Mat& b() const { return b_; }
  const Mat& k_expert() const { return k_expert_; }
  const Mat& sigma0() const { return sigma0_; }

  Mat UnpackK(const Vec& x) const;
  Mat UnpackQ(const Vec& y) const;
  Mat UnpackR(const Vec& y) const;
  Vec PackK(const Mat& k) const;
  Vec PackTheta(const Mat& q, const Mat& r) const;

  // Closed loop A - B K.
  Mat ClosedLoop(const Mat& k) const { return a_ - b_ * k; }

 private:
  Mat BatchSigma0(std::span<const std::size_t> samples) const;
  Vec GradXWith(const Vec& x, const Vec& y, const Mat& sigma0) const;
  Vec GradYWith(const Vec& x, const Mat& sigma0) const;

  int d_;
  int k_;
  Mat a_;
  Mat b_;
  Mat k_expert_;
  Mat sigma0_;
  std::optional<Mat> initial_states_;  // n x d
  // Expert second moments under sigma0_.
  Mat sigma_expert_;
};

// P_K solving P = Q + K^T R K + (A - BK)^T P (A - BK).
Mat ValueMatrix(const Mat& a, const Mat& b, const Mat& k, const Mat& q,
                const Mat& r);
// Sigma_K solving S = Sigma_0 + (A - BK) S (A - BK)^T.
Mat StateCovariance(const Mat& a, const Mat& b, const Mat& k,
                    const Mat& sigma0);

struct LqrCostAndGrads {
  double m = 0.0;
  Mat grad_k;
  Mat grad_q;
  Mat grad_r;
};

// m, grad_K m = 2((R + B^T P B) K - B^T P A) Sigma_K, grad_Q m =
// Sigma_K - Sigma_E, grad_R m = K Sigma_K K^T - K_E Sigma_E K_E^T.
LqrCostAndGrads LqrCostAndGradients(const LqrGailProblem& problem,
                                    const Mat& k, const Mat& q, const Mat& r);

// C(K; Q, R) = tr(P_K Sigma_0).
double LqrCost(const Mat& a, const Mat& b, const Mat& k, const Mat& q,
               const Mat& r, const Mat& sigma0);

// (1/n) sum_i x0_i^T P_K x0_i with x0_i ~ N(0, Sigma_0).
double LqrSampledCost(const LqrGailProblem& problem, const Mat& k,
                      const Mat& q, const Mat& r, std::uint64_t seed,
                      int n_samples);

// Optimal gain of the discounted-free LQR problem by Riccati value iteration.
Mat SolveLqrGain(const Mat& a, const Mat& b, const Mat& q, const Mat& r);

struct LqrOptions {
  int state_dim = 4;
  int input_dim = 3;
  std::uint64_t seed = 1;
  double alpha_q = 0.1;
  double beta_q = 100.0;
  double alpha_r = 0.1;
  double beta_r = 100.0;
  // Spectral radius of the random open-loop A.
  double open_loop_radius = 0.9;
  // 0: exact Sigma_0 = I. Otherwise sample this many x0 ~ N(0, I).
  int n_samples = 0;
  // Coefficient c of the optional regularizer (c/2)||theta - theta_0||^2
  // added to h.
  double regularizer = 0.0;
  double mu = 0.1;
  double l_xx = 200.0;
  double l_xy = 100.0;
};

// Random stable A (spectral radius open_loop_radius), random B, expert
// K_E optimal for random (Q_E, R_E) with eigenvalues in [1, 5]. Starts at
// K = 0 and theta = (I, I).
ProblemInstance MakeLqrGail(const LqrOptions& options);

}  // namespace saddle

#endif  // SADDLE_PROBLEMS_LQR_H_
