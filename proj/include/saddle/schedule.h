#ifndef SADDLE_SCHEDULE_H_
#define SADDLE_SCHEDULE_H_

#include <optional>
#include <string>
#include <vector>

#include "saddle/problem.h"

namespace saddle {

// How gamma_k is derived from lambda_k when not overridden.
enum class GammaRule {
  kWindowTop,    // gamma_k = (1 + alpha_k/4) * lambda_k
  kEqualLambda,  // gamma_k = lambda_k: plain gradient step in x
};

enum class LambdaRule {
  kHalfInverseLxx,  // lambda_k = 1 / (2 l_xx)
  // lambda_k = alpha_k * gamma_k with gamma_k = 1 / (2 l_xx) unless
  // overridden: the Nesterov-type primal step.
  kAlphaTimesGamma,
};

enum class SigmaRule {
  kStandard,      // sigma_k = mu / (36 l_xy^2)
  kConservative,  // sigma_k = mu^2 / (216 l_xy^2)
};

// Constant overrides replace a rule for every k.
struct ScheduleOverrides {
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::optional<double> lambda;
  std::optional<double> sigma;
  GammaRule gamma_rule = GammaRule::kWindowTop;
  LambdaRule lambda_rule = LambdaRule::kHalfInverseLxx;
  SigmaRule sigma_rule = SigmaRule::kStandard;
};

std::string ToString(GammaRule rule);
std::string ToString(LambdaRule rule);
std::string ToString(SigmaRule rule);
GammaRule ParseGammaRule(const std::string& s);
LambdaRule ParseLambdaRule(const std::string& s);
SigmaRule ParseSigmaRule(const std::string& s);

// Step-size sequences for a horizon T, tabulated for k = 0..T (the entry at
// k = T is only used to evaluate the stationarity measure after the last
// step). Immutable after construction.
//
// Default (zero-based k):
//   alpha_k = 2/(k+2), lambda_k = 1/(2 l_xx), gamma_k = (1 + alpha_k/4)
//   lambda_k, sigma_k = mu/(36 l_xy^2).
class Schedule {
 public:
  int horizon() const { return horizon_; }
  double l_xx() const { return l_xx_; }

  double alpha(int k) const { return alpha_.at(k); }
  double gamma(int k) const { return gamma_.at(k); }
  double lambda(int k) const { return lambda_.at(k); }
  double sigma(int k) const { return sigma_.at(k); }

  // Gamma_0 = 1, Gamma_k = (1 - alpha_k) Gamma_{k-1}; 0 <= k < T.
  double GammaProduct(int k) const;
  // sum_{tau=k}^{T-1} Gamma_tau, precomputed by one backward pass.
  double TailSum(int k) const;

  // lambda_k <= gamma_k <= (1 + alpha_k/4) lambda_k.
  bool InGammaWindow(int k) const;

  const ScheduleOverrides& overrides() const { return overrides_; }

 private:
  friend Schedule MakeSchedule(const ProblemConstants&, int,
                               const ScheduleOverrides&);

  int horizon_ = 0;
  double l_xx_ = 0.0;
  ScheduleOverrides overrides_;
  std::vector<double> alpha_;
  std::vector<double> gamma_;
  std::vector<double> lambda_;
  std::vector<double> sigma_;
  std::vector<double> gamma_product_;
  std::vector<double> tail_sum_;
};

// Builds the schedule. Throws InvalidArgument for l_xx <= 0, for l_xy = 0
// without a sigma override, or for nonpositive overrides, and ScheduleError
// when alpha_k leaves (0, 1] or gamma_k (1 - l_xx gamma_k) <= 0.
Schedule MakeSchedule(const ProblemConstants& constants, int horizon,
                      const ScheduleOverrides& overrides = {});

// C_k = 1 - l_xx g - l_xx (g - l)^2 / (2 a Gamma_k g) * sum_{tau>=k} Gamma_tau
// with g = gamma_k, l = lambda_k, a = alpha_k. Throws ScheduleError when
// Gamma_k = 0.
double CCoefficient(const Schedule& schedule,
                    const ProblemConstants& constants, int k);

}  // namespace saddle

#endif  // SADDLE_SCHEDULE_H_
