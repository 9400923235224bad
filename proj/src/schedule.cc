#include "saddle/schedule.h"

#include <cmath>

namespace saddle {
namespace {

void RequirePositive(const std::optional<double>& v, const char* name) {
  if (v && !(*v > 0.0 && std::isfinite(*v))) {
    throw InvalidArgument(std::string("schedule override ") + name +
                          " must be positive and finite");
  }
}

}  // namespace

std::string ToString(GammaRule rule) {
  return rule == GammaRule::kWindowTop ? "window_top" : "equal_lambda";
}

std::string ToString(LambdaRule rule) {
  return rule == LambdaRule::kHalfInverseLxx ? "half_inverse_lxx"
                                             : "alpha_gamma";
}

std::string ToString(SigmaRule rule) {
  return rule == SigmaRule::kStandard ? "standard" : "conservative";
}

GammaRule ParseGammaRule(const std::string& s) {
  if (s == "window_top") return GammaRule::kWindowTop;
  if (s == "equal_lambda") return GammaRule::kEqualLambda;
  throw InvalidArgument("unknown gamma rule '" + s + "'");
}

LambdaRule ParseLambdaRule(const std::string& s) {
  if (s == "half_inverse_lxx") return LambdaRule::kHalfInverseLxx;
  if (s == "alpha_gamma") return LambdaRule::kAlphaTimesGamma;
  throw InvalidArgument("unknown lambda rule '" + s + "'");
}

SigmaRule ParseSigmaRule(const std::string& s) {
  if (s == "standard") return SigmaRule::kStandard;
  if (s == "conservative") return SigmaRule::kConservative;
  throw InvalidArgument("unknown sigma rule '" + s + "'");
}

double Schedule::GammaProduct(int k) const {
  if (k < 0 || k >= horizon_) {
    throw InvalidArgument("GammaProduct: index outside [0, T)");
  }
  return gamma_product_[k];
}

double Schedule::TailSum(int k) const {
  if (k < 0 || k >= horizon_) {
    throw InvalidArgument("TailSum: index outside [0, T)");
  }
  return tail_sum_[k];
}

bool Schedule::InGammaWindow(int k) const {
  const double l = lambda(k);
  const double g = gamma(k);
  const double slack = 1e-15 * l;
  return l <= g + slack && g <= (1.0 + alpha(k) / 4.0) * l + slack;
}

Schedule MakeSchedule(const ProblemConstants& constants, int horizon,
                      const ScheduleOverrides& overrides) {
  if (horizon < 0) throw InvalidArgument("MakeSchedule: negative horizon");
  if (!(constants.l_xx > 0.0) || !std::isfinite(constants.l_xx)) {
    throw InvalidArgument("MakeSchedule: l_xx must be positive (step 1/(2 l_xx))");
  }
  RequirePositive(overrides.alpha, "alpha");
  RequirePositive(overrides.gamma, "gamma");
  RequirePositive(overrides.lambda, "lambda");
  RequirePositive(overrides.sigma, "sigma");
  if (!overrides.sigma) {
    if (!(constants.l_xy > 0.0)) {
      throw InvalidArgument(
          "MakeSchedule: l_xy = 0 requires an explicit sigma override");
    }
    if (!(constants.mu > 0.0)) {
      throw InvalidArgument("MakeSchedule: mu must be positive");
    }
  }
  if (overrides.lambda_rule == LambdaRule::kAlphaTimesGamma &&
      overrides.lambda) {
    throw InvalidArgument(
        "MakeSchedule: lambda override conflicts with lambda = alpha*gamma");
  }

  Schedule s;
  s.horizon_ = horizon;
  s.l_xx_ = constants.l_xx;
  s.overrides_ = overrides;
  const int n = horizon + 1;
  s.alpha_.resize(n);
  s.gamma_.resize(n);
  s.lambda_.resize(n);
  s.sigma_.resize(n);

  const double base_step = 1.0 / (2.0 * constants.l_xx);
  double sigma_default = 0.0;
  if (!overrides.sigma) {
    const double lxy2 = constants.l_xy * constants.l_xy;
    sigma_default = overrides.sigma_rule == SigmaRule::kStandard
                        ? constants.mu / (36.0 * lxy2)
                        : constants.mu * constants.mu / (216.0 * lxy2);
  }

  for (int k = 0; k < n; ++k) {
    const double a = overrides.alpha.value_or(2.0 / (k + 2.0));
    if (!(a > 0.0 && a <= 1.0)) {
      throw ScheduleError("alpha_k must lie in (0, 1]");
    }
    double g = 0.0;
    double l = 0.0;
    if (overrides.lambda_rule == LambdaRule::kAlphaTimesGamma) {
      g = overrides.gamma.value_or(base_step);
      l = a * g;
    } else {
      l = overrides.lambda.value_or(base_step);
      if (overrides.gamma) {
        g = *overrides.gamma;
      } else {
        g = overrides.gamma_rule == GammaRule::kWindowTop
                ? (1.0 + a / 4.0) * l
                : l;
      }
    }
    if (!(g * (1.0 - constants.l_xx * g) > 0.0)) {
      throw ScheduleError(
          "gamma_k (1 - l_xx gamma_k) must be positive (gamma_k < 1/l_xx)");
    }
    s.alpha_[k] = a;
    s.gamma_[k] = g;
    s.lambda_[k] = l;
    s.sigma_[k] = overrides.sigma.value_or(sigma_default);
  }

  s.gamma_product_.resize(horizon);
  s.tail_sum_.resize(horizon);
  for (int k = 0; k < horizon; ++k) {
    s.gamma_product_[k] =
        k == 0 ? 1.0 : (1.0 - s.alpha_[k]) * s.gamma_product_[k - 1];
  }
  double tail = 0.0;
  for (int k = horizon - 1; k >= 0; --k) {
    tail += s.gamma_product_[k];
    s.tail_sum_[k] = tail;
  }
  return s;
}

double CCoefficient(const Schedule& schedule,
                    const ProblemConstants& constants, int k) {
  const double gp = schedule.GammaProduct(k);
  if (!(gp > 0.0)) {
    throw ScheduleError("C_k undefined: Gamma_k = 0 at k = " +
                        std::to_string(k));
  }
  const double g = schedule.gamma(k);
  const double l = schedule.lambda(k);
  const double a = schedule.alpha(k);
  const double lxx = constants.l_xx;
  const double d = g - l;
  return 1.0 - lxx * g -
         lxx * d * d / (2.0 * a * gp * g) * schedule.TailSum(k);
}

}  // namespace saddle
