#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "saddle/problem.h"
#include "saddle/schedule.h"
#include "saddle/state.h"
#include "test_util.h"

namespace saddle {
namespace {

ProblemConstants Constants(double l_xx, double l_xy, double mu) {
  ProblemConstants c;
  c.l_xx = l_xx;
  c.l_xy = l_xy;
  c.mu = mu;
  return c;
}

TEST(ScheduleTest, LambdaIsHalfInverseLxx) {
  const Schedule s = MakeSchedule(Constants(0.5, 1.0, 1.0), 10);
  EXPECT_DOUBLE_EQ(s.lambda(3), 1.0);
}

TEST(ScheduleTest, AlphaShiftedSequence) {
  const Schedule s = MakeSchedule(Constants(1.0, 1.0, 1.0), 10);
  EXPECT_DOUBLE_EQ(s.alpha(0), 1.0);
  EXPECT_DOUBLE_EQ(s.alpha(1), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.alpha(2), 0.5);
  for (int k = 0; k < 10; ++k) {
    double product = 1.0;
    for (int j = 1; j <= k; ++j) product *= 1.0 - 2.0 / (j + 2.0);
    EXPECT_NEAR(s.GammaProduct(k), product, 1e-15);
    EXPECT_NEAR(s.GammaProduct(k), 2.0 / ((k + 1.0) * (k + 2.0)), 1e-15);
  }
}

TEST(ScheduleTest, SigmaStandardValue) {
  const Schedule s = MakeSchedule(Constants(1.0, 3.0, 0.9), 5);
  for (int k = 0; k <= 5; ++k) EXPECT_NEAR(s.sigma(k), 1.0 / 360.0, 1e-17);
}

TEST(ScheduleTest, SigmaConservativePreset) {
  ScheduleOverrides o;
  o.sigma_rule = SigmaRule::kConservative;
  const Schedule s = MakeSchedule(Constants(1.0, 3.0, 0.9), 5, o);
  EXPECT_NEAR(s.sigma(0), 0.81 / (216.0 * 9.0), 1e-17);
}

TEST(ScheduleTest, GammaEqualLambdaOverrideAccepted) {
  ScheduleOverrides o;
  o.gamma_rule = GammaRule::kEqualLambda;
  const Schedule s = MakeSchedule(Constants(2.0, 1.0, 1.0), 20, o);
  for (int k = 0; k <= 20; ++k) {
    EXPECT_EQ(s.gamma(k), s.lambda(k));
    EXPECT_TRUE(s.InGammaWindow(k));
  }
}

TEST(ScheduleTest, DefaultGammaTopOfWindow) {
  const Schedule s = MakeSchedule(Constants(2.0, 1.0, 1.0), 20);
  for (int k = 0; k < 20; ++k) {
    EXPECT_DOUBLE_EQ(s.gamma(k), (1.0 + s.alpha(k) / 4.0) * s.lambda(k));
    EXPECT_TRUE(s.InGammaWindow(k));
    EXPECT_GT(s.gamma(k) * (1.0 - 2.0 * s.gamma(k)), 0.0);
  }
}

TEST(ScheduleTest, AlphaGammaRule) {
  ScheduleOverrides o;
  o.lambda_rule = LambdaRule::kAlphaTimesGamma;
  const Schedule s = MakeSchedule(Constants(1.0, 1.0, 1.0), 10, o);
  for (int k = 0; k <= 10; ++k) {
    EXPECT_DOUBLE_EQ(s.gamma(k), 0.5);
    EXPECT_DOUBLE_EQ(s.lambda(k), s.alpha(k) * 0.5);
  }
  o.lambda = 0.1;
  EXPECT_THROW(MakeSchedule(Constants(1.0, 1.0, 1.0), 10, o), InvalidArgument);
}

TEST(ScheduleTest, GammaProductFirstIsOne) {
  const Schedule s = MakeSchedule(Constants(1.0, 1.0, 1.0), 3);
  EXPECT_EQ(s.GammaProduct(0), 1.0);
  EXPECT_NEAR(s.GammaProduct(2), 1.0 / 6.0, 1e-16);
}

TEST(ScheduleTest, AlphaOneAnnihilatesGamma) {
  ScheduleOverrides o;
  o.alpha = 1.0;
  const Schedule s = MakeSchedule(Constants(1.0, 1.0, 1.0), 5, o);
  EXPECT_EQ(s.GammaProduct(0), 1.0);
  for (int k = 1; k < 5; ++k) EXPECT_EQ(s.GammaProduct(k), 0.0);
  EXPECT_NO_THROW(CCoefficient(s, Constants(1.0, 1.0, 1.0), 0));
  EXPECT_THROW(CCoefficient(s, Constants(1.0, 1.0, 1.0), 1), ScheduleError);
}

TEST(ScheduleTest, CkEqualStepEquivalencesRegime) {
  ScheduleOverrides o;
  o.gamma = 1.0;
  o.lambda = 1.0;
  const ProblemConstants c = Constants(0.5, 1.0, 1.0);
  const Schedule s = MakeSchedule(c, 10, o);
  for (int k = 0; k < 10; ++k) EXPECT_DOUBLE_EQ(CCoefficient(s, c, k), 0.5);
}

TEST(ScheduleTest, CkSingleStepByDirectSum) {
  const ProblemConstants c = Constants(1.5, 1.0, 1.0);
  const Schedule s = MakeSchedule(c, 1);
  const double l = 1.0 / 3.0;
  const double g = 1.25 * l;
  const double expected = 1.0 - 1.5 * g - 1.5 * (g - l) * (g - l) / (2.0 * g);
  EXPECT_NEAR(CCoefficient(s, c, 0), expected, 1e-15);
}

TEST(ScheduleTest, CkBoundAndTelescoping) {
  const ProblemConstants c = Constants(3.0, 1.0, 1.0);
  for (const int t : {2, 10, 100, 1000, 10000}) {
    const Schedule s = MakeSchedule(c, t);
    double min_c = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (int k = 0; k < t; ++k) {
      const double ck = CCoefficient(s, c, k);
      min_c = std::min(min_c, ck);
      EXPECT_LE(ck, 1.0 - c.l_xx * s.gamma(k) + 1e-15);
      if (k > 0) {
        EXPECT_LT(s.GammaProduct(k), s.GammaProduct(k - 1));
      }
      sum += s.alpha(k) / s.GammaProduct(k);
    }
    EXPECT_GE(min_c, 11.0 / 32.0) << "T=" << t;
    const double target = 1.0 / s.GammaProduct(t - 1);
    EXPECT_NEAR(sum / target, 1.0, 1e-10) << "T=" << t;
  }
}

TEST(ScheduleTest, TailSumMatchesDirectSummation) {
  const Schedule s = MakeSchedule(Constants(1.0, 1.0, 1.0), 50);
  for (int k = 0; k < 50; ++k) {
    double direct = 0.0;
    for (int j = k; j < 50; ++j) direct += s.GammaProduct(j);
    EXPECT_NEAR(s.TailSum(k), direct, 1e-14);
  }
  EXPECT_THROW(s.TailSum(50), InvalidArgument);
}

TEST(ScheduleTest, PureConstruction) {
  const ProblemConstants c = Constants(1.7, 0.3, 0.2);
  const Schedule a = MakeSchedule(c, 200);
  const Schedule b = MakeSchedule(c, 200);
  for (int k = 0; k <= 200; ++k) {
    EXPECT_EQ(a.alpha(k), b.alpha(k));
    EXPECT_EQ(a.gamma(k), b.gamma(k));
    EXPECT_EQ(a.lambda(k), b.lambda(k));
    EXPECT_EQ(a.sigma(k), b.sigma(k));
  }
}

TEST(ScheduleTest, RejectsDegenerateConstants) {
  EXPECT_THROW(MakeSchedule(Constants(0.0, 1.0, 1.0), 10), InvalidArgument);
  EXPECT_THROW(MakeSchedule(Constants(1.0, 0.0, 1.0), 10), InvalidArgument);
  ScheduleOverrides o;
  o.sigma = 0.1;
  EXPECT_NO_THROW(MakeSchedule(Constants(1.0, 0.0, 1.0), 10, o));
  o.gamma = 1.0;
  EXPECT_THROW(MakeSchedule(Constants(1.0, 0.0, 1.0), 10, o), ScheduleError);
  ScheduleOverrides bad;
  bad.alpha = -0.5;
  EXPECT_THROW(MakeSchedule(Constants(1.0, 1.0, 1.0), 10, bad),
               InvalidArgument);
  bad.alpha = 1.5;
  EXPECT_THROW(MakeSchedule(Constants(1.0, 1.0, 1.0), 10, bad), ScheduleError);
}

TEST(ScheduleTest, RuleNamesRoundTrip) {
  for (auto r : {GammaRule::kWindowTop, GammaRule::kEqualLambda}) {
    EXPECT_EQ(ParseGammaRule(ToString(r)), r);
  }
  for (auto r : {LambdaRule::kHalfInverseLxx, LambdaRule::kAlphaTimesGamma}) {
    EXPECT_EQ(ParseLambdaRule(ToString(r)), r);
  }
  for (auto r : {SigmaRule::kStandard, SigmaRule::kConservative}) {
    EXPECT_EQ(ParseSigmaRule(ToString(r)), r);
  }
  EXPECT_THROW(ParseGammaRule("top"), InvalidArgument);
}

TEST(ConstantsTest, Validate) {
  EXPECT_NO_THROW(Constants(1.0, 0.0, 0.1).Validate());
  EXPECT_THROW(Constants(0.0, 1.0, 1.0).Validate(), InvalidArgument);
  EXPECT_THROW(Constants(1.0, 1.0, 0.0).Validate(), InvalidArgument);
  EXPECT_THROW(Constants(1.0, -1.0, 1.0).Validate(), InvalidArgument);
}

TEST(StateTest, InitialStateHasZeroDisplacement) {
  const Vec x0 = Vec::LinSpaced(3, 1.0, 3.0);
  const IterateState s = IterateState::Initial(x0, Vec::Zero(2));
  EXPECT_EQ(s.x, x0);
  EXPECT_EQ(s.x_tilde, x0);
  EXPECT_EQ(s.x_prev, x0);
  EXPECT_EQ(s.z_last, x0);
  EXPECT_EQ(s.k, 0);
  EXPECT_FALSE(s.grad_y_prev.has_value());
}

TEST(StateTest, CheckFiniteGuards) {
  IterateState s = IterateState::Initial(Vec::Ones(2), Vec::Ones(2));
  EXPECT_NO_THROW(s.CheckFinite());
  s.y(1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(s.CheckFinite(), DivergenceError);
  s = IterateState::Initial(Vec::Constant(2, 1e13), Vec::Ones(2));
  s.k = 7;
  try {
    s.CheckFinite();
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.iteration(), 7);
  }
}

TEST(RunConfigTest, Validation) {
  RunConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.trace_every = 0;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c = RunConfig{};
  c.horizon = -1;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c = RunConfig{};
  c.solver = SolverKind::kSpdm;
  c.horizon = 40;
  EXPECT_EQ(c.EffectiveBatchSize(), 40);
  c.batch_size = 10;
  EXPECT_EQ(c.EffectiveBatchSize(), 10);
  c.batch_size = -3;
  EXPECT_THROW(c.Validate(), InvalidArgument);
}

TEST(RunConfigTest, EnumNames) {
  for (auto k : {SolverKind::kPdm, SolverKind::kSpdm, SolverKind::kGda,
                 SolverKind::kAgda}) {
    EXPECT_EQ(ParseSolverKind(ToString(k)), k);
  }
  EXPECT_EQ(ParseSolverKind("pdm"), SolverKind::kPdm);
  EXPECT_EQ(ParseSampling("exhaustive"), Sampling::kExhaustive);
  EXPECT_THROW(ParseSolverKind("adam"), InvalidArgument);
}

TEST(ProblemTest, LinearityDefectIsZeroForToys) {
  std::mt19937_64 rng(3);
  const testing::ScalarToy toy(0.3);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(LinearityDefect(toy, testing::RandomVec(1, rng),
                              testing::RandomVec(1, rng),
                              testing::RandomVec(1, rng)),
              0.0);
  }
}

TEST(ProblemTest, BatchGradientAveragesSamples) {
  std::mt19937_64 rng(11);
  std::vector<Mat> a;
  for (int i = 0; i < 4; ++i) a.push_back(testing::RandomMat(2, 3, rng));
  const testing::FiniteSumToy toy({1.0, 2.0, 3.0, 4.0}, a);
  const Vec x = testing::RandomVec(3, rng);
  const Vec y = testing::RandomVec(2, rng);
  const std::size_t all[] = {0, 1, 2, 3};
  EXPECT_LT((toy.GradXBatch(x, y, all) - toy.GradX(x, y)).norm(), 1e-14);
  EXPECT_LT((toy.GradYBatch(x, y, all) - toy.GradY(x, y)).norm(), 1e-14);
  EXPECT_THROW(toy.GradXBatch(x, y, std::span<const std::size_t>{}),
               InvalidArgument);
}

TEST(ProblemTest, InstanceValidation) {
  ProblemInstance p = testing::ScalarToyInstance(0.1, 0.5, 1.0);
  EXPECT_NO_THROW(p.Validate());
  EXPECT_DOUBLE_EQ(p.Objective(Vec::Constant(1, 2.0), Vec::Constant(1, 1.0)),
                   0.5 * 0.1 * 4.0 + 2.0);
  p.x0 = Vec::Zero(2);
  EXPECT_THROW(p.Validate(), InvalidArgument);
}

}  // namespace
}  // namespace saddle
