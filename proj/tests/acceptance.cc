// Acceptance harness: one PASS/FAIL line per criterion.
//
//   saddle_acceptance [--strict]
//
// Without --strict the exit code only reflects harness errors; with it any
// FAIL line makes the exit code 1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oracles/projection_oracles.h"
#include "saddle/experiment.h"
#include "saddle/metrics.h"
#include "saddle/problems/dro.h"
#include "saddle/problems/libsvm.h"
#include "saddle/problems/lqr.h"
#include "saddle/problems/lyapunov.h"
#include "saddle/problems/synthetic.h"
#include "saddle/prox.h"
#include "saddle/schedule.h"
#include "saddle/solvers.h"
#include "test_util.h"

namespace saddle {
namespace {

using testing::FiniteDifference;
using testing::RandomMat;
using testing::RandomVec;
using testing::RelativeError;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

// -------------------------------------------------------------------- 1

Outcome ScheduleCorrectness() {
  ProblemConstants c;
  c.l_xx = 2.0;
  c.l_xy = 1.5;
  c.mu = 0.5;
  double worst_c = std::numeric_limits<double>::infinity();
  double worst_rel = 0.0;
  for (const int t : {10, 100, 1000, 10000}) {
    const Schedule s = MakeSchedule(c, t);
    double sum = 0.0;
    for (int k = 0; k < t; ++k) {
      worst_c = std::min(worst_c, CCoefficient(s, c, k));
      sum += s.alpha(k) / s.GammaProduct(k);
    }
    const double target = 1.0 / s.GammaProduct(t - 1);
    worst_rel = std::max(worst_rel, std::abs(sum - target) / target);
  }
  return {worst_c >= 11.0 / 32.0 && worst_rel <= 1e-10,
          Fmt("min C_k = %.6f (>= %.6f), telescoping rel err = %.2e", worst_c,
              11.0 / 32.0, worst_rel)};
}

// -------------------------------------------------------------------- 2

SyntheticOptions CriterionSynthetic() {
  SyntheticOptions o;
  o.dim_x = 20;
  o.dim_y = 10;
  o.mu = 0.5;
  o.rank_deficiency = 5;
  o.coupling = 1.0;
  o.seed = 1;
  return o;
}

Outcome DeterministicRate() {
  const ProblemInstance p = MakeSynthetic(CriterionSynthetic());
  std::vector<RatePoint> points;
  std::string values;
  for (const int t : {100, 200, 400, 800}) {
    RunConfig c;
    c.horizon = t;
    const RunResult r = Run(p, c);
    if (!r.ok()) return {false, "run failed: " + *r.error};
    points.push_back({static_cast<double>(t), r.best.stationarity});
    values += Fmt(" %.2e", r.best.stationarity);
  }
  const double slope = RateFit(points);
  return {slope <= -0.8,
          Fmt("slope = %.3f (<= -0.8); best stationarity:", slope) + values};
}

// -------------------------------------------------------------------- 3

Outcome StochasticConsistency() {
  SyntheticOptions o = CriterionSynthetic();
  o.noise_x = 0.5;
  o.noise_y = 0.5;
  const ProblemInstance p = MakeSynthetic(o);
  std::vector<double> means;
  for (const int t : {50, 100, 200}) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      RunConfig c;
      c.solver = SolverKind::kSpdm;
      c.horizon = t;
      c.batch_size = t;
      c.seed = DeriveSeed(seed, "spdm", t);
      const RunResult r = Run(p, c);
      if (!r.ok()) return {false, "run failed: " + *r.error};
      sum += r.best.stationarity;
    }
    means.push_back(sum / 10.0);
  }
  const bool monotone = means[1] < means[0] && means[2] < means[1];

  RunConfig c;
  c.horizon = 200;
  const RunResult pdm = Run(p, c);
  c.solver = SolverKind::kSpdm;
  c.sampling = Sampling::kExhaustive;
  c.batch_size = 200;
  const RunResult spdm = Run(p, c);
  const bool identical =
      FormatTraceCsv(pdm.trace) == FormatTraceCsv(spdm.trace) &&
      pdm.final_state.x == spdm.final_state.x &&
      pdm.final_state.y == spdm.final_state.y;
  return {monotone && identical,
          Fmt("mean best stationarity T=50/100/200: %.3e > %.3e > %.3e", means[0],
              means[1], means[2]) +
              (identical ? "; exhaustive SPDM == PDM bitwise"
                         : "; exhaustive SPDM differs from PDM")};
}

// -------------------------------------------------------------------- 4

Outcome EqualStepEquivalences() {
  ScheduleOverrides ov;
  ov.gamma_rule = GammaRule::kEqualLambda;
  double worst_z = 0.0;
  double worst_t = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SyntheticOptions o;
    o.dim_x = 5 + static_cast<int>(seed % 7);
    o.dim_y = 2 + static_cast<int>(seed % 5);
    o.rank_deficiency = static_cast<int>(seed % 3);
    o.mu = 0.1 * seed;
    o.coupling = 0.5 + 0.1 * seed;
    o.seed = 100 + seed;
    const ProblemInstance p = MakeSynthetic(o);
    const Schedule s = MakeSchedule(p.constants, 100, ov);
    IterateState st = IterateState::Initial(p.x0, p.y0);
    for (int k = 0; k < 100; ++k) {
      const Vec x = st.x;
      st = PdmStep(p, s, st).state;
      worst_z = std::max(worst_z, (st.z_last - x).norm() / std::max(x.norm(), 1e-300));
      worst_t = std::max(worst_t, (st.x_tilde - st.x).norm() /
                                      std::max(st.x.norm(), 1e-300));
    }
  }
  return {worst_z <= 1e-14 && worst_t <= 1e-14,
          Fmt("max rel |z_{k+1} - x_k| = %.1e, max rel |x~ - x| = %.1e", worst_z,
              worst_t)};
}

// -------------------------------------------------------------------- 5

double WorstFdError(const ProblemInstance& p,
                    const std::function<std::pair<Vec, Vec>(std::mt19937_64&)>& point,
                    double h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto [x, y] = point(rng);
    const SaddleOracle& o = *p.oracle;
    const Vec gx = FiniteDifference([&](const Vec& v) { return o.Value(v, y); }, x, h);
    const Vec gy = FiniteDifference([&](const Vec& v) { return o.Value(x, v); }, y, h);
    worst = std::max({worst, RelativeError(o.GradX(x, y), gx),
                      RelativeError(o.GradY(x, y), gy)});
  }
  return worst;
}

Mat RandomSpd(int d, std::mt19937_64& rng) {
  const Mat m = RandomMat(d, d, rng);
  return m * m.transpose() + Mat::Identity(d, d);
}

Outcome GradientFidelity() {
  const ProblemInstance syn = MakeSynthetic(CriterionSynthetic());
  const double e_syn = WorstFdError(
      syn, [](std::mt19937_64& rng) {
        return std::pair{RandomVec(20, rng), RandomVec(10, rng)};
      },
      1e-5, 1);

  const ProblemInstance dro =
      MakeDro(MakeSyntheticClassification(60, 100, 3), DroOptions{});
  const double e_dro = WorstFdError(
      dro, [](std::mt19937_64& rng) {
        return std::pair{RandomVec(100, rng, 0.1),
                         Vec(RandomVec(60, rng).cwiseAbs() / 60.0)};
      },
      1e-5, 2);

  LqrOptions lo;
  lo.state_dim = 3;
  lo.input_dim = 2;
  const ProblemInstance lqr_p = MakeLqrGail(lo);
  const auto& lqr = dynamic_cast<const LqrGailProblem&>(*lqr_p.oracle);
  const double e_lqr = WorstFdError(
      lqr_p, [&](std::mt19937_64& rng) {
        const Mat k = lqr.k_expert() + 0.05 * RandomMat(2, 3, rng);
        return std::pair{lqr.PackK(k),
                         lqr.PackTheta(RandomSpd(3, rng), RandomSpd(2, rng))};
      },
      1e-6, 3);

  std::mt19937_64 rng(4);
  double lyap = 0.0;
  double duality = 0.0;
  for (int i = 0; i < 50; ++i) {
    Mat f = RandomMat(4, 4, rng);
    f *= 0.95 / SpectralRadius(f);
    const Mat w = RandomSpd(4, rng);
    lyap = std::max(lyap, LyapunovResidual(f, w, SolveDiscreteLyapunov(f, w)));

    const Mat k = lqr.k_expert() + 0.05 * RandomMat(2, 3, rng);
    const Mat q = RandomSpd(3, rng);
    const Mat r = RandomSpd(2, rng);
    const Mat pk = ValueMatrix(lqr.a(), lqr.b(), k, q, r);
    const Mat sk = StateCovariance(lqr.a(), lqr.b(), k, lqr.sigma0());
    const double c1 = (pk * lqr.sigma0()).trace();
    const double c2 = ((q + k.transpose() * r * k) * sk).trace();
    duality = std::max(duality, std::abs(c1 - c2) / std::abs(c1));
  }
  const double worst = std::max({e_syn, e_dro, e_lqr});
  return {worst < 1e-5 && lyap <= 1e-9 && duality <= 1e-8,
          Fmt("fd rel err synthetic %.1e, DRO %.1e, LQR %.1e; ", e_syn, e_dro,
              e_lqr) +
              Fmt("Lyapunov residual %.1e; trace duality %.1e", lyap, duality)};
}

// -------------------------------------------------------------------- 6

Outcome ProjectionFidelity() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> delta(0.0, 0.9);
  std::uniform_real_distribution<double> radius(0.05, 3.0);
  std::uniform_real_distribution<double> spread(0.1, 3.0);
  double worst_bb = 0.0;
  double worst_sb = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 3;
    const double d = delta(rng);
    const double r = radius(rng);
    const Vec v = Vec::Constant(n, 1.0 / n) + RandomVec(n, rng, spread(rng) / n * 4.0);
    worst_bb = std::max(worst_bb, (ProjectBoxBall(v, d, r) -
                                   oracles::ProjectDroSetBruteForce(v, d, r)).norm());
    const int dim = 2 + trial % 3;
    const Mat g = RandomMat(dim, dim, rng, 2.0);
    const Mat m = 0.5 * (g + g.transpose());
    worst_sb = std::max(worst_sb, (ProjectSpectralBox(m, 0.1, 1.0) -
                                   oracles::ProjectSpectralBoxBarrier(m, 0.1, 1.0)).norm());
  }

  const BoxBallProjection bb(6, 0.05, 1.5);
  const SpectralBoxProjection sb({{3, 0.1, 100.0}, {2, 0.1, 100.0}});
  double idem = 0.0;
  double expansion = 0.0;
  for (int i = 0; i < 1000; ++i) {
    for (const ProxOperator* op : {static_cast<const ProxOperator*>(&bb),
                                   static_cast<const ProxOperator*>(&sb)}) {
      const int n = op == &bb ? 6 : 13;
      const double scale = op == &bb ? 0.5 : 60.0;
      const Vec a = RandomVec(n, rng, scale);
      const Vec b = RandomVec(n, rng, scale);
      const Vec pa = op->Prox(a, 1.0);
      const Vec pb = op->Prox(b, 1.0);
      idem = std::max(idem, (op->Prox(pa, 1.0) - pa).norm() / std::max(1.0, pa.norm()));
      expansion = std::max(expansion, (pa - pb).norm() - (a - b).norm());
    }
  }
  return {worst_bb <= 1e-6 && worst_sb <= 1e-6 && idem <= 1e-10 &&
              expansion <= 1e-10,
          Fmt("oracle err box-ball %.1e, spectral %.1e; idempotence %.1e; "
              "expansion %.1e",
              worst_bb, worst_sb, idem, expansion)};
}

// -------------------------------------------------------------------- 7

Outcome DroEndToEnd() {
  // The dataset goes through the LIBSVM text format like a real one would.
  const LibsvmData generated = MakeSyntheticClassification(60, 100, 3, 0.1);
  const LibsvmData data =
      ParseLibsvm(FormatLibsvm(Mat(generated.features), generated.labels));
  DroOptions o;
  o.delta = 0.01;
  o.radius = 2.0 * 50.0;
  const ProblemInstance p = MakeDro(data, o);

  const std::int64_t budget = 3000;
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    double gaps[2];
    int i = 0;
    for (const SolverKind kind : {SolverKind::kPdm, SolverKind::kAgda}) {
      RunConfig c;
      c.solver = kind;
      c.horizon = static_cast<int>(
          budget / CallsPerStep(kind, 0, Sampling::kUniform));
      c.seed = DeriveSeed(seed, ToString(kind), c.horizon);
      const RunResult r = Run(p, c);
      if (!r.ok()) return {false, "run failed: " + *r.error};
      GapOptions go;
      go.seed = c.seed;
      gaps[i++] = GapFunction(p, r.final_state.x, r.final_state.y, go).gap;
    }
    if (gaps[0] <= gaps[1]) ++wins;
    detail += Fmt(" %.3g/%.3g", gaps[0], gaps[1]);
  }
  return {wins >= 4,
          Fmt("PDM gap <= AGDA gap in %.0f of 5 seeds at %.0f oracle calls; "
              "PDM/AGDA:",
              wins, static_cast<double>(budget)) +
              detail};
}

// -------------------------------------------------------------------- 8

Outcome LqrEndToEnd() {
  const ProblemInstance p = MakeLqrGail(LqrOptions{});
  const auto& lqr = dynamic_cast<const LqrGailProblem&>(*p.oracle);
  const int horizon = 5000;
  const Schedule s = MakeSchedule(p.constants, horizon);
  IterateState st = IterateState::Initial(p.x0, p.y0);
  double min_grad = lqr.GradX(st.x, st.y).norm();
  double worst_violation = 0.0;
  const auto check_theta = [&](const Vec& y) {
    for (const Mat& m : {lqr.UnpackQ(y), lqr.UnpackR(y)}) {
      worst_violation = std::max(worst_violation, (m - m.transpose()).norm());
      Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (m + m.transpose()));
      worst_violation = std::max({worst_violation, 0.1 - eig.eigenvalues().minCoeff(),
                                  eig.eigenvalues().maxCoeff() - 100.0});
    }
  };
  check_theta(st.y);
  int reached = -1;
  try {
    for (int k = 0; k < horizon; ++k) {
      st = PdmStep(p, s, st).state;
      st.CheckFinite();
      check_theta(st.y);
      const double g = lqr.GradX(st.x, st.y).norm();
      min_grad = std::min(min_grad, g);
      if (g < 1e-3 && reached < 0) reached = k + 1;
    }
  } catch (const Error& e) {
    return {false, std::string("run failed: ") + e.what()};
  }
  return {min_grad < 1e-3 && worst_violation <= 1e-10,
          Fmt("min ||grad_K m|| = %.2e (first < 1e-3 at k = %.0f); "
              "max theta bound violation %.1e",
              min_grad, reached, worst_violation)};
}

// -------------------------------------------------------------------- 9

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome Reproducibility() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "saddle_acceptance_repro";
  fs::remove_all(root);
  const std::vector<Json> specs = {
      {{"problem", {{"kind", "synthetic"}}}, {"solver", {{"horizon", 200}}}},
      {{"problem", {{"kind", "synthetic"}, {"noise_x", 0.5}, {"noise_y", 0.5}}},
       {"solver", {{"name", "spdm"}, {"horizon", 100}, {"batch_size", 8}, {"seed", 5}}}},
      {{"problem", {{"kind", "dro"}, {"n", 30}, {"d", 20}}},
       {"solver", {{"name", "agda"}, {"oracle_budget", 600}}},
       {"output", {{"gap", true}, {"gap_budget", 50}, {"trace_every", 3}}}},
      {{"problem", {{"kind", "lqr"}, {"state_dim", 3}, {"input_dim", 2}}},
       {"solver", {{"horizon", 100}, {"schedule", {{"sigma_rule", "conservative"}}}}}},
  };
  int identical = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const fs::path a = root / ("a" + std::to_string(i));
    const fs::path b = root / ("b" + std::to_string(i));
    RunExperiment(ParseExperimentSpec(specs[i]), a);
    RunExperiment(LoadExperimentSpec((a / "summary.json").string()), b);
    const std::string ta = ReadFile(a / "trace.csv");
    if (!ta.empty() && ta == ReadFile(b / "trace.csv")) ++identical;
  }
  fs::remove_all(root);
  return {identical == static_cast<int>(specs.size()),
          Fmt("%.0f of %.0f reruns from summary.json bit-identical", identical,
              static_cast<double>(specs.size()))};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> fn;
};

}  // namespace
}  // namespace saddle

int main(int argc, char** argv) {
  using namespace saddle;
  const bool strict = argc > 1 && std::string(argv[1]) == "--strict";
  const std::vector<Criterion> criteria = {
      {1, "schedule correctness", 1.0, ScheduleCorrectness},
      {2, "deterministic rate", 30.0, DeterministicRate},
      {3, "stochastic consistency", 120.0, StochasticConsistency},
      {4, "equal-step equivalences", 60.0, EqualStepEquivalences},
      {5, "gradient fidelity", 60.0, GradientFidelity},
      {6, "projection fidelity", 60.0, ProjectionFidelity},
      {7, "DRO end-to-end", 120.0, DroEndToEnd},
      {8, "LQR end-to-end", 60.0, LqrEndToEnd},
      {9, "reproducibility", 60.0, Reproducibility},
  };
  int failures = 0;
  int errors = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
      ++errors;
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    const bool in_time = seconds <= c.time_limit_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.2f s, limit %.0f s%s]\n",
                pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(),
                seconds, c.time_limit_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  if (errors > 0) return 2;
  return strict && failures > 0 ? 1 : 0;
}
