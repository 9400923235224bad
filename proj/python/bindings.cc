#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "saddle/experiment.h"
#include "saddle/metrics.h"
#include "saddle/prox.h"
#include "saddle/schedule.h"
#include "saddle/solvers.h"

namespace py = pybind11;

namespace saddle {
namespace {

py::dict ConstantsDict(const ProblemConstants& c) {
  py::dict d;
  d["l_xx"] = c.l_xx;
  d["l_xy"] = c.l_xy;
  d["mu"] = c.mu;
  d["nu_x"] = c.nu_x;
  d["nu_y"] = c.nu_y;
  return d;
}

ScheduleOverrides MakeOverrides(std::optional<double> alpha,
                                std::optional<double> gamma,
                                std::optional<double> lambda,
                                std::optional<double> sigma,
                                const std::string& gamma_rule,
                                const std::string& lambda_rule,
                                const std::string& sigma_rule) {
  ScheduleOverrides o;
  o.alpha = alpha;
  o.gamma = gamma;
  o.lambda = lambda;
  o.sigma = sigma;
  o.gamma_rule = ParseGammaRule(gamma_rule);
  o.lambda_rule = ParseLambdaRule(lambda_rule);
  o.sigma_rule = ParseSigmaRule(sigma_rule);
  return o;
}

py::dict TraceDict(const std::vector<TraceRecord>& trace) {
  const auto n = static_cast<Eigen::Index>(trace.size());
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> k(n), calls(n), wall(n);
  Vec stat(n), gx(n), primal(n), best(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const TraceRecord& r = trace[i];
    k(i) = r.k;
    calls(i) = r.oracle_calls;
    wall(i) = r.wall_ns;
    stat(i) = r.stationarity;
    gx(i) = r.grad_x_norm;
    primal(i) = r.primal_value;
    best(i) = r.best_so_far;
  }
  py::dict d;
  d["k"] = k;
  d["oracle_calls"] = calls;
  d["stationarity"] = stat;
  d["grad_x_norm"] = gx;
  d["primal_value"] = primal;
  d["wall_ns"] = wall;
  d["best_so_far"] = best;
  return d;
}

}  // namespace
}  // namespace saddle

PYBIND11_MODULE(_saddle, m) {
  using namespace saddle;
  m.doc() = "Accelerated primal-dual solvers for PL-concave min-max problems.";

  auto base = py::register_exception<Error>(m, "SaddleError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<InstabilityError>(m, "InstabilityError", base.ptr());
  py::register_exception<ScheduleError>(m, "ScheduleError", base.ptr());

  py::class_<ProblemInstance>(m, "Problem")
      .def_static(
          "from_json",
          [](const std::string& text) { return BuildProblem(Json::parse(text)); },
          py::arg("problem_block"))
      .def_readonly("name", &ProblemInstance::name)
      .def_property_readonly("dim_x", &ProblemInstance::dim_x)
      .def_property_readonly("dim_y", &ProblemInstance::dim_y)
      .def_readonly("x0", &ProblemInstance::x0)
      .def_readonly("y0", &ProblemInstance::y0)
      .def_property_readonly("constants",
                             [](const ProblemInstance& p) { return ConstantsDict(p.constants); })
      .def_property_readonly("num_samples",
                             [](const ProblemInstance& p) { return p.oracle->num_samples(); })
      .def("value", [](const ProblemInstance& p, const Vec& x, const Vec& y) {
        return p.oracle->Value(x, y);
      })
      .def("objective", &ProblemInstance::Objective)
      .def("grad_x", [](const ProblemInstance& p, const Vec& x, const Vec& y) {
        return p.oracle->GradX(x, y);
      })
      .def("grad_y", [](const ProblemInstance& p, const Vec& x, const Vec& y) {
        return p.oracle->GradY(x, y);
      })
      .def("prox", [](const ProblemInstance& p, const Vec& v, double step) {
        return p.h->Prox(v, step);
      });

  m.def(
      "schedule",
      [](const ProblemInstance& p, int horizon, std::optional<double> alpha,
         std::optional<double> gamma, std::optional<double> lambda,
         std::optional<double> sigma, const std::string& gamma_rule,
         const std::string& lambda_rule, const std::string& sigma_rule) {
        const Schedule s = MakeSchedule(
            p.constants, horizon,
            MakeOverrides(alpha, gamma, lambda, sigma, gamma_rule, lambda_rule,
                          sigma_rule));
        Vec a(horizon + 1), g(horizon + 1), l(horizon + 1), sg(horizon + 1);
        for (int k = 0; k <= horizon; ++k) {
          a(k) = s.alpha(k);
          g(k) = s.gamma(k);
          l(k) = s.lambda(k);
          sg(k) = s.sigma(k);
        }
        Vec c(horizon);
        for (int k = 0; k < horizon; ++k) c(k) = CCoefficient(s, p.constants, k);
        py::dict d;
        d["alpha"] = a;
        d["gamma"] = g;
        d["lambda"] = l;
        d["sigma"] = sg;
        d["c"] = c;
        return d;
      },
      py::arg("problem"), py::arg("horizon"), py::arg("alpha") = py::none(),
      py::arg("gamma") = py::none(), py::arg("lambda_") = py::none(),
      py::arg("sigma") = py::none(), py::arg("gamma_rule") = "window_top",
      py::arg("lambda_rule") = "half_inverse_lxx",
      py::arg("sigma_rule") = "standard");

  m.def(
      "run",
      [](const ProblemInstance& p, const std::string& solver, int horizon,
         int batch_size, const std::string& sampling, std::uint64_t seed,
         int trace_every, std::optional<double> alpha,
         std::optional<double> gamma, std::optional<double> lambda,
         std::optional<double> sigma, const std::string& gamma_rule,
         const std::string& lambda_rule, const std::string& sigma_rule) {
        RunConfig c;
        c.solver = ParseSolverKind(solver);
        c.horizon = horizon;
        c.batch_size = batch_size;
        c.sampling = ParseSampling(sampling);
        c.seed = seed;
        c.trace_every = trace_every;
        c.schedule = MakeOverrides(alpha, gamma, lambda, sigma, gamma_rule,
                                   lambda_rule, sigma_rule);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = Run(p, c);
        }
        py::dict d;
        d["trace"] = TraceDict(r.trace);
        d["x"] = r.final_state.x;
        d["y"] = r.final_state.y;
        d["x_tilde"] = r.final_state.x_tilde;
        d["best_k"] = r.best.k;
        d["best_stationarity"] = r.best.stationarity;
        d["best_z"] = r.best.z;
        d["best_y"] = r.best.y;
        d["oracle_calls"] = r.oracle_calls;
        d["error"] = r.error ? py::object(py::str(*r.error)) : py::object(py::none());
        d["error_iteration"] = r.error_iteration;
        return d;
      },
      py::arg("problem"), py::arg("solver") = "pdm", py::arg("horizon") = 100,
      py::arg("batch_size") = 0, py::arg("sampling") = "uniform",
      py::arg("seed") = 0, py::arg("trace_every") = 1,
      py::arg("alpha") = py::none(), py::arg("gamma") = py::none(),
      py::arg("lambda_") = py::none(), py::arg("sigma") = py::none(),
      py::arg("gamma_rule") = "window_top",
      py::arg("lambda_rule") = "half_inverse_lxx",
      py::arg("sigma_rule") = "standard");

  m.def(
      "stationarity",
      [](const ProblemInstance& p, const Vec& z, const Vec& y, double sigma,
         std::optional<Vec> q) {
        const StationarityReport r =
            StationarityMeasure(p, z, y, sigma, q.value_or(Vec::Zero(y.size())));
        py::dict d;
        d["value"] = r.value;
        d["grad_x_sq"] = r.grad_x_sq;
        d["y_move_sq"] = r.y_move_sq;
        d["y_bar"] = r.y_bar;
        return d;
      },
      py::arg("problem"), py::arg("z"), py::arg("y"), py::arg("sigma"),
      py::arg("q") = py::none());

  m.def(
      "gap",
      [](const ProblemInstance& p, const Vec& x, const Vec& y, int budget,
         int num_starts, std::uint64_t seed) {
        GapOptions o;
        o.budget = budget;
        o.num_starts = num_starts;
        o.seed = seed;
        const GapReport r = GapFunction(p, x, y, o);
        py::dict d;
        d["gap"] = r.gap;
        d["sup_value"] = r.sup_value;
        d["inf_value"] = r.inf_value;
        d["sup_residual"] = r.sup_residual;
        d["inf_residual"] = r.inf_residual;
        d["starts_used"] = r.starts_used;
        return d;
      },
      py::arg("problem"), py::arg("x"), py::arg("y"), py::arg("budget") = 200,
      py::arg("num_starts") = 5, py::arg("seed") = 0);

  m.def(
      "rate_fit",
      [](const std::vector<double>& horizons, const std::vector<double>& values) {
        if (horizons.size() != values.size()) {
          throw InvalidArgument("rate_fit: length mismatch");
        }
        std::vector<RatePoint> pts;
        for (std::size_t i = 0; i < horizons.size(); ++i) {
          pts.push_back({horizons[i], values[i]});
        }
        return RateFit(pts);
      },
      py::arg("horizons"), py::arg("best_stationarity"));

  m.def("project_box_ball",
        [](const Vec& v, double delta, double radius) {
          return ProjectBoxBall(v, delta, radius);
        },
        py::arg("v"), py::arg("delta"), py::arg("radius"));
  m.def("project_spectral_box", &ProjectSpectralBox, py::arg("m"),
        py::arg("lo"), py::arg("hi"));

  m.def(
      "run_experiment",
      [](const std::string& spec, const std::string& out_dir) {
        const ExperimentResult r =
            RunExperiment(ParseExperimentSpec(Json::parse(spec)), out_dir);
        return py::make_tuple(r.exit_code, r.summary.dump());
      },
      py::arg("spec"), py::arg("out_dir"));
}
