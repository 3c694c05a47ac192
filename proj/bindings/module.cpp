#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lrcov/csv.hpp"
#include "lrcov/estimator.hpp"
#include "lrcov/kernels.hpp"
#include "lrcov/longmemory.hpp"
#include "lrcov/reports.hpp"
#include "lrcov/simulate.hpp"
#include "lrcov/structural.hpp"
#include "lrcov/tuning.hpp"

namespace py = pybind11;

namespace {

lrcov::RegressionData make_data(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
  lrcov::RegressionData data;
  data.y = y;
  data.X = X;
  if (data.y.size() != data.X.rows())
    throw lrcov::Error(lrcov::Errc::bad_config, "y and X must have the same number of rows");
  return data;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::vector<Eigen::MatrixXd> curve_values(const lrcov::CovCurve& curve) {
  return curve.values;
}

lrcov::KernelSpec kspec(const std::string& name) { return lrcov::kernel_from_name(name); }

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Difference-based time-varying long-run covariance estimation, "
            "bootstrap specification tests, tuning selection and simulation.";

  py::register_exception<lrcov::Error>(m, "LrcovError");

  // ----------------------------------------------------------------- kernels
  m.def(
      "kernel_eval",
      [](const std::string& kernel, double u) { return lrcov::kernel_eval(kspec(kernel), u); },
      py::arg("kernel"), py::arg("u"));
  m.def(
      "jackknife_kernel_eval",
      [](const std::string& kernel, double u) {
        return lrcov::jackknife_kernel_eval(kspec(kernel), u);
      },
      py::arg("kernel"), py::arg("u"));
  m.def(
      "weights",
      [](const std::string& kernel, double t, int n, double bandwidth) {
        return lrcov::weights(kspec(kernel), t, n, bandwidth);
      },
      py::arg("kernel"), py::arg("t"), py::arg("n"), py::arg("bandwidth"));

  // --------------------------------------------------------------- estimator
  m.def(
      "acute_sigma",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, int m, double tau,
         const std::string& kernel) {
        return curve_values(lrcov::acute_sigma(make_data(y, X), m, tau, kspec(kernel)));
      },
      py::arg("y"), py::arg("X"), py::arg("m"), py::arg("tau"),
      py::arg("kernel") = "epanechnikov",
      "Biased difference-based long-run covariance curve (list of p x p matrices, "
      "grid t = 1/n..1).");
  m.def(
      "debiased_sigma",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, int m, double tau,
         const std::string& kernel) {
        return curve_values(lrcov::debiased_sigma(make_data(y, X), m, tau, kspec(kernel)));
      },
      py::arg("y"), py::arg("X"), py::arg("m"), py::arg("tau"),
      py::arg("kernel") = "epanechnikov");
  m.def(
      "beta_pilot",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, int m, double tau,
         const std::string& kernel) {
        return lrcov::beta_pilot(make_data(y, X), m, tau, kspec(kernel)).values;
      },
      py::arg("y"), py::arg("X"), py::arg("m"), py::arg("tau"),
      py::arg("kernel") = "epanechnikov", "Debiasing pilot coefficient curve (n x p).");
  m.def(
      "threshold_pd",
      [](const std::vector<Eigen::MatrixXd>& values, int n) {
        lrcov::CovCurve curve;
        curve.values = values;
        return curve_values(lrcov::threshold_pd(curve, n));
      },
      py::arg("values"), py::arg("n"),
      "Eigenvalue thresholding to lambda >= 1/n per grid point.");
  m.def("matrix_sqrt_psd", &lrcov::matrix_sqrt_psd, py::arg("M"));

  // ------------------------------------------------------------------- tests
  m.def(
      "structural_test",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, std::optional<int> m,
         std::optional<double> tau, int B, std::uint64_t seed, bool auto_tune, int B_mv,
         const std::vector<double>& levels, const std::string& kernel, int threads) {
        lrcov::StructuralConfig cfg;
        cfg.m = m;
        cfg.tau = tau;
        cfg.B = B;
        cfg.seed = seed;
        cfg.auto_tune = auto_tune;
        cfg.B_mv = B_mv;
        cfg.levels = levels;
        cfg.kernel = kspec(kernel);
        cfg.threads = threads;
        return json_to_py(lrcov::to_json(lrcov::structural_test(make_data(y, X), cfg)));
      },
      py::arg("y"), py::arg("X"), py::arg("m") = std::nullopt, py::arg("tau") = std::nullopt,
      py::arg("B") = 1000, py::arg("seed") = 0, py::arg("auto_tune") = false,
      py::arg("B_mv") = 100, py::arg("levels") = std::vector<double>{0.05, 0.10},
      py::arg("kernel") = "epanechnikov", py::arg("threads") = 1);
  m.def(
      "longmemory_test",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, std::optional<double> b,
         std::optional<double> eta, std::optional<int> m, std::optional<double> tau, int B,
         std::uint64_t seed, bool auto_tune, const std::string& criterion, int B_mv,
         const std::string& kernel, int threads) {
        lrcov::LmConfig cfg;
        cfg.b = b;
        cfg.eta = eta;
        cfg.m = m;
        cfg.tau = tau;
        cfg.B = B;
        cfg.seed = seed;
        cfg.auto_tune = auto_tune;
        if (criterion == "kpss") cfg.criterion = lrcov::LmCriterion::kpss;
        else if (criterion == "rs") cfg.criterion = lrcov::LmCriterion::rs;
        else if (criterion == "vs") cfg.criterion = lrcov::LmCriterion::vs;
        else if (criterion == "ks") cfg.criterion = lrcov::LmCriterion::ks;
        else
          throw lrcov::Error(lrcov::Errc::bad_config,
                             "unknown criterion '" + criterion + "'");
        cfg.B_mv = B_mv;
        cfg.kernel = kspec(kernel);
        cfg.threads = threads;
        return json_to_py(lrcov::to_json(lrcov::longmemory_test(make_data(y, X), cfg)));
      },
      py::arg("y"), py::arg("X"), py::arg("b") = std::nullopt, py::arg("eta") = std::nullopt,
      py::arg("m") = std::nullopt, py::arg("tau") = std::nullopt, py::arg("B") = 1000,
      py::arg("seed") = 0, py::arg("auto_tune") = false, py::arg("criterion") = "kpss",
      py::arg("B_mv") = 100, py::arg("kernel") = "epanechnikov", py::arg("threads") = 1);

  // ------------------------------------------------------------------ tuning
  m.def("grid_default", [](int n) {
    const lrcov::TuningGrid g = lrcov::grid_default(n);
    py::dict out;
    out["m_values"] = g.m_values;
    out["tau_values"] = g.tau_values;
    return out;
  });
  m.def(
      "select_tuning",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const std::string& criterion,
         std::optional<std::vector<int>> m_values,
         std::optional<std::vector<double>> tau_values, int B_mv, std::uint64_t seed,
         const std::string& kernel, double b, double eta, int threads) {
        const lrcov::RegressionData data = make_data(y, X);
        lrcov::TuningGrid grid = lrcov::grid_default(data.n());
        if (m_values) grid.m_values = *m_values;
        if (tau_values) grid.tau_values = *tau_values;
        lrcov::Criterion crit;
        if (criterion == "structural") crit = lrcov::Criterion::structural;
        else if (criterion == "kpss") crit = lrcov::Criterion::kpss;
        else if (criterion == "rs") crit = lrcov::Criterion::rs;
        else if (criterion == "vs") crit = lrcov::Criterion::vs;
        else if (criterion == "ks") crit = lrcov::Criterion::ks;
        else
          throw lrcov::Error(lrcov::Errc::bad_config,
                             "unknown criterion '" + criterion + "'");
        return json_to_py(lrcov::to_json(
            lrcov::mv_select(data, grid, crit, B_mv, seed, kspec(kernel), b, eta, threads)));
      },
      py::arg("y"), py::arg("X"), py::arg("criterion"), py::arg("m_values") = std::nullopt,
      py::arg("tau_values") = std::nullopt, py::arg("B_mv") = 100, py::arg("seed") = 0,
      py::arg("kernel") = "epanechnikov", py::arg("b") = -1.0, py::arg("eta") = -1.0,
      py::arg("threads") = 1);

  // ------------------------------------------------------------- long memory
  m.def(
      "gcv_bandwidth",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
         std::optional<std::vector<double>> grid, const std::string& kernel) {
        return lrcov::gcv_bandwidth(make_data(y, X),
                                    grid ? *grid : lrcov::gcv_default_grid(), kspec(kernel));
      },
      py::arg("y"), py::arg("X"), py::arg("grid") = std::nullopt,
      py::arg("kernel") = "epanechnikov");
  m.def(
      "jackknife_fit",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, double b,
         const std::string& kernel) {
        return lrcov::jackknife_fit(make_data(y, X), b, kspec(kernel)).values;
      },
      py::arg("y"), py::arg("X"), py::arg("b"), py::arg("kernel") = "epanechnikov",
      "Jackknife bias-corrected local linear coefficient curve (n x p).");

  // -------------------------------------------------------------- simulation
  m.def(
      "gen_scenario",
      [](const std::string& scenario, int n, double value, std::uint64_t seed, int burn_in) {
        lrcov::ScenarioSpec spec;
        spec.name = lrcov::scenario_from_name(scenario);
        spec.n = n;
        spec.delta_or_d = value;
        spec.seed = seed;
        spec.burn_in = burn_in;
        const lrcov::ScenarioData res = lrcov::gen_scenario(spec);
        py::dict out;
        out["y"] = res.data.y;
        out["X"] = res.data.X;
        out["beta_true"] = res.beta_true;
        out["errors"] = res.errors;
        return out;
      },
      py::arg("scenario"), py::arg("n") = 300, py::arg("value") = 0.0, py::arg("seed") = 0,
      py::arg("burn_in") = 2000);
  m.def(
      "monte_carlo",
      [](const std::vector<std::tuple<std::string, int, double>>& cells,
         const std::string& test, int replications, std::uint64_t seed,
         const std::vector<double>& levels, std::optional<int> m, std::optional<double> tau,
         std::optional<double> b, std::optional<double> eta, int B, bool auto_tune,
         const std::string& criterion, int burn_in, int threads) {
        std::vector<lrcov::MonteCarloCell> cc;
        for (const auto& [name, n, value] : cells)
          cc.push_back({lrcov::scenario_from_name(name), n, value});
        lrcov::MonteCarloConfig cfg;
        cfg.test = test == "structural" ? lrcov::McTest::structural
                   : test == "longmemory"
                       ? lrcov::McTest::longmemory
                       : throw lrcov::Error(lrcov::Errc::bad_config,
                                            "unknown test '" + test + "'");
        cfg.replications = replications;
        cfg.base_seed = seed;
        cfg.levels = levels;
        cfg.m = m;
        cfg.tau = tau;
        cfg.b = b;
        cfg.eta = eta;
        cfg.B = B;
        cfg.auto_tune = auto_tune;
        if (criterion == "kpss") cfg.criterion = lrcov::LmCriterion::kpss;
        else if (criterion == "rs") cfg.criterion = lrcov::LmCriterion::rs;
        else if (criterion == "vs") cfg.criterion = lrcov::LmCriterion::vs;
        else if (criterion == "ks") cfg.criterion = lrcov::LmCriterion::ks;
        else
          throw lrcov::Error(lrcov::Errc::bad_config,
                             "unknown criterion '" + criterion + "'");
        cfg.burn_in = burn_in;
        cfg.threads = threads;
        return json_to_py(lrcov::to_json(lrcov::monte_carlo(cc, cfg)));
      },
      py::arg("cells"), py::arg("test") = "structural", py::arg("replications") = 500,
      py::arg("seed") = 0, py::arg("levels") = std::vector<double>{0.05, 0.10},
      py::arg("m") = std::nullopt, py::arg("tau") = std::nullopt, py::arg("b") = std::nullopt,
      py::arg("eta") = std::nullopt, py::arg("B") = 200, py::arg("auto_tune") = false,
      py::arg("criterion") = "kpss", py::arg("burn_in") = 2000, py::arg("threads") = 1,
      "cells: list of (scenario, n, delta_or_d) tuples.");
  m.def("kappa2", &lrcov::kappa2, py::arg("d"), py::arg("tol") = 1e-10);
  m.def("frac_diff_coeffs", &lrcov::frac_diff_coeffs, py::arg("d"), py::arg("J"));
  m.def(
      "estimate_d_slope",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const std::vector<int>& m_grid,
         double tau, const std::string& kernel) {
        const lrcov::DSlopeFit fit =
            lrcov::estimate_d_slope(make_data(y, X), m_grid, tau, kspec(kernel));
        py::dict out;
        out["d_hat"] = fit.d_hat;
        out["intercept"] = fit.intercept;
        out["points"] = fit.points;
        return out;
      },
      py::arg("y"), py::arg("X"), py::arg("m_grid"), py::arg("tau"),
      py::arg("kernel") = "epanechnikov");

  // --------------------------------------------------------------------- io
  m.def(
      "parse_regression_csv",
      [](const std::string& text, bool header, bool add_intercept,
         const std::string& y_column) {
        lrcov::IngestOptions opts;
        opts.header = header;
        opts.add_intercept = add_intercept;
        opts.y_column = y_column;
        const lrcov::RegressionData data = lrcov::parse_regression_csv(text, opts);
        py::dict out;
        out["y"] = data.y;
        out["X"] = data.X;
        return out;
      },
      py::arg("text"), py::arg("header") = true, py::arg("add_intercept") = true,
      py::arg("y_column") = "");
}
