#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lrcov/estimator.hpp"
#include "lrcov/longmemory.hpp"
#include "lrcov/rng.hpp"
#include "oracle.hpp"

using lrcov::CoefCurve;
using lrcov::CovCurve;
using lrcov::Errc;
using lrcov::Error;
using lrcov::KernelSpec;
using lrcov::LmConfig;
using lrcov::RegressionData;

namespace {

RegressionData noise_data(int n, std::uint64_t seed) {
  lrcov::Rng rng(seed);
  RegressionData data;
  data.X.resize(n, 2);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    data.X(i, 0) = 1.0;
    data.X(i, 1) = rng.next_normal();
    data.y[i] = 0.5 + 0.3 * data.X(i, 1) + rng.next_normal();
  }
  return data;
}

} // namespace

TEST_SUITE_BEGIN("longmemory");

TEST_CASE("local linear fit reproduces affine coefficient curves exactly") {
  // y_i = x_i'(a + c t_i) lies in the local linear model space, so the fit
  // is exact up to solver round-off at every grid point.
  const int n = 200;
  lrcov::Rng rng(8);
  RegressionData data;
  data.X.resize(n, 2);
  data.y.resize(n);
  const Eigen::Vector2d a(1.0, 2.0), c(0.5, -1.0);
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    data.X(i - 1, 0) = 1.0;
    data.X(i - 1, 1) = rng.next_normal();
    data.y[i - 1] = data.X.row(i - 1).dot(a + c * t);
  }
  const CoefCurve fit = lrcov::local_linear_fit(data, 0.2, KernelSpec{});
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    CHECK((fit.values.row(i - 1).transpose() - (a + c * t)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("constant response on a unit design fits the constant") {
  RegressionData data;
  data.X = Eigen::MatrixXd::Ones(100, 1);
  data.y = Eigen::VectorXd::Constant(100, 5.0);
  const CoefCurve fit = lrcov::local_linear_fit(data, 0.2, KernelSpec{});
  for (int i = 0; i < 100; ++i) CHECK(fit.values(i, 0) == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("local linear fit matches the naive reference") {
  const RegressionData data = noise_data(30, 55);
  const CoefCurve fit = lrcov::local_linear_fit(data, 0.3, KernelSpec{});
  const Eigen::MatrixXd ref = oracle::local_linear(data.X, data.y, 0.3, "epanechnikov");
  bool any_fallback = false;
  for (int i = 0; i < 30; ++i)
    if (fit.ridged[i] || fit.flagged[i]) any_fallback = true;
  REQUIRE(!any_fallback);
  CHECK((fit.values - ref).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + ref.cwiseAbs().maxCoeff()));
}

TEST_CASE("jackknife combination and its bias reduction on a quadratic curve") {
  // Identity 2 beta_{b/sqrt(2)} - beta_b against the naive fits.
  const RegressionData small = noise_data(40, 66);
  const CoefCurve jack = lrcov::jackknife_fit(small, 0.3, KernelSpec{});
  const Eigen::MatrixXd ref =
      2.0 * oracle::local_linear(small.X, small.y, 0.3 / std::sqrt(2.0), "epanechnikov") -
      oracle::local_linear(small.X, small.y, 0.3, "epanechnikov");
  CHECK((jack.values - ref).cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + ref.cwiseAbs().maxCoeff()));

  // Noiseless quadratic coefficient: the jackknife removes the leading
  // curvature bias, so at the midpoint it must beat the plain fit.
  const int n = 2000;
  RegressionData data;
  data.X = Eigen::MatrixXd::Ones(n, 1);
  data.y.resize(n);
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    data.y[i - 1] = (t - 0.5) * (t - 0.5);
  }
  const CoefCurve plain = lrcov::local_linear_fit(data, 0.2, KernelSpec{});
  const CoefCurve corrected = lrcov::jackknife_fit(data, 0.2, KernelSpec{});
  const int mid = n / 2 - 1;
  const double truth = (0.5 - 0.5) * (0.5 - 0.5);
  const double err_plain = std::abs(plain.values(mid, 0) - truth);
  const double err_jack = std::abs(corrected.values(mid, 0) - truth);
  CHECK(err_plain > 1e-4); // the plain fit really is biased here
  CHECK(err_jack < 0.1 * err_plain);
}

TEST_CASE("GCV bandwidth selection") {
  const RegressionData data = noise_data(200, 3);
  CHECK(lrcov::gcv_bandwidth(data, {0.21}, KernelSpec{}) == 0.21);

  const std::vector<double> grid = lrcov::gcv_default_grid();
  REQUIRE(grid.size() == 10);
  CHECK(grid.front() == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(grid.back() == doctest::Approx(0.35).epsilon(1e-12));
  for (std::size_t i = 1; i + 1 < grid.size(); ++i)
    CHECK(grid[i + 1] / grid[i] == doctest::Approx(grid[1] / grid[0]).epsilon(1e-10));

  const double b1 = lrcov::gcv_bandwidth(data, grid, KernelSpec{});
  const double b2 = lrcov::gcv_bandwidth(data, grid, KernelSpec{});
  CHECK(b1 == b2);
  CHECK(std::find(grid.begin(), grid.end(), b1) != grid.end());

  // A strongly oscillating coefficient forces the small bandwidth.
  RegressionData wiggly;
  const int n = 400;
  lrcov::Rng rng(12);
  wiggly.X.resize(n, 1);
  wiggly.X.setOnes();
  wiggly.y.resize(n);
  for (int i = 1; i <= n; ++i)
    wiggly.y[i - 1] =
        3.0 * std::sin(4.0 * M_PI * i / n) + 0.1 * rng.next_normal();
  CHECK(lrcov::gcv_bandwidth(wiggly, {0.08, 0.35}, KernelSpec{}) == 0.08);

  // Nothing feasible: n - 2 floor(n b) < 2 for every grid entry.
  RegressionData tiny;
  tiny.X = Eigen::MatrixXd::Ones(9, 1);
  tiny.y = Eigen::VectorXd::LinSpaced(9, 0.0, 1.0);
  try {
    lrcov::gcv_bandwidth(tiny, {0.45}, KernelSpec{});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::all_singular);
  }
}

TEST_CASE("residual partial sums by hand and against the reference") {
  // beta == 0 and y == 1: S_r = 1..6 for n = 10, b = 0.2 (n' = 2).
  RegressionData data;
  data.X = Eigen::MatrixXd::Ones(10, 1);
  data.y = Eigen::VectorXd::Ones(10);
  CoefCurve zero;
  zero.values = Eigen::MatrixXd::Zero(10, 1);
  zero.cond = Eigen::VectorXd::Zero(10);
  zero.ridged.assign(10, 0);
  zero.flagged.assign(10, 0);
  const Eigen::VectorXd s = lrcov::residual_partial_sums(data, zero, 0.2);
  REQUIRE(s.size() == 6);
  for (int r = 0; r < 6; ++r) CHECK(s[r] == double(r + 1));

  const lrcov::LmStatistics st = lrcov::lm_statistics(s, 10, 2);
  CHECK(st.kpss == doctest::Approx(91.0 / 60.0).epsilon(1e-15));
  CHECK(st.rs == 5.0);
  CHECK(st.vs == doctest::Approx((91.0 - 441.0 / 6.0) / 60.0).epsilon(1e-14));
  CHECK(st.ks == 6.0);
  CHECK(st.n_prime == 2);

  // Random case against the naive reference, using the library fit curve.
  const RegressionData rnd = noise_data(25, 77);
  const CoefCurve fit = lrcov::local_linear_fit(rnd, 0.25, KernelSpec{});
  const Eigen::VectorXd lib = lrcov::residual_partial_sums(rnd, fit, 0.2);
  const Eigen::VectorXd ref = oracle::partial_sums(rnd.X, rnd.y, fit.values, 0.2);
  REQUIRE(lib.size() == ref.size());
  CHECK((lib - ref).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + ref.cwiseAbs().maxCoeff()));
  const lrcov::LmStatistics ls = lrcov::lm_statistics(lib, 25, 5);
  const oracle::LmStats os = oracle::lm_stats(lib, 25);
  CHECK(ls.kpss == doctest::Approx(os.kpss).epsilon(1e-13));
  CHECK(ls.rs == doctest::Approx(os.rs).epsilon(1e-13));
  CHECK(ls.vs == doctest::Approx(os.vs).epsilon(1e-13));
  CHECK(ls.ks == doctest::Approx(os.ks).epsilon(1e-13));
  CHECK(ls.vs <= ls.kpss + 1e-15);

  // b far above 1/2 leaves no observations.
  try {
    lrcov::residual_partial_sums(data, zero, 0.6);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::trim_too_large);
  }
}

TEST_CASE("M-hat curve: unit design, boundary caching and iid covariates") {
  RegressionData ones;
  const int n = 5000;
  ones.X = Eigen::MatrixXd::Ones(n, 1);
  ones.y = Eigen::VectorXd::Zero(n);
  const CovCurve mhat = lrcov::mhat_curve(ones, 0.1, KernelSpec{});
  REQUIRE(mhat.n() == n);
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    if (t > 0.12 && t < 0.88) // interior: Riemann sum of the kernel == 1
      CHECK(mhat.values[i - 1](0, 0) == doctest::Approx(1.0).epsilon(2e-2));
  }
  // All grid points with t <= eta share the boundary evaluation bit for bit.
  const Eigen::MatrixXd& low = mhat.values[0];
  for (int i = 1; static_cast<double>(i) / n <= 0.1; ++i)
    CHECK((mhat.values[i - 1] - low).cwiseAbs().maxCoeff() == 0.0);

  lrcov::Rng rng(31);
  RegressionData iid;
  iid.X.resize(n, 2);
  iid.y = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    iid.X(i, 0) = 1.0;
    iid.X(i, 1) = rng.next_normal();
  }
  const CovCurve m2 = lrcov::mhat_curve(iid, 0.15, KernelSpec{});
  for (int i = n / 4; i < 3 * n / 4; ++i)
    CHECK((m2.values[i] - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 0.2);
}

TEST_CASE("bootstrap draws: zero covariance, determinism, thread invariance") {
  const RegressionData data = noise_data(80, 9);
  CovCurve zero;
  zero.values.assign(80, Eigen::MatrixXd::Zero(2, 2));
  const lrcov::LmDraws z = lrcov::bootstrap_lm(data, zero, 0.2, 0.2, KernelSpec{}, 16, 5);
  for (double v : z.kpss) CHECK(v == 0.0);
  for (double v : z.rs) CHECK(v == 0.0);
  for (double v : z.vs) CHECK(v == 0.0);
  for (double v : z.ks) CHECK(v == 0.0);

  const CovCurve sigma =
      lrcov::threshold_pd(lrcov::debiased_sigma(data, 3, 0.35, KernelSpec{}), 80);
  const lrcov::LmDraws a = lrcov::bootstrap_lm(data, sigma, 0.2, 0.2, KernelSpec{}, 32, 5, 1);
  const lrcov::LmDraws b = lrcov::bootstrap_lm(data, sigma, 0.2, 0.2, KernelSpec{}, 32, 5, 8);
  CHECK(a.kpss == b.kpss);
  CHECK(a.rs == b.rs);
  CHECK(a.vs == b.vs);
  CHECK(a.ks == b.ks);
  const lrcov::LmDraws c = lrcov::bootstrap_lm(data, sigma, 0.2, 0.2, KernelSpec{}, 32, 6, 1);
  CHECK(a.kpss != c.kpss);
}

TEST_CASE("bootstrap draws match a naive replay of the multiplier recursion") {
  const int n = 50;
  const RegressionData data = noise_data(n, 13);
  const CovCurve sigma =
      lrcov::threshold_pd(lrcov::debiased_sigma(data, 2, 0.35, KernelSpec{}), n);
  const double b = 0.2, eta = 0.2;
  const std::uint64_t seed = 11;
  const lrcov::LmDraws lib = lrcov::bootstrap_lm(data, sigma, b, eta, KernelSpec{}, 2, seed);

  const CovCurve mhat = lrcov::mhat_curve(data, eta, KernelSpec{});
  const int np = static_cast<int>(std::floor(n * b));
  for (int r = 0; r < 2; ++r) {
    lrcov::Rng rng(lrcov::Rng::derive(seed, {static_cast<std::uint64_t>(r)}));
    Eigen::MatrixXd V(n, 2);
    for (int j = 0; j < n; ++j) V.row(j) = rng.normal_vector(2).transpose();

    std::vector<Eigen::VectorXd> u(n);
    for (int j = 0; j < n; ++j)
      u[j] = lrcov::matrix_sqrt_psd(sigma.values[j]) * V.row(j).transpose();

    Eigen::VectorXd g(n - 2 * np);
    for (int k = np + 1; k <= n - np; ++k) {
      double total = 0.0;
      for (int j = 1; j <= n; ++j) {
        double coeff = 0.0;
        for (int i = np + 1; i <= k; ++i) {
          const Eigen::VectorXd gi =
              Eigen::FullPivLU<Eigen::MatrixXd>(mhat.values[i - 1])
                  .solve(data.X.row(i - 1).transpose());
          coeff += gi.dot(u[j - 1]) *
                   oracle::jack_kern("epanechnikov", double(i - j) / (n * b)) / (n * b);
        }
        total -= coeff;
      }
      for (int i = np + 1; i <= k; ++i)
        total += std::sqrt(std::max(sigma.values[i - 1](0, 0), 0.0)) * V(i - 1, 0);
      g[k - np - 1] = total;
    }
    const oracle::LmStats ref = oracle::lm_stats(g, n);
    CHECK(lib.kpss[r] == doctest::Approx(ref.kpss).epsilon(1e-8));
    CHECK(lib.rs[r] == doctest::Approx(ref.rs).epsilon(1e-8));
    CHECK(lib.vs[r] == doctest::Approx(ref.vs).epsilon(1e-8));
    CHECK(lib.ks[r] == doctest::Approx(ref.ks).epsilon(1e-8));
  }
}

TEST_CASE("full test: report layout and scale invariance") {
  const RegressionData data = noise_data(200, 44);
  LmConfig cfg;
  cfg.b = 0.15;
  cfg.m = 3;
  cfg.tau = 0.4;
  cfg.B = 100;
  cfg.seed = 21;
  const lrcov::LmTestReport rep = lrcov::longmemory_test(data, cfg);
  for (const lrcov::LmStatReport* s : {&rep.kpss, &rep.rs, &rep.vs, &rep.ks}) {
    REQUIRE(static_cast<int>(s->bootstrap_draws.size()) == 100);
    CHECK(std::is_sorted(s->bootstrap_draws.begin(), s->bootstrap_draws.end()));
    CHECK(s->p_value >= 0.0);
    CHECK(s->p_value <= 1.0);
  }
  CHECK(rep.tuning.b == 0.15);
  CHECK(rep.tuning.eta == doctest::Approx(std::pow(200.0, -0.2)).epsilon(1e-12));
  CHECK(rep.tuning.m == 3);
  CHECK(rep.tuning.seed == 21);

  RegressionData scaled = data;
  scaled.y *= 10.0;
  const lrcov::LmTestReport rep2 = lrcov::longmemory_test(scaled, cfg);
  CHECK(rep2.kpss.p_value == rep.kpss.p_value);
  CHECK(rep2.rs.p_value == rep.rs.p_value);
  CHECK(rep2.vs.p_value == rep.vs.p_value);
  CHECK(rep2.ks.p_value == rep.ks.p_value);
  CHECK(rep2.kpss.value == doctest::Approx(100.0 * rep.kpss.value).epsilon(1e-10));
}

TEST_CASE("short-memory noise is accepted at roughly the nominal rate") {
  const int reps = 200;
  int rejections = 0;
  for (int r = 0; r < reps; ++r) {
    const RegressionData data = noise_data(100, 5000 + r);
    LmConfig cfg;
    cfg.b = 0.15;
    cfg.m = 3;
    cfg.tau = 0.4;
    cfg.B = 100;
    cfg.seed = 9000 + r;
    const lrcov::LmTestReport rep = lrcov::longmemory_test(data, cfg);
    if (rep.kpss.p_value < 0.10) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / reps;
  CHECK(rate >= 0.005);
  CHECK(rate <= 0.30);
}

TEST_CASE("configuration validation") {
  const RegressionData data = noise_data(100, 2);
  LmConfig cfg;
  cfg.auto_tune = true;
  cfg.tau = 0.4;
  try {
    lrcov::longmemory_test(data, cfg);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_config);
  }
  LmConfig cfg2; // neither auto_tune nor (m, tau)
  try {
    lrcov::longmemory_test(data, cfg2);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_config);
  }
  LmConfig cfg3;
  cfg3.m = 3;
  cfg3.tau = 0.4;
  cfg3.b = 1.5; // outside (0, 1)
  try {
    lrcov::longmemory_test(data, cfg3);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_config);
  }
}

TEST_SUITE_END();
