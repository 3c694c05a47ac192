#include "lrcov/longmemory.hpp"

#include <algorithm>
#include <cmath>

#include "bootstrap_util.hpp"
#include "linalg_util.hpp"
#include "lrcov/estimator.hpp"
#include "lrcov/parallel.hpp"
#include "lrcov/rng.hpp"
#include "lrcov/tuning.hpp"

namespace lrcov {

namespace {

void check_bandwidth(double b, const char* what) {
  if (!(b > 0.0 && b < 1.0))
    throw Error(Errc::bad_config, std::string(what) + " must lie in (0, 1)");
}

int trim_count(int n, double b) {
  const int np = static_cast<int>(std::floor(n * b));
  if (n - 2 * np < 2)
    throw Error(Errc::trim_too_large, "trimming n' = floor(n b) leaves fewer than 2 points");
  return np;
}

struct LocalFit {
  CoefCurve curve;
  double hat_trace = 0.0; // tr(H_b); valid only when !any_flagged
  bool any_flagged = false;
};

// Local linear fit at every grid point t_i: with a_j = (t_j - t)/b and
// z_j = [x_j; x_j a_j], solve the 2p x 2p system
//   sum_j K(a_j)/(nb) z_j z_j' eta = sum_j K(a_j)/(nb) z_j y_j
// and keep the level block eta_0. The hat diagonal of the fit is
// H_ii = K(0)/(nb) x_i' (S^{-1})_{11-block} x_i = K(0)/(nb) [x_i;0]' S^{-1} [x_i;0].
LocalFit local_linear_impl(const RegressionData& data, double b, const KernelSpec& kernel) {
  const int n = data.n(), p = data.p();
  const double nb = n * b;
  const int radius = static_cast<int>(std::min<double>(n, std::ceil(nb)));
  std::vector<double> kv(radius + 1, 0.0);
  for (int d = 0; d <= radius; ++d) kv[d] = kernel_eval(kernel, d / nb) / nb;

  LocalFit out;
  out.curve.values.setZero(n, p);
  out.curve.cond.setZero(n);
  out.curve.ridged.assign(n, 0);
  out.curve.flagged.assign(n, 0);
  Eigen::VectorXd z(2 * p), z0(2 * p);
  for (int i = 1; i <= n; ++i) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * p, 2 * p);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * p);
    const int lo = std::max(1, i - radius), hi = std::min(n, i + radius);
    for (int j = lo; j <= hi; ++j) {
      const double w = kv[std::abs(j - i)];
      if (w == 0.0) continue;
      const double a = (j - i) / nb;
      z.head(p) = data.X.row(j - 1);
      z.tail(p) = data.X.row(j - 1) * a;
      S.selfadjointView<Eigen::Lower>().rankUpdate(z, w);
      v += (w * data.y[j - 1]) * z;
    }
    Eigen::MatrixXd Sfull = S.selfadjointView<Eigen::Lower>();
    detail::SymSolve sol = detail::sym_solve(Sfull);
    out.curve.cond[i - 1] = sol.cond;
    out.curve.ridged[i - 1] = sol.ridged ? 1 : 0;
    out.curve.flagged[i - 1] = sol.ok ? 0 : 1;
    if (sol.ok) {
      out.curve.values.row(i - 1) = sol.solve(v).head(p).transpose();
      z0.head(p) = data.X.row(i - 1);
      z0.tail(p).setZero();
      out.hat_trace += kv[0] * sol.quad_inv(z0);
    } else {
      out.any_flagged = true;
    }
  }
  detail::interpolate_flagged(out.curve.values, out.curve.flagged, 1, n,
                              Errc::singular_local_design);
  return out;
}

Criterion to_criterion(LmCriterion c) {
  switch (c) {
    case LmCriterion::kpss: return Criterion::kpss;
    case LmCriterion::rs: return Criterion::rs;
    case LmCriterion::vs: return Criterion::vs;
    case LmCriterion::ks: return Criterion::ks;
  }
  throw Error(Errc::bad_config, "unknown long-memory criterion");
}

LmStatReport make_stat_report(double value, std::vector<double> draws) {
  LmStatReport rep;
  rep.value = value;
  rep.bootstrap_draws = std::move(draws);
  std::sort(rep.bootstrap_draws.begin(), rep.bootstrap_draws.end());
  rep.p_value = detail::upper_p_value(rep.bootstrap_draws, value);
  return rep;
}

} // namespace

CoefCurve local_linear_fit(const RegressionData& data, double b, const KernelSpec& kernel) {
  check_bandwidth(b, "local linear bandwidth b");
  return local_linear_impl(data, b, kernel).curve;
}

CoefCurve jackknife_fit(const RegressionData& data, double b, const KernelSpec& kernel) {
  check_bandwidth(b, "local linear bandwidth b");
  const CoefCurve narrow = local_linear_fit(data, b / std::sqrt(2.0), kernel);
  const CoefCurve wide = local_linear_fit(data, b, kernel);
  CoefCurve out;
  out.values = 2.0 * narrow.values - wide.values;
  out.cond = narrow.cond.cwiseMax(wide.cond);
  const int n = data.n();
  out.ridged.assign(n, 0);
  out.flagged.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    out.ridged[i] = narrow.ridged[i] || wide.ridged[i];
    out.flagged[i] = narrow.flagged[i] || wide.flagged[i];
  }
  return out;
}

std::vector<double> gcv_default_grid() {
  std::vector<double> grid(10);
  const double lo = std::log(0.08), hi = std::log(0.35);
  for (int k = 0; k < 10; ++k) grid[k] = std::exp(lo + k * (hi - lo) / 9.0);
  return grid;
}

double gcv_bandwidth(const RegressionData& data, const std::vector<double>& grid,
                     const KernelSpec& kernel) {
  if (grid.empty()) throw Error(Errc::bad_config, "GCV bandwidth grid is empty");
  const int n = data.n();
  double best_b = 0.0;
  double best_gcv = std::numeric_limits<double>::infinity();
  bool found = false;
  for (double b : grid) {
    if (!(b > 0.0 && b < 1.0)) throw Error(Errc::bad_config, "GCV grid entries must lie in (0, 1)");
    if (n - 2 * static_cast<int>(std::floor(n * b)) < 2) continue;
    LocalFit fit;
    try {
      fit = local_linear_impl(data, b, kernel);
    } catch (const Error&) {
      continue;
    }
    if (fit.any_flagged) continue;
    const double denom = 1.0 - fit.hat_trace / n;
    if (!(denom > 0.0)) continue;
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = data.y[i] - data.X.row(i).dot(fit.curve.values.row(i));
      rss += e * e;
    }
    const double gcv = (rss / n) / (denom * denom);
    if (gcv < best_gcv) {
      best_gcv = gcv;
      best_b = b;
      found = true;
    }
  }
  if (!found) throw Error(Errc::all_singular, "no feasible bandwidth in the GCV grid");
  return best_b;
}

Eigen::VectorXd residual_partial_sums(const RegressionData& data, const CoefCurve& beta_curve,
                                      double b) {
  const int n = data.n();
  check_bandwidth(b, "trimming bandwidth b");
  if (beta_curve.values.rows() != n || beta_curve.values.cols() != data.p())
    throw Error(Errc::bad_config, "coefficient curve does not match the data dimensions");
  const int np = trim_count(n, b);
  Eigen::VectorXd sums(n - 2 * np);
  double run = 0.0;
  for (int i = np + 1; i <= n - np; ++i) {
    run += data.y[i - 1] - data.X.row(i - 1).dot(beta_curve.values.row(i - 1));
    sums[i - np - 1] = run;
  }
  return sums;
}

LmStatistics lm_statistics(const Eigen::VectorXd& partial_sums, int n, int n_prime) {
  const int len = static_cast<int>(partial_sums.size());
  if (len < 1 || n_prime < 0 || len != n - 2 * n_prime)
    throw Error(Errc::bad_config, "partial sum length does not match n and n'");
  const double ss = partial_sums.squaredNorm();
  const double total = partial_sums.sum();
  LmStatistics out;
  out.n_prime = n_prime;
  out.kpss = ss / (static_cast<double>(n) * len);
  out.rs = partial_sums.maxCoeff() - partial_sums.minCoeff();
  out.vs = (ss - total * total / len) / (static_cast<double>(n) * len);
  out.ks = partial_sums.cwiseAbs().maxCoeff();
  return out;
}

CovCurve mhat_curve(const RegressionData& data, double eta, const KernelSpec& kernel) {
  const int n = data.n(), p = data.p();
  if (!(eta > 0.0 && eta < 0.5))
    throw Error(Errc::bad_config, "mhat bandwidth eta must lie in (0, 1/2)");
  const double neta = n * eta;
  CovCurve out;
  out.m = 0;
  out.tau = eta;
  out.values.assign(n, Eigen::MatrixXd::Zero(p, p));
  // t* = max(eta, min(t, 1 - eta)); every grid point below eta shares the
  // evaluation at t* = eta, and symmetrically above 1 - eta.
  auto eval_at = [&](double ts) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
    const int lo = std::max(1, static_cast<int>(std::floor(n * (ts - eta))));
    const int hi = std::min(n, static_cast<int>(std::ceil(n * (ts + eta))));
    for (int i = lo; i <= hi; ++i) {
      const double w = kernel_eval(kernel, (static_cast<double>(i) / n - ts) / eta);
      if (w != 0.0) acc.selfadjointView<Eigen::Lower>().rankUpdate(data.X.row(i - 1).transpose(), w);
    }
    Eigen::MatrixXd full = acc.selfadjointView<Eigen::Lower>();
    return Eigen::MatrixXd(full / neta);
  };
  Eigen::MatrixXd low, high;
  bool have_low = false, have_high = false;
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    if (t <= eta) {
      if (!have_low) {
        low = eval_at(eta);
        have_low = true;
      }
      out.values[i - 1] = low;
    } else if (t >= 1.0 - eta) {
      if (!have_high) {
        high = eval_at(1.0 - eta);
        have_high = true;
      }
      out.values[i - 1] = high;
    } else {
      out.values[i - 1] = eval_at(t);
    }
  }
  return out;
}

LmDraws bootstrap_lm(const RegressionData& data, const CovCurve& sigma_star, double b,
                     double eta, const KernelSpec& kernel, int B, std::uint64_t seed,
                     int threads) {
  const int n = data.n(), p = data.p();
  if (B < 1) throw Error(Errc::bad_config, "bootstrap replicate count B must be >= 1");
  if (sigma_star.n() != n || sigma_star.p() != p)
    throw Error(Errc::bad_config, "sigma_star curve does not match the data dimensions");
  check_bandwidth(b, "trimming bandwidth b");
  const int np = trim_count(n, b);

  std::vector<Eigen::MatrixXd> shalf(n);
  Eigen::VectorXd sigma_h(n);
  for (int j = 0; j < n; ++j) {
    shalf[j] = matrix_sqrt_psd(sigma_star.values[j]);
    sigma_h[j] = std::sqrt(std::max(sigma_star.values[j](0, 0), 0.0));
  }

  // g_i = M^{-1}(t_i) x_i over the trimmed range.
  const CovCurve mhat = mhat_curve(data, eta, kernel);
  Eigen::MatrixXd g(n, p);
  for (int i = np + 1; i <= n - np; ++i) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(mhat.values[i - 1]);
    if (!lu.isInvertible())
      throw Error(Errc::singular_mhat, "M^(t) is singular at a trimmed grid point");
    g.row(i - 1) = lu.solve(data.X.row(i - 1).transpose()).transpose();
  }

  // Jackknife kernel on the lattice, including the (nb)^{-1} factor.
  const double nb = n * b;
  const int radius = static_cast<int>(std::min<double>(n, std::ceil(nb)));
  std::vector<double> kstar(radius + 1, 0.0);
  for (int d = 0; d <= radius; ++d) kstar[d] = jackknife_kernel_eval(kernel, d / nb) / nb;

  LmDraws draws;
  draws.kpss.resize(B);
  draws.rs.resize(B);
  draws.vs.resize(B);
  draws.ks.resize(B);
  parallel_for(B, threads, [&](int r) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(r)}));
    // u_j = Sigma*^{1/2}(t_j) V_j, drawn in grid order.
    Eigen::MatrixXd u(n, p);
    Eigen::VectorXd v1(n);
    for (int j = 1; j <= n; ++j) {
      const Eigen::VectorXd vj = rng.normal_vector(p);
      v1[j - 1] = vj[0];
      u.row(j - 1) = (shalf[j - 1] * vj).transpose();
    }
    Eigen::VectorXd path(n - 2 * np);
    double run = 0.0;
    for (int k = np + 1; k <= n - np; ++k) {
      Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(p);
      const int lo = std::max(1, k - radius), hi = std::min(n, k + radius);
      for (int j = lo; j <= hi; ++j) {
        const double kw = kstar[std::abs(k - j)];
        if (kw != 0.0) w += kw * u.row(j - 1);
      }
      run += sigma_h[k - 1] * v1[k - 1] - g.row(k - 1).dot(w);
      path[k - np - 1] = run;
    }
    const LmStatistics st = lm_statistics(path, n, np);
    draws.kpss[r] = st.kpss;
    draws.rs[r] = st.rs;
    draws.vs[r] = st.vs;
    draws.ks[r] = st.ks;
  });
  return draws;
}

LmTestReport longmemory_test(const RegressionData& data, const LmConfig& config) {
  const int n = data.n();
  if (config.B < 1) throw Error(Errc::bad_config, "B must be >= 1");
  if (config.auto_tune) {
    if (config.m || config.tau)
      throw Error(Errc::bad_config, "auto_tune and explicit m/tau are mutually exclusive");
  } else if (!config.m || !config.tau) {
    throw Error(Errc::bad_config, "either set both m and tau or enable auto_tune");
  }

  const double b =
      config.b ? *config.b : gcv_bandwidth(data, gcv_default_grid(), config.kernel);
  check_bandwidth(b, "trimming bandwidth b");
  const double eta = config.eta ? *config.eta : std::pow(static_cast<double>(n), -0.2);

  int m = 0;
  double tau = 0.0;
  if (config.auto_tune) {
    TuningSelection sel =
        mv_select(data, grid_default(n), to_criterion(config.criterion), config.B_mv,
                  Rng::derive(config.seed, {1}), config.kernel, b, eta, config.threads);
    m = sel.m_star;
    tau = sel.tau_star;
  } else {
    m = *config.m;
    tau = *config.tau;
  }

  const CoefCurve beta = jackknife_fit(data, b, config.kernel);
  const Eigen::VectorXd sums = residual_partial_sums(data, beta, b);
  const LmStatistics observed = lm_statistics(sums, n, static_cast<int>(std::floor(n * b)));

  const CovCurve sigma_star = threshold_pd(debiased_sigma(data, m, tau, config.kernel), n);
  LmDraws draws = bootstrap_lm(data, sigma_star, b, eta, config.kernel, config.B,
                               Rng::derive(config.seed, {2}), config.threads);

  LmTestReport report;
  report.kpss = make_stat_report(observed.kpss, std::move(draws.kpss));
  report.rs = make_stat_report(observed.rs, std::move(draws.rs));
  report.vs = make_stat_report(observed.vs, std::move(draws.vs));
  report.ks = make_stat_report(observed.ks, std::move(draws.ks));
  report.tuning = {m,        tau,         b, eta, kernel_name(config.kernel),
                   config.B, config.seed, config.auto_tune};
  return report;
}

} // namespace lrcov
