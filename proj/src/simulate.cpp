#include "lrcov/simulate.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "lrcov/estimator.hpp"
#include "lrcov/parallel.hpp"
#include "lrcov/rng.hpp"
#include "lrcov/structural.hpp"

namespace lrcov {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_memory_param(double d) {
  if (!(d >= 0.0 && d < 0.5))
    throw Error(Errc::bad_config, "memory parameter d must lie in [0, 1/2)");
}

// Time argument of the coefficient functions: the recursions warm up with the
// first in-sample time t_1 = 1/n before switching to t_i = i/n.
double time_at(int i, int n) {
  return i < 1 ? 1.0 / n : static_cast<double>(i) / n;
}

ScenarioData gen_cp(const ScenarioSpec& spec) {
  const int n = spec.n, burn = spec.burn_in;
  const double delta = spec.delta_or_d;
  Rng eps(Rng::derive(spec.seed, {0}));
  Rng zeta(Rng::derive(spec.seed, {1}));
  Rng eta(Rng::derive(spec.seed, {2}));

  ScenarioData out;
  out.data.y.resize(n);
  out.data.X.resize(n, 3);
  out.beta_true.resize(n, 3);
  out.errors.resize(n);

  double x1 = 0.0, x2 = 0.0, u = 0.0;
  for (int i = 1 - burn; i <= n; ++i) {
    const double t = time_at(i, n);
    const double e_i = eps.next_normal();
    const double z_i = zeta.next_normal();
    const double h_i = eta.next_normal();
    const double theta = 0.5 * (h_i + e_i);
    x1 = (0.5 - 0.5 * t) * x1 + theta;
    x2 = (0.25 + 0.5 * (t - 0.5) * (t - 0.5)) * x2 + e_i;
    u = 0.65 * std::cos(2.0 * kPi * t) * u + z_i;
    if (i < 1) continue;
    const double err = (1.0 + 0.1 * x1) * u;
    const double s = std::sin(2.0 * kPi * t);
    double shift = 0.0, b0 = 1.0, b1 = 1.0;
    switch (spec.name) {
      case Scenario::CP1:
        if (t >= 0.5) {
          shift = 2.0 * delta * s * x1;
          b1 += 2.0 * delta * s;
        }
        break;
      case Scenario::CP2:
        if (t <= 0.4) {
          shift += delta * s;
          b0 += delta * s;
        }
        if (t >= 0.7) {
          shift += 0.5 * delta * x1;
          b1 += 0.5 * delta;
        }
        break;
      case Scenario::CP4:
        if (t <= 0.2 || (t >= 0.4 && t <= 0.6) || t >= 0.8) {
          shift = 1.5 * delta * s;
          b0 += 1.5 * delta * s;
        }
        break;
      default: break;
    }
    out.data.y[i - 1] = 1.0 + shift + x1 + x2 + err;
    out.data.X(i - 1, 0) = 1.0;
    out.data.X(i - 1, 1) = x1;
    out.data.X(i - 1, 2) = x2;
    out.beta_true(i - 1, 0) = b0;
    out.beta_true(i - 1, 1) = b1;
    out.beta_true(i - 1, 2) = 1.0;
    out.errors[i - 1] = err;
  }
  return out;
}

ScenarioData gen_m1(const ScenarioSpec& spec) {
  const int n = spec.n, burn = spec.burn_in;
  const double d = spec.delta_or_d;
  check_memory_param(d);
  const bool viz = spec.name == Scenario::M1Viz;
  Rng eps(Rng::derive(spec.seed, {0}));
  Rng zeta(Rng::derive(spec.seed, {1}));

  ScenarioData out;
  out.data.y.resize(n);
  out.data.X.resize(n, 2);
  out.beta_true.resize(n, 2);
  out.errors.resize(n);

  // Raw error history over i = 1-burn..n (slot burn+i-1) for the
  // fractional-integration convolution.
  std::vector<double> hist(burn + n);
  double w = 0.0, bv = 0.0;
  for (int i = 1 - burn; i <= n; ++i) {
    const double t = time_at(i, n);
    const double q = (t - 0.5) * (t - 0.5);
    const double z_i = zeta.next_normal();
    const double e_i = eps.next_normal();
    if (viz)
      w = 0.1 * std::cos(2.0 * kPi * t) * w + 0.2 * z_i + 0.4 * q;
    else
      w = (0.1 + 0.1 * std::cos(2.0 * kPi * t)) * w + 0.2 * z_i + 0.7 * q;
    bv = (0.3 - 0.4 * q) * bv + (viz ? 0.6 : 0.8) * e_i;
    hist[burn + i - 1] = bv * std::sqrt(1.0 + w * w);
    if (i >= 1) out.data.X(i - 1, 1) = w;
  }

  if (d == 0.0) {
    for (int i = 1; i <= n; ++i) out.errors[i - 1] = hist[burn + i - 1];
  } else {
    const std::vector<double> psi = frac_diff_coeffs(d, n + burn - 1);
    for (int i = 1; i <= n; ++i) {
      double acc = 0.0;
      for (int j = 0; j <= i + burn - 1; ++j) acc += psi[j] * hist[burn + i - 1 - j];
      out.errors[i - 1] = acc;
    }
  }

  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double b1 = (viz ? 8.0 : 4.0) * std::sin(kPi * t);
    const double b2 = 4.0 * std::exp(-2.0 * (t - 0.5) * (t - 0.5));
    out.data.X(i - 1, 0) = 1.0;
    out.beta_true(i - 1, 0) = b1;
    out.beta_true(i - 1, 1) = b2;
    out.data.y[i - 1] = b1 + b2 * out.data.X(i - 1, 1) + out.errors[i - 1];
  }
  return out;
}

ScenarioData gen_trend(const ScenarioSpec& spec) {
  const int n = spec.n;
  // iid draws, no recursion: errors from the first substream, x1 = 2 + N(0,1)
  // from the second, x2 from the third.
  Rng eps(Rng::derive(spec.seed, {0}));
  Rng zeta(Rng::derive(spec.seed, {1}));
  Rng eta(Rng::derive(spec.seed, {2}));

  ScenarioData out;
  out.data.y.resize(n);
  out.data.X.resize(n, 3);
  out.beta_true.resize(n, 3);
  out.errors.resize(n);
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double e = eps.next_normal();
    const double x1 = 2.0 + zeta.next_normal();
    const double x2 = eta.next_normal();
    const double trend = 4.0 * (t - 0.5) * (t - 0.5);
    out.data.X(i - 1, 0) = 1.0;
    out.data.X(i - 1, 1) = x1;
    out.data.X(i - 1, 2) = x2;
    out.data.y[i - 1] = trend + 0.5 * x1 + 0.4 * x2 + e;
    out.beta_true(i - 1, 0) = trend;
    out.beta_true(i - 1, 1) = 0.5;
    out.beta_true(i - 1, 2) = 0.4;
    out.errors[i - 1] = e;
  }
  return out;
}

// ------------------------------------------------------------- quadrature
template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 52);
}

} // namespace

Scenario scenario_from_name(std::string_view name) {
  if (name == "CP1") return Scenario::CP1;
  if (name == "CP2") return Scenario::CP2;
  if (name == "CP4") return Scenario::CP4;
  if (name == "M1") return Scenario::M1;
  if (name == "M1Viz") return Scenario::M1Viz;
  if (name == "TrendA1") return Scenario::TrendA1;
  throw Error(Errc::bad_config, "unknown scenario '" + std::string(name) +
                                    "' (expected CP1, CP2, CP4, M1, M1Viz or TrendA1)");
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::CP1: return "CP1";
    case Scenario::CP2: return "CP2";
    case Scenario::CP4: return "CP4";
    case Scenario::M1: return "M1";
    case Scenario::M1Viz: return "M1Viz";
    case Scenario::TrendA1: return "TrendA1";
  }
  throw Error(Errc::bad_config, "unknown scenario");
}

std::vector<double> frac_diff_coeffs(double d, int J) {
  check_memory_param(d);
  if (J < 0) throw Error(Errc::bad_config, "frac_diff_coeffs requires J >= 0");
  std::vector<double> psi(J + 1);
  psi[0] = 1.0;
  for (int j = 1; j <= J; ++j) psi[j] = psi[j - 1] * (j - 1 + d) / j;
  return psi;
}

ScenarioData gen_scenario(const ScenarioSpec& spec) {
  if (spec.n < 1) throw Error(Errc::bad_config, "scenario length n must be >= 1");
  if (spec.burn_in < 0) throw Error(Errc::bad_config, "burn_in must be >= 0");
  switch (spec.name) {
    case Scenario::CP1:
    case Scenario::CP2:
    case Scenario::CP4: return gen_cp(spec);
    case Scenario::M1:
    case Scenario::M1Viz: return gen_m1(spec);
    case Scenario::TrendA1: return gen_trend(spec);
  }
  throw Error(Errc::bad_config, "unknown scenario");
}

MonteCarloReport monte_carlo(const std::vector<MonteCarloCell>& cells,
                             const MonteCarloConfig& config) {
  if (cells.empty()) throw Error(Errc::bad_config, "monte_carlo needs at least one cell");
  const int reps = config.replications;
  if (reps < 1) throw Error(Errc::bad_config, "replications must be >= 1");
  if (config.levels.empty()) throw Error(Errc::bad_config, "levels must be nonempty");
  for (double a : config.levels)
    if (!(a > 0.0 && a < 1.0)) throw Error(Errc::bad_config, "levels must lie in (0, 1)");
  if (config.auto_tune) {
    if (config.m || config.tau)
      throw Error(Errc::bad_config, "auto_tune and explicit m/tau are mutually exclusive");
  } else if (!config.m || !config.tau) {
    throw Error(Errc::bad_config, "either set both m and tau or enable auto_tune");
  }

  MonteCarloReport report;
  report.cells = cells;
  report.stats = config.test == McTest::structural
                     ? std::vector<std::string>{"tn"}
                     : std::vector<std::string>{"kpss", "rs", "vs", "ks"};
  report.levels = config.levels;
  report.replications = reps;
  report.base_seed = config.base_seed;
  const int ncells = static_cast<int>(cells.size());
  const int nstats = static_cast<int>(report.stats.size());
  report.pvalues.assign(ncells, Eigen::MatrixXd::Zero(reps, nstats));

  parallel_for(ncells * reps, config.threads, [&](int idx) {
    const int c = idx / reps, r = idx % reps;
    ScenarioSpec sspec;
    sspec.name = cells[c].scenario;
    sspec.n = cells[c].n;
    sspec.delta_or_d = cells[c].value;
    sspec.seed = Rng::derive(config.base_seed,
                             {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(r), 0});
    sspec.burn_in = config.burn_in;
    const ScenarioData sd = gen_scenario(sspec);
    const std::uint64_t boot_seed = Rng::derive(
        config.base_seed, {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(r), 1});
    if (config.test == McTest::structural) {
      StructuralConfig sc;
      sc.m = config.m;
      sc.tau = config.tau;
      sc.kernel = config.kernel;
      sc.B = config.B;
      sc.seed = boot_seed;
      sc.auto_tune = config.auto_tune;
      sc.levels = config.levels;
      sc.threads = 1;
      report.pvalues[c](r, 0) = structural_test(sd.data, sc).p_value;
    } else {
      LmConfig lc;
      lc.b = config.b;
      lc.eta = config.eta;
      lc.m = config.m;
      lc.tau = config.tau;
      lc.kernel = config.kernel;
      lc.B = config.B;
      lc.seed = boot_seed;
      lc.auto_tune = config.auto_tune;
      lc.criterion = config.criterion;
      lc.threads = 1;
      const LmTestReport rep = longmemory_test(sd.data, lc);
      report.pvalues[c](r, 0) = rep.kpss.p_value;
      report.pvalues[c](r, 1) = rep.rs.p_value;
      report.pvalues[c](r, 2) = rep.vs.p_value;
      report.pvalues[c](r, 3) = rep.ks.p_value;
    }
  });

  const int nlevels = static_cast<int>(config.levels.size());
  report.rates.assign(ncells, Eigen::MatrixXd::Zero(nstats, nlevels));
  report.ci_half.assign(ncells, Eigen::MatrixXd::Zero(nstats, nlevels));
  for (int c = 0; c < ncells; ++c) {
    for (int s = 0; s < nstats; ++s) {
      for (int l = 0; l < nlevels; ++l) {
        int hits = 0;
        for (int r = 0; r < reps; ++r)
          if (report.pvalues[c](r, s) < config.levels[l]) ++hits;
        const double rate = static_cast<double>(hits) / reps;
        report.rates[c](s, l) = rate;
        report.ci_half[c](s, l) = 1.96 * std::sqrt(rate * (1.0 - rate) / reps);
      }
    }
  }
  return report;
}

double kappa2_with_convention(double d, double tol, bool zero_pow_zero_is_one) {
  check_memory_param(d);
  if (!(tol > 0.0)) throw Error(Errc::bad_config, "quadrature tolerance must be positive");

  auto pow_plus = [d, zero_pow_zero_is_one](double x) -> double {
    if (x > 0.0) return std::pow(x, d);
    return d == 0.0 && zero_pow_zero_is_one ? 1.0 : 0.0;
  };
  auto f = [&](double t) -> double {
    const double td = t > 0.0 ? std::pow(t, d) : pow_plus(t);
    const double tm = pow_plus(t - 1.0);
    const double tp = std::pow(t + 1.0, d);
    return (td - tm) * (2.0 * td - tm - tp);
  };
  // For t > 1 write both factors through expm1/log1p: the direct differences
  // of nearly equal powers lose all precision once t is large.
  auto f_tail = [&](double t) -> double {
    if (d == 0.0) return 0.0;
    const double td = std::pow(t, d);
    const double down = std::expm1(d * std::log1p(-1.0 / t)); // (1-1/t)^d - 1
    const double up = std::expm1(d * std::log1p(1.0 / t));    // (1+1/t)^d - 1
    return (td * -down) * (td * (-down - up));
  };

  const double seg1 = integrate(f, 0.0, 1.0, tol / 3.0);
  // Substitute t = 1 + u^2 to absorb the kink of (t-1)^d at t = 1.
  auto g2 = [&](double u) -> double {
    if (u == 0.0) return 0.0;
    return f(1.0 + u * u) * 2.0 * u;
  };
  const double seg2 = integrate(g2, 0.0, 1.0, tol / 3.0);
  // Substitute t = 2/s to map the tail onto (0, 1]; the transformed integrand
  // behaves like s^{1-2d} and vanishes at s = 0 for d < 1/2.
  auto g3 = [&](double s) -> double {
    if (s <= 0.0) return 0.0;
    const double t = 2.0 / s;
    return f_tail(t) * 2.0 / (s * s);
  };
  const double seg3 = integrate(g3, 0.0, 1.0, tol / 3.0);

  const double gamma = std::tgamma(d + 1.0);
  return (seg1 + seg2 + seg3) / (gamma * gamma);
}

double kappa2(double d, double tol) { return kappa2_with_convention(d, tol, false); }

DSlopeFit fit_dslope_line(const std::vector<std::pair<double, double>>& points) {
  const int k = static_cast<int>(points.size());
  if (k < 2) throw Error(Errc::bad_config, "line fit needs at least two points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0)) throw Error(Errc::bad_config, "line fit needs distinct abscissae");
  DSlopeFit fit;
  const double slope = sxy / sxx;
  fit.d_hat = 0.5 * slope;
  fit.intercept = my - slope * mx;
  fit.points = points;
  return fit;
}

DSlopeFit estimate_d_slope(const RegressionData& data, const std::vector<int>& m_grid,
                           double tau, const KernelSpec& kernel) {
  std::vector<int> ms = m_grid;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  if (ms.size() < 3)
    throw Error(Errc::bad_config, "estimate_d_slope needs at least 3 distinct m values");
  const int n = data.n();
  std::vector<std::pair<double, double>> points;
  points.reserve(ms.size());
  for (int m : ms) {
    const CovCurve hat = debiased_sigma(data, m, tau, kernel);
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      acc += std::log(std::max(hat.values[j].norm(), DBL_MIN));
    points.emplace_back(std::log(static_cast<double>(m)), acc / n);
  }
  return fit_dslope_line(points);
}

} // namespace lrcov
