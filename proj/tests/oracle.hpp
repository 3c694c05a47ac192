// Naive reference implementations used to cross-check the optimized library
// code. Everything here is written as direct double loops over the defining
// formulas, independent of the code under test (only the data structs are
// shared). Deliberately O(n^2) and worse; use small n.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrcov/data.hpp"

namespace oracle {

inline double kern(const std::string& name, double u) {
  const double a = std::abs(u);
  if (a >= 1.0) return 0.0;
  if (name == "triangular") return 1.0 - a;
  if (name == "epanechnikov") return 0.75 * (1.0 - u * u);
  if (name == "quartic") return 15.0 / 16.0 * (1.0 - u * u) * (1.0 - u * u);
  if (name == "triweight") {
    const double w = 1.0 - u * u;
    return 35.0 / 32.0 * w * w * w;
  }
  if (name == "tricube") {
    const double w = 1.0 - a * a * a;
    return 70.0 / 81.0 * w * w * w;
  }
  throw std::runtime_error("oracle: unknown kernel " + name);
}

inline double jack_kern(const std::string& name, double u) {
  return 2.0 * std::sqrt(2.0) * kern(name, std::sqrt(2.0) * u) - kern(name, u);
}

inline double tgrid(int i, int n) { return static_cast<double>(i) / n; }

// Normalized weights omega(t, i), i = 1..n.
inline Eigen::VectorXd weights(const std::string& name, double t, int n, double bw) {
  Eigen::VectorXd w(n);
  double s = 0.0;
  for (int i = 1; i <= n; ++i) {
    w[i - 1] = kern(name, (tgrid(i, n) - t) / bw);
    s += w[i - 1];
  }
  return w / s;
}

// Delta_j = (Q_{j-m+1,m} - Q_{j+1,m})/m, rows j = m..n-m.
inline Eigen::MatrixXd delta(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int m) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  Eigen::MatrixXd D(n - 2 * m + 1, p);
  for (int j = m; j <= n - m; ++j) {
    Eigen::VectorXd qlo = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd qhi = Eigen::VectorXd::Zero(p);
    for (int i = j - m + 1; i <= j; ++i) qlo += X.row(i - 1).transpose() * y[i - 1];
    for (int i = j + 1; i <= j + m; ++i) qhi += X.row(i - 1).transpose() * y[i - 1];
    D.row(j - m) = (qlo - qhi).transpose() / m;
  }
  return D;
}

// Sigma-acute curve on the grid t_i = i/n with boundary flattening.
inline std::vector<Eigen::MatrixXd> acute(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                          int m, double tau, const std::string& name) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  const Eigen::MatrixXd D = delta(X, y, m);
  std::vector<Eigen::MatrixXd> out(n);
  for (int i = 1; i <= n; ++i) {
    const int ii = std::min(std::max(i, m), n - m);
    const Eigen::VectorXd w = weights(name, tgrid(ii, n), n, tau);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(p, p);
    for (int j = m; j <= n - m; ++j) {
      const Eigen::VectorXd d = D.row(j - m).transpose();
      S += 0.5 * m * d * d.transpose() * w[j - 1];
    }
    out[i - 1] = S;
  }
  return out;
}

// Pilot quantities: Omega (bandwidth tau), varpi (bandwidth tau^{3/2}),
// breve-beta = Omega^{-1} varpi on [m/n, 1-m/n], flattened outside.
inline Eigen::MatrixXd beta_pilot(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int m,
                                  double tau, const std::string& name) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  std::vector<Eigen::MatrixXd> xt(n - m);
  std::vector<Eigen::VectorXd> yt(n - m);
  for (int i = 1; i <= n - m; ++i) {
    const Eigen::VectorXd xi = X.row(i - 1).transpose();
    const Eigen::VectorXd xim = X.row(i + m - 1).transpose();
    xt[i - 1] = xi * xi.transpose() - xim * xim.transpose();
    yt[i - 1] = xi * y[i - 1] - xim * y[i + m - 1];
  }
  Eigen::MatrixXd beta(n, p);
  for (int i = 1; i <= n; ++i) {
    const int ii = std::min(std::max(i, m), n - m);
    const double t = tgrid(ii, n);
    const Eigen::VectorXd w = weights(name, t, n, tau);
    const Eigen::VectorXd wt = weights(name, t, n, std::pow(tau, 1.5));
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd varpi = Eigen::VectorXd::Zero(p);
    for (int j = m; j <= n - m; ++j) {
      Eigen::MatrixXd da = Eigen::MatrixXd::Zero(p, p);
      Eigen::VectorXd db = Eigen::VectorXd::Zero(p);
      for (int k = j - m + 1; k <= j; ++k) {
        da += xt[k - 1] * xt[k - 1].transpose() / m;
        db += xt[k - 1].transpose() * yt[k - 1] / m;
      }
      omega += da * w[j - 1] / 2.0;
      varpi += db * wt[j - 1] / 2.0;
    }
    beta.row(i - 1) = Eigen::FullPivLU<Eigen::MatrixXd>(omega).solve(varpi).transpose();
  }
  return beta;
}

// Sigma-breve via the direct A^_{j,m} formula (no pseudo-response shortcut).
inline std::vector<Eigen::MatrixXd> breve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                          int m, double tau, const std::string& name) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  const Eigen::MatrixXd beta = beta_pilot(X, y, m, tau, name);
  std::vector<Eigen::MatrixXd> out(n);
  for (int i = 1; i <= n; ++i) {
    const int ii = std::min(std::max(i, m), n - m);
    const Eigen::VectorXd w = weights(name, tgrid(ii, n), n, tau);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(p, p);
    for (int j = m; j <= n - m; ++j) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(p);
      for (int k = j - m + 1; k <= j; ++k) {
        const Eigen::VectorXd xk = X.row(k - 1).transpose();
        const Eigen::VectorXd xkm = X.row(k + m - 1).transpose();
        a += xk * xk.dot(beta.row(k - 1)) - xkm * xkm.dot(beta.row(k + m - 1));
      }
      a /= m;
      S += 0.5 * m * a * a.transpose() * w[j - 1];
    }
    out[i - 1] = S;
  }
  return out;
}

inline std::vector<Eigen::MatrixXd> debiased(const Eigen::MatrixXd& X,
                                             const Eigen::VectorXd& y, int m, double tau,
                                             const std::string& name) {
  const std::vector<Eigen::MatrixXd> a = acute(X, y, m, tau, name);
  const std::vector<Eigen::MatrixXd> b = breve(X, y, m, tau, name);
  std::vector<Eigen::MatrixXd> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// OLS-residual CUSUM statistic.
inline double tn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(X.rows());
  const Eigen::VectorXd bhat =
      Eigen::FullPivLU<Eigen::MatrixXd>(X.transpose() * X).solve(X.transpose() * y);
  const Eigen::VectorXd e = y - X * bhat;
  Eigen::VectorXd cum = Eigen::VectorXd::Zero(X.cols());
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    cum += X.row(i).transpose() * e[i];
    best = std::max(best, cum.norm() / std::sqrt(static_cast<double>(n)));
  }
  return best;
}

// Local linear fit at every grid point: regress y_i on [x_i; x_i (t_i - t)]
// with weights K((t_i - t)/b)/(nb); keep the level part.
inline Eigen::MatrixXd local_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    double b, const std::string& name) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  Eigen::MatrixXd beta(n, p);
  for (int i = 1; i <= n; ++i) {
    const double t = tgrid(i, n);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * p, 2 * p);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * p);
    for (int j = 1; j <= n; ++j) {
      const double a = (tgrid(j, n) - t) / b;
      const double w = kern(name, a) / (n * b);
      if (w == 0.0) continue;
      Eigen::VectorXd z(2 * p);
      z.head(p) = X.row(j - 1).transpose();
      z.tail(p) = X.row(j - 1).transpose() * a;
      S += w * z * z.transpose();
      v += w * z * y[j - 1];
    }
    beta.row(i - 1) = Eigen::FullPivLU<Eigen::MatrixXd>(S).solve(v).head(p).transpose();
  }
  return beta;
}

// Residual partial sums S_r, r = n'+1..n-n', n' = floor(n b).
inline Eigen::VectorXd partial_sums(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const Eigen::MatrixXd& beta, double b) {
  const int n = static_cast<int>(X.rows());
  const int np = static_cast<int>(std::floor(n * b));
  Eigen::VectorXd out(n - 2 * np);
  double run = 0.0;
  for (int r = np + 1; r <= n - np; ++r) {
    run += y[r - 1] - X.row(r - 1).dot(beta.row(r - 1));
    out[r - np - 1] = run;
  }
  return out;
}

struct LmStats {
  double kpss, rs, vs, ks;
};

inline LmStats lm_stats(const Eigen::VectorXd& s, int n) {
  const int len = static_cast<int>(s.size());
  double sum2 = 0.0, sum = 0.0, mx = s[0], mn = s[0], amax = 0.0;
  for (int i = 0; i < len; ++i) {
    sum2 += s[i] * s[i];
    sum += s[i];
    mx = std::max(mx, s[i]);
    mn = std::min(mn, s[i]);
    amax = std::max(amax, std::abs(s[i]));
  }
  LmStats out{};
  out.kpss = sum2 / (static_cast<double>(n) * len);
  out.rs = mx - mn;
  out.vs = (sum2 - sum * sum / len) / (static_cast<double>(n) * len);
  out.ks = amax;
  return out;
}

} // namespace oracle
