#include "lrcov/kernels.hpp"

#include <cmath>

namespace lrcov {

double kernel_eval(const KernelSpec& spec, double u) {
  const double a = std::abs(u);
  if (a >= 1.0) return 0.0;
  const double w = 1.0 - u * u;
  switch (spec.family) {
    case KernelFamily::triangular:
      return 1.0 - a;
    case KernelFamily::epanechnikov:
      return 0.75 * w;
    case KernelFamily::quartic:
      return (15.0 / 16.0) * w * w;
    case KernelFamily::triweight:
      return (35.0 / 32.0) * w * w * w;
    case KernelFamily::tricube: {
      const double v = 1.0 - a * a * a;
      return (70.0 / 81.0) * v * v * v;
    }
  }
  return 0.0;
}

double jackknife_kernel_eval(const KernelSpec& spec, double u) {
  static const double r2 = std::sqrt(2.0);
  return 2.0 * r2 * kernel_eval(spec, r2 * u) - kernel_eval(spec, u);
}

Eigen::VectorXd weights(const KernelSpec& spec, double t, int n, double bandwidth) {
  if (n < 1) throw Error(Errc::bad_config, "weights: n must be positive");
  if (!(bandwidth > 0.0)) throw Error(Errc::bad_config, "weights: bandwidth must be positive");
  Eigen::VectorXd w(n);
  double total = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double v = kernel_eval(spec, (static_cast<double>(i) / n - t) / bandwidth);
    w[i - 1] = v;
    total += v;
  }
  if (!(total > 0.0))
    throw Error(Errc::empty_window, "weights: no grid point inside the kernel window");
  w /= total;
  return w;
}

KernelSpec kernel_from_name(std::string_view name) {
  if (name == "triangular") return {KernelFamily::triangular};
  if (name == "epanechnikov") return {KernelFamily::epanechnikov};
  if (name == "quartic") return {KernelFamily::quartic};
  if (name == "triweight") return {KernelFamily::triweight};
  if (name == "tricube") return {KernelFamily::tricube};
  throw Error(Errc::bad_config, "unknown kernel: " + std::string(name));
}

std::string kernel_name(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::triangular: return "triangular";
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::quartic: return "quartic";
    case KernelFamily::triweight: return "triweight";
    case KernelFamily::tricube: return "tricube";
  }
  return "epanechnikov";
}

} // namespace lrcov
