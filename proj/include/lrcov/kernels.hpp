#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>

#include "lrcov/data.hpp"

namespace lrcov {

// Symmetric density kernels supported on (-1, 1).
enum class KernelFamily { triangular, epanechnikov, quartic, triweight, tricube };

struct KernelSpec {
  KernelFamily family = KernelFamily::epanechnikov;
};

// K(u); zero for |u| >= 1.
double kernel_eval(const KernelSpec& spec, double u);

// Jackknife equivalent kernel K*(u) = 2*sqrt(2)*K(sqrt(2)*u) - K(u).
double jackknife_kernel_eval(const KernelSpec& spec, double u);

// Normalized local weights on the grid t_i = i/n (i = 1..n):
// w_i = K((t_i - t)/bandwidth) / sum_{i=1}^n K((t_i - t)/bandwidth).
// Throws Errc::empty_window when every kernel value is zero.
Eigen::VectorXd weights(const KernelSpec& spec, double t, int n, double bandwidth);

// Name <-> spec helpers for the CLI / config layer.
KernelSpec kernel_from_name(std::string_view name); // throws bad_config
std::string kernel_name(const KernelSpec& spec);

} // namespace lrcov
