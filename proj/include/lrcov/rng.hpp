#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>

namespace lrcov {

// Deterministic, stream-splittable random number generator.
//
// Engine: xoshiro256++ seeded through a splitmix64 expansion, so any 64-bit
// seed yields a full-period state. Substreams are derived by hashing a path
// of 64-bit ids into the seed (hash-combine + avalanche); replicate r of a
// bootstrap, or cell (i, j) of a tuning grid, each get their own stream, which
// makes every result independent of scheduling and worker count.
//
// Standard normals are produced by the inverse-CDF method (Wichura's AS241
// double-precision approximation) applied to a 53-bit uniform on (0,1), so
// draws are bit-identical across platforms and standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  // Hash (seed, path...) into a new 64-bit seed. Deterministic; used to
  // derive independent substreams.
  static std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  std::uint64_t next_u64();
  double next_u01();    // open interval (0, 1)
  double next_normal(); // N(0, 1)

  // Vector of p iid standard normals (component order fixed).
  Eigen::VectorXd normal_vector(int p);

private:
  std::uint64_t s_[4];
};

// Inverse of the standard normal CDF (AS241, max error ~1e-16 in double).
double normal_quantile(double p);

} // namespace lrcov
