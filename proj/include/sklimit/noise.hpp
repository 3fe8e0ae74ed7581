#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>

#include <Eigen/Dense>

namespace sklimit {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
///
/// A single evaluation maps (counter, key) to four 32-bit words with no
/// state carried between calls.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

/// Standard normal variate number `index` of stream `stream` under `seed`.
///
/// Box-Muller on one Philox block: counter = (index / 2, stream), key = seed.
/// Words 0-1 give u1 in (0, 1], words 2-3 give u2 in [0, 1), each with 53
/// bits. Even indices take r cos(2 pi u2), odd indices r sin(2 pi u2).
double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Discretized Brownian motion: increments dW_n ~ N(0, dt), n = 0..N-1.
struct WienerPath {
  double dt = 0.0;
  Eigen::VectorXd increments;
  std::uint64_t seed = 0;
  /// Trajectory index within the master seed.
  std::uint64_t stream = 0;

  Eigen::Index steps() const { return increments.size(); }
  double t_final() const { return dt * static_cast<double>(increments.size()); }
  /// W(t_n) for n = 0..N, summed left to right from W(0) = 0.
  Eigen::VectorXd cumulative() const;
  /// W(t_final), summed left to right.
  double total() const;
};

WienerPath sample_path(double t_final, Eigen::Index n_steps, std::uint64_t seed,
                       std::uint64_t stream = 0);

/// Sums consecutive blocks of `factor` increments. `factor` must divide the
/// number of steps.
WienerPath coarsen(const WienerPath& path, Eigen::Index factor);

/// CSV with header `n,t,dW,W`; dW on row n is the increment leaving t_n.
void write_path_csv(std::ostream& os, const WienerPath& path);

}  // namespace sklimit
