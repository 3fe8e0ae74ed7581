#include "sklimit/noise.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "format.hpp"

namespace sklimit {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Counter round(const Philox4x32::Counter& c, const Philox4x32::Key& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline Philox4x32::Counter counter_for(std::uint64_t block, std::uint64_t stream) {
  return {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
}

inline Philox4x32::Key key_for(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

constexpr double kTwoPow53 = 9007199254740992.0;

/// Normal pair (r cos, r sin) from one Philox block.
inline std::array<double, 2> normal_pair(const Philox4x32::Counter& w) {
  const std::uint64_t a = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(w[2]) << 32) | w[3];
  const double u1 = static_cast<double>((a >> 11) + 1) / kTwoPow53;
  const double u2 = static_cast<double>(b >> 11) / kTwoPow53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter counter, Key key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    counter = round(counter, key);
  }
  return counter;
}

double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const auto pair = normal_pair(Philox4x32::block(counter_for(index / 2, stream), key_for(seed)));
  return pair[index % 2];
}

Eigen::VectorXd WienerPath::cumulative() const {
  Eigen::VectorXd w(increments.size() + 1);
  double acc = 0.0;
  w[0] = 0.0;
  for (Eigen::Index n = 0; n < increments.size(); ++n) {
    acc += increments[n];
    w[n + 1] = acc;
  }
  return w;
}

double WienerPath::total() const {
  double acc = 0.0;
  for (double dw : increments) acc += dw;
  return acc;
}

WienerPath sample_path(double t_final, Eigen::Index n_steps, std::uint64_t seed,
                       std::uint64_t stream) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
  if (!(t_final > 0.0) || !std::isfinite(t_final))
    throw std::invalid_argument("t_final must be positive");

  WienerPath path;
  path.dt = t_final / static_cast<double>(n_steps);
  path.seed = seed;
  path.stream = stream;
  path.increments.resize(n_steps);

  const double scale = std::sqrt(path.dt);
  const auto key = key_for(seed);
  for (Eigen::Index n = 0; n < n_steps; n += 2) {
    const auto block = static_cast<std::uint64_t>(n / 2);
    const auto pair = normal_pair(Philox4x32::block(counter_for(block, stream), key));
    path.increments[n] = scale * pair[0];
    if (n + 1 < n_steps) path.increments[n + 1] = scale * pair[1];
  }
  return path;
}

WienerPath coarsen(const WienerPath& path, Eigen::Index factor) {
  if (factor < 1 || path.steps() % factor != 0)
    throw std::invalid_argument("coarsening factor " + std::to_string(factor) +
                                " does not divide " + std::to_string(path.steps()) +
                                " steps");
  WienerPath out;
  out.dt = path.dt * static_cast<double>(factor);
  out.seed = path.seed;
  out.stream = path.stream;
  const Eigen::Index n = path.steps() / factor;
  out.increments.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double acc = 0.0;
    for (Eigen::Index k = j * factor; k < (j + 1) * factor; ++k) acc += path.increments[k];
    out.increments[j] = acc;
  }
  return out;
}

void write_path_csv(std::ostream& os, const WienerPath& path) {
  os << "n,t,dW,W\n";
  double w = 0.0;
  for (Eigen::Index n = 0; n < path.steps(); ++n) {
    os << n << ',' << format_double(path.dt * static_cast<double>(n)) << ','
       << format_double(path.increments[n]) << ',' << format_double(w) << '\n';
    w += path.increments[n];
  }
  os << path.steps() << ',' << format_double(path.t_final()) << ",," << format_double(w)
     << '\n';
}

}  // namespace sklimit
