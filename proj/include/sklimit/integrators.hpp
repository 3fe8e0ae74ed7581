#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "sklimit/coefficients.hpp"
#include "sklimit/field.hpp"
#include "sklimit/noise.hpp"

namespace sklimit {

enum class UnderdampedScheme { explicit_euler, exponential };
enum class AlphaMode { converted, direct };

std::string_view to_string(UnderdampedScheme scheme);
UnderdampedScheme parse_scheme(std::string_view name);

struct TrajectoryMeta {
  std::optional<double> mass;
  std::string scheme;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Positions (and velocities for underdamped runs) at t_n = n dt.
struct Trajectory {
  double dt = 0.0;
  Eigen::VectorXd positions;
  std::optional<Eigen::VectorXd> velocities;
  TrajectoryMeta meta;

  Eigen::Index size() const { return positions.size(); }
  double terminal() const { return positions[positions.size() - 1]; }
};

/// A trajectory left its domain. `step` is the first n with x_n outside.
class DomainExitError : public std::runtime_error {
 public:
  DomainExitError(Eigen::Index step, double time, double position);
  Eigen::Index step() const { return step_; }
  double time() const { return time_; }
  double position() const { return position_; }

 private:
  Eigen::Index step_;
  double time_;
  double position_;
};

/// Explicit-Euler step too coarse for the mass and friction.
class StabilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Largest step accepted by the explicit Euler underdamped scheme.
inline double explicit_euler_max_dt(double mass, double max_friction) {
  return mass / (10.0 * max_friction);
}

/// Integrates dx = v dt, m dv = (F - gamma v) dt + sigma dW on the given path.
///
/// explicit-euler updates v with a forward Euler step. exponential replaces it
/// by the exact Ornstein-Uhlenbeck step with coefficients frozen at x_n:
///
///   v' = v e^{-k dt} + (F / gamma)(1 - e^{-k dt})
///        + sigma sqrt((1 - e^{-2 k dt}) / (2 m gamma)) dW / sqrt(dt),  k = gamma / m.
///
/// Both schemes advance x with v_n. Every `stride`-th state is recorded, so
/// the returned trajectory has dt = path.dt * stride.
Trajectory integrate_underdamped(const DynamicsSpec& spec, double mass,
                                 const WienerPath& path, UnderdampedScheme scheme,
                                 Eigen::Index stride = 1);

/// Euler-Maruyama for dx = drift dt + diffusion dW. The domain is the
/// intersection of the two fields' domains.
Trajectory integrate_ito(const ScalarField& drift, const ScalarField& diffusion,
                         double x0, const WienerPath& path);

/// dx = b dt + sigma o^alpha dW.
///
/// converted: Euler-Maruyama with drift b + alpha sigma sigma'.
/// direct: x* = x_n + alpha(x_n)(b dt + sigma dW), x_{n+1} = x_n + b dt + sigma(x*) dW.
Trajectory integrate_alpha(const ScalarField& drift, const ScalarField& diffusion,
                           const ScalarField& alpha, double x0, const WienerPath& path,
                           AlphaMode mode);

/// Itô drift equivalent to interpreting `diffusion` with convention `alpha`.
ScalarField alpha_corrected_drift(const ScalarField& drift, const ScalarField& diffusion,
                                  const ScalarField& alpha);

/// CSV: comment lines with scheme, mass, seed, stream and dt, then the header
/// `n,t,x[,v]`.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace sklimit
