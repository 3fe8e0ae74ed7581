#include "sklimit/integrators.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "format.hpp"

namespace sklimit {

namespace {

std::string exit_message(Eigen::Index step, double time, double x) {
  std::ostringstream os;
  os.precision(17);
  os << "trajectory left the domain at step " << step << " (t = " << time
     << ", x = " << x << ")";
  return os.str();
}

void require_path(const WienerPath& path) {
  if (path.steps() < 1 || !(path.dt > 0.0))
    throw std::invalid_argument("Wiener path is empty");
}

}  // namespace

DomainExitError::DomainExitError(Eigen::Index step, double time, double position)
    : std::runtime_error(exit_message(step, time, position)),
      step_(step),
      time_(time),
      position_(position) {}

std::string_view to_string(UnderdampedScheme scheme) {
  switch (scheme) {
    case UnderdampedScheme::explicit_euler:
      return "explicit-euler";
    case UnderdampedScheme::exponential:
      return "exponential";
  }
  return "unknown";
}

UnderdampedScheme parse_scheme(std::string_view name) {
  if (name == "explicit-euler") return UnderdampedScheme::explicit_euler;
  if (name == "exponential") return UnderdampedScheme::exponential;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

Trajectory integrate_underdamped(const DynamicsSpec& spec, double mass,
                                 const WienerPath& path, UnderdampedScheme scheme,
                                 Eigen::Index stride) {
  require_path(path);
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
  if (stride < 1 || path.steps() % stride != 0)
    throw std::invalid_argument("stride must divide the number of steps");

  const double dt = path.dt;
  if (scheme == UnderdampedScheme::explicit_euler &&
      dt > explicit_euler_max_dt(mass, spec.max_friction())) {
    std::ostringstream os;
    os << "explicit-euler needs dt <= m / (10 max gamma) = "
       << explicit_euler_max_dt(mass, spec.max_friction()) << " but dt = " << dt
       << "; use a finer path or the exponential scheme";
    throw StabilityError(os.str());
  }

  const Eigen::Index n_steps = path.steps();
  const Eigen::Index n_out = n_steps / stride + 1;
  Trajectory traj;
  traj.dt = dt * static_cast<double>(stride);
  traj.positions.resize(n_out);
  traj.velocities.emplace(n_out);
  traj.meta = {mass, std::string(to_string(scheme)), path.seed, path.stream};

  const ScalarField& force = spec.force();
  const ScalarField& friction = spec.friction();
  const ScalarField& noise = spec.noise();
  const Interval& domain = spec.domain();
  const double inv_sqrt_dt = 1.0 / std::sqrt(dt);

  double x = spec.x0();
  double v = spec.v0();
  traj.positions[0] = x;
  (*traj.velocities)[0] = v;

  for (Eigen::Index n = 0; n < n_steps; ++n) {
    const double dw = path.increments[n];
    const double f = force(x);
    const double g = friction(x);
    const double s = noise(x);
    double v_next;
    if (scheme == UnderdampedScheme::explicit_euler) {
      v_next = v + ((f - g * v) * dt + s * dw) / mass;
    } else {
      const double k_dt = g * dt / mass;
      const double decay = std::exp(-k_dt);
      const double relax = -std::expm1(-k_dt);
      const double spread = std::sqrt(-std::expm1(-2.0 * k_dt) / (2.0 * mass * g));
      v_next = v * decay + (f / g) * relax + s * spread * dw * inv_sqrt_dt;
    }
    x += v * dt;
    v = v_next;
    if (!domain.contains(x))
      throw DomainExitError(n + 1, dt * static_cast<double>(n + 1), x);
    if ((n + 1) % stride == 0) {
      traj.positions[(n + 1) / stride] = x;
      (*traj.velocities)[(n + 1) / stride] = v;
    }
  }
  return traj;
}

Trajectory integrate_ito(const ScalarField& drift, const ScalarField& diffusion,
                         double x0, const WienerPath& path) {
  require_path(path);
  const Interval domain = drift.domain().intersect(diffusion.domain());
  if (!domain.contains(x0)) throw DomainExitError(0, 0.0, x0);

  const Eigen::Index n_steps = path.steps();
  const double dt = path.dt;
  Trajectory traj;
  traj.dt = dt;
  traj.positions.resize(n_steps + 1);
  traj.meta = {std::nullopt, "euler-maruyama", path.seed, path.stream};

  double x = x0;
  traj.positions[0] = x;
  for (Eigen::Index n = 0; n < n_steps; ++n) {
    x += drift(x) * dt + diffusion(x) * path.increments[n];
    if (!domain.contains(x))
      throw DomainExitError(n + 1, dt * static_cast<double>(n + 1), x);
    traj.positions[n + 1] = x;
  }
  return traj;
}

ScalarField alpha_corrected_drift(const ScalarField& drift, const ScalarField& diffusion,
                                  const ScalarField& alpha) {
  return ScalarField::numeric([drift, diffusion, alpha](double x) {
           return drift(x) + alpha(x) * diffusion(x) * diffusion.deriv(x);
         })
      .restricted(drift.domain().intersect(diffusion.domain()));
}

Trajectory integrate_alpha(const ScalarField& drift, const ScalarField& diffusion,
                           const ScalarField& alpha, double x0, const WienerPath& path,
                           AlphaMode mode) {
  if (mode == AlphaMode::converted) {
    Trajectory traj =
        integrate_ito(alpha_corrected_drift(drift, diffusion, alpha), diffusion, x0, path);
    traj.meta.scheme = "alpha-converted";
    return traj;
  }

  require_path(path);
  const Interval domain = drift.domain().intersect(diffusion.domain());
  if (!domain.contains(x0)) throw DomainExitError(0, 0.0, x0);

  const Eigen::Index n_steps = path.steps();
  const double dt = path.dt;
  Trajectory traj;
  traj.dt = dt;
  traj.positions.resize(n_steps + 1);
  traj.meta = {std::nullopt, "alpha-direct", path.seed, path.stream};

  double x = x0;
  traj.positions[0] = x;
  for (Eigen::Index n = 0; n < n_steps; ++n) {
    const double dw = path.increments[n];
    const double deterministic = drift(x) * dt;
    const double predictor = x + alpha(x) * (deterministic + diffusion(x) * dw);
    const double time = dt * static_cast<double>(n + 1);
    if (!domain.contains(predictor)) throw DomainExitError(n + 1, time, predictor);
    x += deterministic + diffusion(predictor) * dw;
    if (!domain.contains(x)) throw DomainExitError(n + 1, time, x);
    traj.positions[n + 1] = x;
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "# scheme=" << trajectory.meta.scheme << ",mass="
     << (trajectory.meta.mass ? format_double(*trajectory.meta.mass) : std::string("none"))
     << ",seed=" << trajectory.meta.seed << ",stream=" << trajectory.meta.stream
     << ",dt=" << format_double(trajectory.dt) << '\n';
  const bool with_v = trajectory.velocities.has_value();
  os << (with_v ? "n,t,x,v\n" : "n,t,x\n");
  for (Eigen::Index n = 0; n < trajectory.size(); ++n) {
    os << n << ',' << format_double(trajectory.dt * static_cast<double>(n)) << ','
       << format_double(trajectory.positions[n]);
    if (with_v) os << ',' << format_double((*trajectory.velocities)[n]);
    os << '\n';
  }
}

}  // namespace sklimit
