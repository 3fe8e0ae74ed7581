#include "sklimit/limits.hpp"

#include <cmath>
#include <sstream>

namespace sklimit {

namespace {

std::string deviation_message(double dev, double x) {
  std::ostringstream os;
  os.precision(6);
  os << "friction is not proportional to noise: max relative deviation " << dev
     << " at x = " << x;
  return os.str();
}

double alpha_at(const DynamicsSpec& spec, double x, bool& degenerate) {
  const double drift_part = spec.friction().deriv(x) * spec.noise()(x);
  const double noise_part = spec.friction()(x) * spec.noise().deriv(x);
  const double scale = std::abs(drift_part) + std::abs(noise_part);
  degenerate = scale == 0.0;
  if (degenerate) return 0.0;
  const double denom = drift_part - noise_part;
  if (std::abs(denom) <= kAlphaSingularTolerance * scale) {
    std::ostringstream os;
    os.precision(17);
    os << "gamma is locally proportional to sigma at x = " << x
       << "; alpha is undefined, use the singular limit";
    throw SingularProportionalCase(os.str());
  }
  if (drift_part == 0.0) return 0.0;  // avoid -0 when gamma' = 0
  return drift_part / (2.0 * denom);
}

}  // namespace

ProportionalityError::ProportionalityError(double max_deviation, double x)
    : std::invalid_argument(deviation_message(max_deviation, x)),
      max_deviation_(max_deviation),
      x_(x) {}

ScalarField sk_diffusion(const DynamicsSpec& spec) {
  const ScalarField gamma = spec.friction();
  const ScalarField sigma = spec.noise();
  return ScalarField::analytic(
             [gamma, sigma](double x) { return sigma(x) / gamma(x); },
             [gamma, sigma](double x) {
               const double g = gamma(x);
               return (sigma.deriv(x) * g - sigma(x) * gamma.deriv(x)) / (g * g);
             })
      .restricted(spec.domain());
}

ScalarField sk_drift(const DynamicsSpec& spec) {
  const ScalarField force = spec.force();
  const ScalarField gamma = spec.friction();
  const ScalarField sigma = spec.noise();
  return ScalarField::numeric([force, gamma, sigma](double x) {
           const double g = gamma(x);
           const double s = sigma(x);
           return force(x) / g - s * s * gamma.deriv(x) / (2.0 * g * g * g);
         })
      .restricted(spec.domain());
}

ScalarField ito_drift_from_alpha(const DynamicsSpec& spec, const ScalarField& alpha) {
  const ScalarField force = spec.force();
  const ScalarField gamma = spec.friction();
  const ScalarField ratio = sk_diffusion(spec);
  return ScalarField::numeric([force, gamma, ratio, alpha](double x) {
           return force(x) / gamma(x) + alpha(x) * ratio(x) * ratio.deriv(x);
         })
      .restricted(spec.domain());
}

double alpha_of_x(const DynamicsSpec& spec, double x) {
  bool degenerate = false;
  const double alpha = alpha_at(spec, x, degenerate);
  if (!degenerate) return alpha;

  // Removable 0/0: average the neighbours that lie inside the domain.
  const double h = finite_difference_step(x);
  double sum = 0.0;
  int used = 0;
  bool neighbour_degenerate = false;
  for (double y : {x - h, x + h}) {
    if (!spec.domain().contains(y)) continue;
    bool d = false;
    sum += alpha_at(spec, y, d);
    neighbour_degenerate = neighbour_degenerate || d;
    ++used;
  }
  if (neighbour_degenerate || used == 0) {
    std::ostringstream os;
    os.precision(17);
    os << "gamma and sigma are both locally constant near x = " << x
       << "; alpha is undefined, use the singular limit";
    throw SingularProportionalCase(os.str());
  }
  return sum / used;
}

ScalarField alpha_field(const DynamicsSpec& spec) {
  return ScalarField::numeric([spec](double x) { return alpha_of_x(spec, x); })
      .restricted(spec.domain());
}

double alpha_of_lambda(double lambda) {
  if (std::abs(lambda - 1.0) <= 1e-12)
    throw SingularProportionalCase("lambda = 1 makes gamma proportional to sigma");
  return lambda / (2.0 * (lambda - 1.0));
}

SingularLimit singular_sk_drift(const DynamicsSpec& spec, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("proportionality constant must be positive");

  double worst = 0.0;
  double worst_x = spec.domain().lo;
  for (double x : spec.domain().grid(kValidationGridPoints)) {
    const double target = c * spec.noise()(x);
    const double dev = std::abs(spec.friction()(x) - target) / target;
    if (dev > worst) {
      worst = dev;
      worst_x = x;
    }
  }
  if (!(worst < kProportionalityTolerance)) throw ProportionalityError(worst, worst_x);

  const ScalarField force = spec.force();
  const ScalarField sigma = spec.noise();
  ScalarField drift = ScalarField::numeric([force, sigma, c](double x) {
                        const double s = sigma(x);
                        return force(x) / (c * s) - sigma.deriv(x) / (2.0 * c * c * s);
                      }).restricted(spec.domain());
  return {std::move(drift), 1.0 / c};
}

double proportionality_constant(const DynamicsSpec& spec) {
  return spec.friction()(spec.x0()) / spec.noise()(spec.x0());
}

double ou_stationary_variance(double gamma0, double sigma0) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be positive");
  if (!(sigma0 >= 0.0)) throw std::invalid_argument("sigma0 must be non-negative");
  return sigma0 * sigma0 / (2.0 * gamma0);
}

}  // namespace sklimit
