#include "sklimit/coefficients.hpp"

#include <cmath>
#include <sstream>

namespace sklimit {

namespace {

std::string at_position(const std::string& what, double x) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at x = " << x;
  return os.str();
}

void require_valid_domain(const Interval& domain) {
  if (!domain.bounded() || !(domain.lo < domain.hi))
    throw CoefficientError("domain must be a bounded interval with lo < hi");
}

}  // namespace

void require_on_grid(const ScalarField& f, const Interval& domain,
                     const std::string& name, bool positive) {
  const Eigen::ArrayXd xs = domain.grid(kValidationGridPoints);
  for (double x : xs) {
    const double value = f(x);
    if (!std::isfinite(value))
      throw CoefficientError(at_position(name + " is not finite", x), x);
    if (positive && !(value > 0.0))
      throw CoefficientError(at_position(name + " must be positive", x), x);
  }
}

DynamicsSpec::DynamicsSpec(ScalarField force, ScalarField friction,
                           ScalarField noise, Interval domain, double x0,
                           double v0)
    : force_(force.restricted(domain)),
      friction_(friction.restricted(domain)),
      noise_(noise.restricted(domain)),
      domain_(domain),
      x0_(x0),
      v0_(v0) {
  require_valid_domain(domain_);
  if (!domain_.interior(x0_))
    throw CoefficientError(at_position("initial position must lie inside the domain", x0_),
                           x0_);
  if (!std::isfinite(v0_)) throw CoefficientError("initial velocity is not finite");
  require_on_grid(force_, domain_, "force", false);
  require_on_grid(friction_, domain_, "friction", true);
  require_on_grid(noise_, domain_, "noise", true);
  max_friction_ = friction_(domain_.grid(kValidationGridPoints)).maxCoeff();
}

FrictionNoisePair from_einstein(const ScalarField& diffusivity, double kbt,
                                const Interval& domain) {
  if (!(kbt > 0.0)) throw CoefficientError("kBT must be positive");
  require_valid_domain(domain);
  require_on_grid(diffusivity, domain, "diffusivity", true);

  const bool exact = diffusivity.kind() == DerivativeKind::analytic;
  ScalarField d = diffusivity;
  auto gamma = [d, kbt](double x) { return kbt / d(x); };
  auto sigma = [d, kbt](double x) { return kbt * std::sqrt(2.0 / d(x)); };
  if (!exact)
    return {ScalarField::numeric(gamma).restricted(domain),
            ScalarField::numeric(sigma).restricted(domain)};

  auto dgamma = [d, kbt](double x) {
    const double dx = d(x);
    return -kbt * d.deriv(x) / (dx * dx);
  };
  auto dsigma = [d, kbt](double x) {
    const double dx = d(x);
    return -kbt * std::sqrt(2.0) * d.deriv(x) / (2.0 * dx * std::sqrt(dx));
  };
  return {ScalarField::analytic(gamma, dgamma).restricted(domain),
          ScalarField::analytic(sigma, dsigma).restricted(domain)};
}

ScalarField power_law(const ScalarField& noise, double c, double lambda,
                      const Interval& domain) {
  if (!(c > 0.0)) throw CoefficientError("power-law prefactor must be positive");
  require_valid_domain(domain);
  require_on_grid(noise, domain, "noise", true);

  ScalarField s = noise;
  auto gamma = [s, c, lambda](double x) { return c * std::pow(s(x), lambda); };
  if (s.kind() != DerivativeKind::analytic)
    return ScalarField::numeric(gamma).restricted(domain);
  auto dgamma = [s, c, lambda](double x) {
    return c * lambda * std::pow(s(x), lambda - 1.0) * s.deriv(x);
  };
  return ScalarField::analytic(gamma, dgamma).restricted(domain);
}

}  // namespace sklimit
