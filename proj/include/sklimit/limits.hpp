#pragma once

#include <stdexcept>
#include <string>

#include "sklimit/coefficients.hpp"
#include "sklimit/field.hpp"

namespace sklimit {

/// gamma proportional to sigma (lambda = 1): no alpha reproduces the limit.
/// Use singular_sk_drift instead.
class SingularProportionalCase : public std::domain_error {
 public:
  explicit SingularProportionalCase(const std::string& what) : std::domain_error(what) {}
};

/// gamma = c sigma does not hold on the domain.
class ProportionalityError : public std::invalid_argument {
 public:
  ProportionalityError(double max_deviation, double x);
  double max_deviation() const { return max_deviation_; }
  double position() const { return x_; }

 private:
  double max_deviation_;
  double x_;
};

/// Relative tolerance on gamma' sigma - gamma sigma' below which alpha(x) is singular.
inline constexpr double kAlphaSingularTolerance = 1e-9;
/// Maximum relative deviation from gamma = c sigma accepted by singular_sk_drift.
inline constexpr double kProportionalityTolerance = 1e-8;

/// Effective diffusion sigma / gamma of the zero-mass limit, with its
/// derivative from the quotient rule.
ScalarField sk_diffusion(const DynamicsSpec& spec);

/// Itô drift of the zero-mass limit: F / gamma - sigma^2 gamma' / (2 gamma^3).
ScalarField sk_drift(const DynamicsSpec& spec);

/// F / gamma + alpha (sigma / gamma) (sigma / gamma)'.
ScalarField ito_drift_from_alpha(const DynamicsSpec& spec, const ScalarField& alpha);

/// gamma' sigma / (2 (gamma' sigma - gamma sigma')).
///
/// Where gamma' = sigma' = 0 exactly the ratio is 0/0; the value is then the
/// mean of the two neighbours at +-finite_difference_step(x).
/// Throws SingularProportionalCase when the denominator vanishes otherwise.
double alpha_of_x(const DynamicsSpec& spec, double x);

/// alpha_of_x as a field over the spec's domain.
ScalarField alpha_field(const DynamicsSpec& spec);

/// lambda / (2 (lambda - 1)) for gamma = c sigma^lambda.
double alpha_of_lambda(double lambda);

struct SingularLimit {
  /// F / (c sigma) - sigma' / (2 c^2 sigma)
  ScalarField drift;
  /// 1 / c
  double diffusion;
};

SingularLimit singular_sk_drift(const DynamicsSpec& spec, double c);

/// gamma / sigma at x0; the candidate constant for singular_sk_drift.
double proportionality_constant(const DynamicsSpec& spec);

/// Variance sigma0^2 / (2 gamma0) of the density proportional to
/// exp(-gamma0 u^2 / sigma0^2).
double ou_stationary_variance(double gamma0, double sigma0);

}  // namespace sklimit
