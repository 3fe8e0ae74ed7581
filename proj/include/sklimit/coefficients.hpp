#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "sklimit/field.hpp"

namespace sklimit {

/// Invalid coefficient data. Carries the offending position when one exists.
class CoefficientError : public std::invalid_argument {
 public:
  explicit CoefficientError(const std::string& what,
                            std::optional<double> x = std::nullopt)
      : std::invalid_argument(what), x_(x) {}
  std::optional<double> position() const { return x_; }

 private:
  std::optional<double> x_;
};

/// Number of uniform grid points used for positivity and finiteness checks.
inline constexpr Eigen::Index kValidationGridPoints = 1024;

/// Underdamped Langevin problem m dv = (F - gamma v) dt + sigma dW, dx = v dt.
///
/// The force, friction and noise fields are stored restricted to `domain`, so
/// any evaluation outside it raises DomainError.
class DynamicsSpec {
 public:
  DynamicsSpec(ScalarField force, ScalarField friction, ScalarField noise,
               Interval domain, double x0, double v0 = 0.0);

  const ScalarField& force() const { return force_; }
  const ScalarField& friction() const { return friction_; }
  const ScalarField& noise() const { return noise_; }
  const Interval& domain() const { return domain_; }
  double x0() const { return x0_; }
  double v0() const { return v0_; }

  /// Largest friction value on the validation grid.
  double max_friction() const { return max_friction_; }

 private:
  ScalarField force_;
  ScalarField friction_;
  ScalarField noise_;
  Interval domain_;
  double x0_;
  double v0_;
  double max_friction_;
};

struct FrictionNoisePair {
  ScalarField friction;
  ScalarField noise;
};

/// Einstein relation from a diffusivity D(x) at thermal energy kbt:
/// gamma = kbt / D and sigma = kbt sqrt(2) / sqrt(D), so gamma = sigma^2 / (2 kbt).
FrictionNoisePair from_einstein(const ScalarField& diffusivity, double kbt,
                                const Interval& domain);

/// gamma = c sigma^lambda.
ScalarField power_law(const ScalarField& noise, double c, double lambda,
                      const Interval& domain);

/// Throws CoefficientError at the first grid point where `f` is non-finite or,
/// when `positive` is set, not strictly positive.
void require_on_grid(const ScalarField& f, const Interval& domain,
                     const std::string& name, bool positive);

}  // namespace sklimit
