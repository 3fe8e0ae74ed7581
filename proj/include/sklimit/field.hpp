#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sklimit {

/// Closed interval [lo, hi]; the default is the whole real line.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x >= lo && x <= hi; }
  bool interior(double x) const { return x > lo && x < hi; }
  bool bounded() const;
  Interval intersect(const Interval& other) const;

  /// n uniformly spaced points including both endpoints. Requires bounded().
  Eigen::ArrayXd grid(Eigen::Index n) const;

  bool operator==(const Interval&) const = default;
};

/// Raised when a field is evaluated outside its declared domain.
class DomainError : public std::out_of_range {
 public:
  DomainError(double x, const Interval& domain);
  double position() const { return x_; }

 private:
  double x_;
};

enum class DerivativeKind { analytic, finite_difference };

/// Central-difference step used for fields without an analytic derivative.
inline double finite_difference_step(double x) {
  return 1e-5 * std::max(1.0, std::abs(x));
}

double central_difference(const std::function<double(double)>& f, double x,
                          double h);

/// A real function of position together with its first derivative.
///
/// Fields are immutable values. Copies share the underlying callables, so a
/// field can be handed to any number of concurrent workers.
class ScalarField {
 public:
  using Function = std::function<double(double)>;

  static ScalarField analytic(Function f, Function df);
  /// Derivative by central difference with `finite_difference_step`.
  static ScalarField numeric(Function f);

  double operator()(double x) const {
    check(x);
    return f_(x);
  }
  double deriv(double x) const {
    check(x);
    return df_ ? df_(x) : central_difference(f_, x, finite_difference_step(x));
  }

  Eigen::ArrayXd operator()(const Eigen::ArrayXd& xs) const;
  Eigen::ArrayXd deriv(const Eigen::ArrayXd& xs) const;

  DerivativeKind kind() const {
    return df_ ? DerivativeKind::analytic : DerivativeKind::finite_difference;
  }
  const Interval& domain() const { return domain_; }

  /// Same function, with evaluation restricted to `domain`.
  ScalarField restricted(const Interval& domain) const;

 private:
  ScalarField(Function f, Function df) : f_(std::move(f)), df_(std::move(df)) {}

  void check(double x) const {
    if (!domain_.contains(x)) throw DomainError(x, domain_);
  }

  Function f_;
  Function df_;
  Interval domain_;
};

/// Builtin coefficient families.
namespace fields {

ScalarField constant(double a);
/// a + b x
ScalarField affine(double a, double b);
/// a + b x + c x^2
ScalarField quadratic(double a, double b, double c);
/// a + b sin(k x)
ScalarField sinusoidal_offset(double a, double b, double k);
/// a exp(b x)
ScalarField exponential(double a, double b);
/// 1 / (a + b x)
ScalarField reciprocal_affine(double a, double b);

}  // namespace fields

}  // namespace sklimit
