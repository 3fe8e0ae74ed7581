#include "sklimit/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sklimit {

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

Interval Interval::intersect(const Interval& other) const {
  return {std::max(lo, other.lo), std::min(hi, other.hi)};
}

Eigen::ArrayXd Interval::grid(Eigen::Index n) const {
  if (!bounded()) throw std::invalid_argument("grid over an unbounded interval");
  return Eigen::ArrayXd::LinSpaced(n, lo, hi);
}

namespace {
std::string domain_message(double x, const Interval& d) {
  std::ostringstream os;
  os.precision(17);
  os << "position " << x << " outside domain [" << d.lo << ", " << d.hi << "]";
  return os.str();
}
}  // namespace

DomainError::DomainError(double x, const Interval& domain)
    : std::out_of_range(domain_message(x, domain)), x_(x) {}

double central_difference(const std::function<double(double)>& f, double x,
                          double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

ScalarField ScalarField::analytic(Function f, Function df) {
  return ScalarField(std::move(f), std::move(df));
}

ScalarField ScalarField::numeric(Function f) { return ScalarField(std::move(f), {}); }

Eigen::ArrayXd ScalarField::operator()(const Eigen::ArrayXd& xs) const {
  return xs.unaryExpr([this](double x) { return (*this)(x); });
}

Eigen::ArrayXd ScalarField::deriv(const Eigen::ArrayXd& xs) const {
  return xs.unaryExpr([this](double x) { return deriv(x); });
}

ScalarField ScalarField::restricted(const Interval& domain) const {
  ScalarField out = *this;
  out.domain_ = domain;
  return out;
}

namespace fields {

ScalarField constant(double a) {
  return ScalarField::analytic([a](double) { return a; }, [](double) { return 0.0; });
}

ScalarField affine(double a, double b) {
  return ScalarField::analytic([a, b](double x) { return a + b * x; },
                               [b](double) { return b; });
}

ScalarField quadratic(double a, double b, double c) {
  return ScalarField::analytic([a, b, c](double x) { return a + (b + c * x) * x; },
                               [b, c](double x) { return b + 2.0 * c * x; });
}

ScalarField sinusoidal_offset(double a, double b, double k) {
  return ScalarField::analytic([a, b, k](double x) { return a + b * std::sin(k * x); },
                               [b, k](double x) { return b * k * std::cos(k * x); });
}

ScalarField exponential(double a, double b) {
  return ScalarField::analytic([a, b](double x) { return a * std::exp(b * x); },
                               [a, b](double x) { return a * b * std::exp(b * x); });
}

ScalarField reciprocal_affine(double a, double b) {
  return ScalarField::analytic([a, b](double x) { return 1.0 / (a + b * x); },
                               [a, b](double x) {
                                 const double d = a + b * x;
                                 return -b / (d * d);
                               });
}

}  // namespace fields
}  // namespace sklimit
