#include "sklimit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace sklimit::stats {

double mean(const Eigen::Ref<const Eigen::VectorXd>& xs) {
  if (xs.size() == 0) throw std::invalid_argument("mean of an empty sample");
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double variance(const Eigen::Ref<const Eigen::VectorXd>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

double standard_error(const Eigen::Ref<const Eigen::VectorXd>& xs) {
  if (xs.size() == 0) return 0.0;
  return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

double ks_statistic(Eigen::VectorXd a, Eigen::VectorXd b) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("KS of an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  Eigen::Index i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

Eigen::VectorXd ranks(const Eigen::Ref<const Eigen::VectorXd>& xs) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(xs.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) { return xs[l] < xs[r]; });
  Eigen::VectorXd out(xs.size());
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t end = k + 1;
    while (end < order.size() && xs[order[end]] == xs[order[k]]) ++end;
    const double avg = 0.5 * static_cast<double>(k + 1 + end);
    for (std::size_t q = k; q < end; ++q) out[order[q]] = avg;
    k = end;
  }
  return out;
}

Correlation spearman(const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("spearman needs two equal samples of size >= 3");
  const Eigen::VectorXd rx = ranks(x);
  const Eigen::VectorXd ry = ranks(y);
  const Eigen::VectorXd cx = rx.array() - rx.mean();
  const Eigen::VectorXd cy = ry.array() - ry.mean();
  const double denom = std::sqrt(cx.squaredNorm() * cy.squaredNorm());
  Correlation out;
  out.rho = denom > 0.0 ? cx.dot(cy) / denom : 0.0;
  const double dof = static_cast<double>(x.size() - 2);
  if (std::abs(out.rho) >= 1.0) {
    out.p_positive = out.rho > 0.0 ? 0.0 : 1.0;
    return out;
  }
  const double t = out.rho * std::sqrt(dof / (1.0 - out.rho * out.rho));
  const boost::math::students_t dist(dof);
  out.p_positive = boost::math::cdf(boost::math::complement(dist, t));
  return out;
}

}  // namespace sklimit::stats
