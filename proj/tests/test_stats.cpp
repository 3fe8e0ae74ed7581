#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "sklimit/stats.hpp"

using namespace sklimit;

namespace {

Eigen::VectorXd random_vector(int n, std::uint64_t seed, double shift = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(shift, 1.0);
  Eigen::VectorXd v(n);
  for (double& x : v) x = g(rng);
  return v;
}

/// Empirical CDFs compared at every sample point.
double brute_force_ks(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  auto cdf = [](const Eigen::VectorXd& s, double t) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [t](double x) { return x <= t; })) /
           static_cast<double>(s.size());
  };
  double d = 0.0;
  for (const Eigen::VectorXd* s : {&a, &b})
    for (double t : *s) d = std::max(d, std::abs(cdf(a, t) - cdf(b, t)));
  return d;
}

/// Upper tail of Student's t by Simpson integration of the density on [t, t + 200].
double t_upper_tail(double t, double dof) {
  const double norm = std::tgamma((dof + 1) / 2) /
                      (std::sqrt(dof * std::numbers::pi) * std::tgamma(dof / 2));
  auto pdf = [&](double u) { return norm * std::pow(1 + u * u / dof, -(dof + 1) / 2); };
  const int n = 200'000;
  const double h = 200.0 / n;
  double sum = pdf(t) + pdf(t + 200.0);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * pdf(t + i * h);
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("moments") {
  const Eigen::VectorXd x{{1.0, 2.0, 3.0, 4.0}};
  CHECK(stats::mean(x) == 2.5);
  CHECK(stats::variance(x) == doctest::Approx(5.0 / 3.0));
  CHECK(stats::standard_error(x) == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(stats::variance(Eigen::VectorXd{{3.0}}) == 0.0);
}

TEST_CASE("ks statistic") {
  CHECK(stats::ks_statistic(Eigen::VectorXd{{1.0, 2.0}}, Eigen::VectorXd{{1.0, 2.0}}) == 0.0);
  CHECK(stats::ks_statistic(Eigen::VectorXd{{0.0, 1.0}}, Eigen::VectorXd{{2.0, 3.0}}) == 1.0);
  CHECK(stats::ks_statistic(Eigen::VectorXd{{0.0, 2.0}}, Eigen::VectorXd{{1.0, 3.0}}) == 0.5);
  for (std::uint64_t seed : {1, 2, 3}) {
    const Eigen::VectorXd a = random_vector(137, seed);
    const Eigen::VectorXd b = random_vector(91, seed + 10, 0.3);
    CHECK(stats::ks_statistic(a, b) == doctest::Approx(brute_force_ks(a, b)).epsilon(1e-14));
    CHECK(stats::ks_statistic(a, b) == stats::ks_statistic(b, a));
  }
  // Ties across samples.
  const Eigen::VectorXd a{{1.0, 1.0, 2.0, 3.0}};
  const Eigen::VectorXd b{{1.0, 2.0, 2.0, 2.0}};
  CHECK(stats::ks_statistic(a, b) == doctest::Approx(brute_force_ks(a, b)));
}

TEST_CASE("ranks average ties") {
  const Eigen::VectorXd r = stats::ranks(Eigen::VectorXd{{10.0, 30.0, 20.0, 20.0, 5.0}});
  CHECK(r == Eigen::VectorXd{{2.0, 5.0, 3.5, 3.5, 1.0}});
}

TEST_CASE("spearman") {
  SUBCASE("perfect monotone relations") {
    const Eigen::VectorXd x{{1.0, 2.0, 3.0, 4.0, 5.0}};
    const Eigen::VectorXd y = x.array().exp();
    CHECK(stats::spearman(x, y).rho == doctest::Approx(1.0));
    CHECK(stats::spearman(x, y).p_positive == 0.0);
    CHECK(stats::spearman(x, -y).rho == doctest::Approx(-1.0));
    CHECK(stats::spearman(x, -y).p_positive == 1.0);
  }
  SUBCASE("textbook formula without ties") {
    const Eigen::VectorXd x = random_vector(40, 7);
    const Eigen::VectorXd y = x + 1.5 * random_vector(40, 8);
    const Eigen::VectorXd d = stats::ranks(x) - stats::ranks(y);
    const double n = 40.0;
    const double rho = 1.0 - 6.0 * d.squaredNorm() / (n * (n * n - 1.0));
    const stats::Correlation c = stats::spearman(x, y);
    CHECK(c.rho == doctest::Approx(rho).epsilon(1e-12));
    const double t = rho * std::sqrt((n - 2) / (1 - rho * rho));
    CHECK(c.p_positive == doctest::Approx(t_upper_tail(t, n - 2)).epsilon(1e-6));
  }
  SUBCASE("independent samples rarely look significant") {
    int hits = 0;
    for (std::uint64_t s = 0; s < 200; ++s)
      if (stats::spearman(random_vector(30, 2 * s), random_vector(30, 2 * s + 1)).p_positive < 0.05)
        ++hits;
    CHECK(hits < 25);
  }
  CHECK_THROWS_AS(stats::spearman(Eigen::VectorXd{{1.0, 2.0}}, Eigen::VectorXd{{1.0, 2.0}}),
                  std::invalid_argument);
}
