#pragma once

#include <Eigen/Dense>

namespace sklimit::stats {

double mean(const Eigen::Ref<const Eigen::VectorXd>& xs);
/// Unbiased sample variance; 0 for fewer than two samples.
double variance(const Eigen::Ref<const Eigen::VectorXd>& xs);
double standard_error(const Eigen::Ref<const Eigen::VectorXd>& xs);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(Eigen::VectorXd a, Eigen::VectorXd b);

/// Ranks starting at 1, ties get their average rank.
Eigen::VectorXd ranks(const Eigen::Ref<const Eigen::VectorXd>& xs);

struct Correlation {
  double rho = 0.0;
  /// One-sided p-value for rho > 0 from the Student t approximation with
  /// n - 2 degrees of freedom; 0 at rho = 1 and 1 at rho = -1.
  double p_positive = 1.0;
};

Correlation spearman(const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& y);

}  // namespace sklimit::stats
