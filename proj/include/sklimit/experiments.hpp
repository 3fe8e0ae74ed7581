#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sklimit/coefficients.hpp"
#include "sklimit/field.hpp"
#include "sklimit/integrators.hpp"
#include "sklimit/stats.hpp"

namespace sklimit {

/// An overdamped Itô SDE dx = drift dt + diffusion dW compared against the
/// underdamped dynamics.
struct Candidate {
  std::string label;
  ScalarField drift;
  ScalarField diffusion;
};

/// Raised when an experiment cannot produce a report (too many excluded
/// samples, broken path coupling).
class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  /// Strictly decreasing.
  std::vector<double> masses;
  double t_final = 1.0;
  Eigen::Index n_fine = 1'000'000;
  Eigen::Index n_samples = 100;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
  UnderdampedScheme scheme = UnderdampedScheme::exponential;
  /// Number of steps on the comparison grid the coarse factor aims for.
  Eigen::Index target_coarse_steps = 1000;
  double max_excluded_fraction = 0.1;
  /// Keep the trajectories of the first retained sample in the report.
  bool keep_first_sample = false;
};

struct PathwiseStats {
  /// sup_t |x^m_t - x^cand_t| on the comparison grid, one entry per retained sample.
  Eigen::VectorXd sup_errors;
  double mean_sup = 0.0;
  double max_sup = 0.0;
  /// Fraction of retained samples where this candidate has the strictly
  /// smallest sup error among all candidates.
  double win_fraction = 0.0;
};

struct WeakStats {
  /// |mean x^m(T) - mean x^cand(T)|
  double terminal_weak = 0.0;
  /// sqrt(se_m^2 + se_cand^2)
  double standard_error = 0.0;
  /// Two-sample KS statistic between the terminal ensembles.
  double ks = 0.0;
};

struct EnsembleMoments {
  double mean = 0.0;
  double variance = 0.0;
};

struct Trend {
  /// Mean sup error decreases strictly along the mass grid.
  bool strictly_decreasing = false;
  /// Spearman correlation between mass and per-sample sup error, pooled over
  /// all retained samples and masses.
  stats::Correlation pooled;
};

struct LabelledTrajectory {
  std::string label;
  Trajectory trajectory;
};

struct ConvergenceReport {
  std::vector<double> masses;
  std::vector<std::string> candidates;
  double t_final = 0.0;
  double fine_dt = 0.0;
  double coarse_dt = 0.0;
  Eigen::Index coarse_factor = 1;
  std::uint64_t master_seed = 0;
  Eigen::Index n_requested = 0;
  /// Sample indices that were retained and excluded.
  std::vector<Eigen::Index> retained;
  std::vector<Eigen::Index> excluded;
  /// W(T) of each retained sample; identical on the fine and coarse grid.
  Eigen::VectorXd path_checksums;

  /// Indexed [mass][candidate].
  std::vector<std::vector<PathwiseStats>> pathwise;
  std::vector<std::vector<WeakStats>> weak;
  /// Terminal moments of the underdamped ensemble per mass and of each
  /// candidate ensemble.
  std::vector<EnsembleMoments> underdamped_terminal;
  std::vector<EnsembleMoments> candidate_terminal;
  /// Indexed per candidate.
  std::vector<Trend> trends;

  /// Best candidate at the smallest mass for each metric.
  std::string winner_pathwise;
  std::string winner_weak;
  std::string winner_ks;

  std::vector<LabelledTrajectory> sample_trajectories;

  std::size_t candidate_index(const std::string& label) const;
};

/// Divisor of n_fine closest to n_fine / target_coarse_steps.
Eigen::Index choose_coarse_factor(Eigen::Index n_fine, Eigen::Index target_coarse_steps);

/// Runs `work(i)` for i in [0, n) on up to `threads` workers. An exception
/// from the smallest failing index is rethrown after all workers finish.
void parallel_for(Eigen::Index n, unsigned threads,
                  const std::function<void(Eigen::Index)>& work);

/// Label "alpha=<value>" used for constant-alpha candidates.
std::string alpha_label(double alpha);

/// Candidate dx = [F/gamma + alpha q q'] dt + q dW with q = sigma / gamma.
Candidate alpha_candidate(const DynamicsSpec& spec, double alpha);
/// Same with alpha(x) from alpha_of_x; labelled "alpha=auto".
Candidate auto_alpha_candidate(const DynamicsSpec& spec);

/// Shared-path comparison of the underdamped dynamics at each mass against
/// every candidate. Sample i is driven by sample_path(t_final, n_fine,
/// master_seed, i); candidates run on its coarsening, which is also the
/// comparison grid.
ConvergenceReport mass_sweep(const DynamicsSpec& spec, std::span<const Candidate> candidates,
                             const SweepConfig& config);

/// Candidates "limit" (singular_sk_drift) and "naive" (F / (c sigma)), both
/// with diffusion 1 / c.
std::vector<Candidate> singular_candidates(const DynamicsSpec& spec, double c);

ConvergenceReport singular_case_experiment(const DynamicsSpec& spec, double c,
                                           const SweepConfig& config);

struct OuCheckResult {
  double empirical_variance = 0.0;
  double expected_variance = 0.0;
  /// |empirical - expected| / expected, or |empirical| when expected is 0.
  double relative_error = 0.0;
};

/// Euler-Maruyama for du = -gamma0 u dt + sigma0 dW from u0 = 1 on
/// `n_paths` independent paths. The first 10% of each path is burn-in; the
/// variance is pooled over the remaining time points of all paths.
OuCheckResult ou_stationary_check(double gamma0, double sigma0, double t_final, double dt,
                                  std::uint64_t seed, Eigen::Index n_paths = 256);

}  // namespace sklimit
