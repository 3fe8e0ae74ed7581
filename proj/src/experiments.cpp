#include "sklimit/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "format.hpp"
#include "sklimit/limits.hpp"
#include "sklimit/noise.hpp"

namespace sklimit {

namespace {

struct SampleResult {
  bool excluded = false;
  /// [mass, candidate]
  Eigen::MatrixXd sup;
  Eigen::VectorXd terminal_mass;
  Eigen::VectorXd terminal_candidate;
  double checksum = 0.0;
  std::vector<LabelledTrajectory> trajectories;
};

void validate(const SweepConfig& config, std::span<const Candidate> candidates) {
  if (config.masses.empty()) throw std::invalid_argument("masses must not be empty");
  for (std::size_t i = 0; i < config.masses.size(); ++i) {
    if (!(config.masses[i] > 0.0)) throw std::invalid_argument("masses must be positive");
    if (i > 0 && !(config.masses[i] < config.masses[i - 1]))
      throw std::invalid_argument("masses must be strictly decreasing");
  }
  if (candidates.empty()) throw std::invalid_argument("at least one candidate is required");
  if (!(config.t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
  if (config.n_fine < 1) throw std::invalid_argument("n_fine must be positive");
  if (config.n_samples < 1) throw std::invalid_argument("n_samples must be positive");
}

double sup_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

std::size_t ConvergenceReport::candidate_index(const std::string& label) const {
  const auto it = std::find(candidates.begin(), candidates.end(), label);
  if (it == candidates.end()) throw std::out_of_range("no candidate labelled " + label);
  return static_cast<std::size_t>(it - candidates.begin());
}

Eigen::Index choose_coarse_factor(Eigen::Index n_fine, Eigen::Index target_coarse_steps) {
  const double ideal = static_cast<double>(n_fine) /
                       static_cast<double>(std::max<Eigen::Index>(1, target_coarse_steps));
  Eigen::Index best = 1;
  double best_gap = std::abs(ideal - 1.0);
  for (Eigen::Index d = 1; d * d <= n_fine; ++d) {
    if (n_fine % d != 0) continue;
    for (Eigen::Index f : {d, n_fine / d}) {
      const double gap = std::abs(ideal - static_cast<double>(f));
      if (gap < best_gap || (gap == best_gap && f < best)) {
        best = f;
        best_gap = gap;
      }
    }
  }
  return best;
}

void parallel_for(Eigen::Index n, unsigned threads,
                  const std::function<void(Eigen::Index)>& work) {
  const unsigned workers =
      static_cast<unsigned>(std::clamp<Eigen::Index>(threads == 0 ? 1 : threads, 1, std::max<Eigen::Index>(n, 1)));
  std::atomic<Eigen::Index> next{0};
  std::mutex error_mutex;
  Eigen::Index error_index = std::numeric_limits<Eigen::Index>::max();
  std::exception_ptr error;

  auto loop = [&] {
    for (Eigen::Index i = next++; i < n; i = next++) {
      try {
        work(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };

  if (workers == 1) {
    loop();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop);
  }
  if (error) std::rethrow_exception(error);
}

std::string alpha_label(double alpha) { return "alpha=" + format_double(alpha); }

Candidate alpha_candidate(const DynamicsSpec& spec, double alpha) {
  return {alpha_label(alpha), ito_drift_from_alpha(spec, fields::constant(alpha)),
          sk_diffusion(spec)};
}

Candidate auto_alpha_candidate(const DynamicsSpec& spec) {
  for (double x : spec.domain().grid(kValidationGridPoints)) (void)alpha_of_x(spec, x);
  return {"alpha=auto", ito_drift_from_alpha(spec, alpha_field(spec)), sk_diffusion(spec)};
}

ConvergenceReport mass_sweep(const DynamicsSpec& spec, std::span<const Candidate> candidates,
                             const SweepConfig& config) {
  validate(config, candidates);

  const auto n_mass = static_cast<Eigen::Index>(config.masses.size());
  const auto n_cand = static_cast<Eigen::Index>(candidates.size());
  const Eigen::Index factor = choose_coarse_factor(config.n_fine, config.target_coarse_steps);

  std::vector<SampleResult> results(static_cast<std::size_t>(config.n_samples));

  parallel_for(config.n_samples, config.threads, [&](Eigen::Index i) {
    SampleResult& out = results[static_cast<std::size_t>(i)];
    const WienerPath fine = sample_path(config.t_final, config.n_fine, config.master_seed,
                                        static_cast<std::uint64_t>(i));
    const WienerPath coarse = coarsen(fine, factor);
    const double fine_total = fine.total();
    const double coarse_total = coarse.total();
    if (std::abs(fine_total - coarse_total) >
        1e-12 * std::max(1.0, fine.increments.cwiseAbs().sum()))
      throw ExperimentError("coarse path does not match its fine path in sample " +
                            std::to_string(i));
    out.checksum = coarse_total;

    const bool keep = config.keep_first_sample;
    try {
      std::vector<Trajectory> cand_traj;
      cand_traj.reserve(candidates.size());
      for (const Candidate& c : candidates)
        cand_traj.push_back(integrate_ito(c.drift, c.diffusion, spec.x0(), coarse));

      out.sup.resize(n_mass, n_cand);
      out.terminal_mass.resize(n_mass);
      out.terminal_candidate.resize(n_cand);
      for (Eigen::Index c = 0; c < n_cand; ++c)
        out.terminal_candidate[c] = cand_traj[static_cast<std::size_t>(c)].terminal();

      for (Eigen::Index k = 0; k < n_mass; ++k) {
        Trajectory under = integrate_underdamped(spec, config.masses[static_cast<std::size_t>(k)],
                                                 fine, config.scheme, factor);
        out.terminal_mass[k] = under.terminal();
        for (Eigen::Index c = 0; c < n_cand; ++c)
          out.sup(k, c) = sup_distance(under.positions,
                                       cand_traj[static_cast<std::size_t>(c)].positions);
        if (keep)
          out.trajectories.push_back(
              {"m=" + format_double(config.masses[static_cast<std::size_t>(k)]),
               std::move(under)});
      }
      if (keep)
        for (Eigen::Index c = 0; c < n_cand; ++c)
          out.trajectories.push_back({candidates[static_cast<std::size_t>(c)].label,
                                      std::move(cand_traj[static_cast<std::size_t>(c)])});
    } catch (const DomainExitError&) {
      out = SampleResult{};
      out.excluded = true;
    }
  });

  ConvergenceReport report;
  report.masses = config.masses;
  for (const Candidate& c : candidates) report.candidates.push_back(c.label);
  report.t_final = config.t_final;
  report.fine_dt = config.t_final / static_cast<double>(config.n_fine);
  report.coarse_dt = report.fine_dt * static_cast<double>(factor);
  report.coarse_factor = factor;
  report.master_seed = config.master_seed;
  report.n_requested = config.n_samples;

  for (Eigen::Index i = 0; i < config.n_samples; ++i)
    (results[static_cast<std::size_t>(i)].excluded ? report.excluded : report.retained)
        .push_back(i);

  const double excluded_fraction =
      static_cast<double>(report.excluded.size()) / static_cast<double>(config.n_samples);
  if (excluded_fraction > config.max_excluded_fraction || report.retained.empty()) {
    std::ostringstream os;
    os << report.excluded.size() << " of " << config.n_samples
       << " samples left the domain (limit " << config.max_excluded_fraction * 100.0 << "%)";
    throw ExperimentError(os.str());
  }

  const auto n_used = static_cast<Eigen::Index>(report.retained.size());
  report.path_checksums.resize(n_used);
  Eigen::MatrixXd terminal_mass(n_used, n_mass);
  Eigen::MatrixXd terminal_cand(n_used, n_cand);
  std::vector<Eigen::MatrixXd> sup_by_mass(static_cast<std::size_t>(n_mass),
                                           Eigen::MatrixXd(n_used, n_cand));
  for (Eigen::Index s = 0; s < n_used; ++s) {
    const SampleResult& r = results[static_cast<std::size_t>(report.retained[static_cast<std::size_t>(s)])];
    report.path_checksums[s] = r.checksum;
    terminal_mass.row(s) = r.terminal_mass.transpose();
    terminal_cand.row(s) = r.terminal_candidate.transpose();
    for (Eigen::Index k = 0; k < n_mass; ++k)
      sup_by_mass[static_cast<std::size_t>(k)].row(s) = r.sup.row(k);
  }
  if (config.keep_first_sample)
    report.sample_trajectories =
        std::move(results[static_cast<std::size_t>(report.retained.front())].trajectories);

  for (Eigen::Index c = 0; c < n_cand; ++c)
    report.candidate_terminal.push_back(
        {stats::mean(terminal_cand.col(c)), stats::variance(terminal_cand.col(c))});

  for (Eigen::Index k = 0; k < n_mass; ++k) {
    const Eigen::MatrixXd& sup = sup_by_mass[static_cast<std::size_t>(k)];
    const Eigen::VectorXd under = terminal_mass.col(k);
    report.underdamped_terminal.push_back({stats::mean(under), stats::variance(under)});

    std::vector<PathwiseStats> path_row;
    std::vector<WeakStats> weak_row;
    for (Eigen::Index c = 0; c < n_cand; ++c) {
      PathwiseStats p;
      p.sup_errors = sup.col(c);
      p.mean_sup = stats::mean(p.sup_errors);
      p.max_sup = p.sup_errors.maxCoeff();
      Eigen::Index wins = 0;
      for (Eigen::Index s = 0; s < n_used; ++s) {
        bool best = true;
        for (Eigen::Index o = 0; o < n_cand; ++o)
          if (o != c && !(sup(s, c) < sup(s, o))) best = false;
        if (best) ++wins;
      }
      p.win_fraction = static_cast<double>(wins) / static_cast<double>(n_used);
      path_row.push_back(std::move(p));

      const Eigen::VectorXd cand = terminal_cand.col(c);
      WeakStats w;
      w.terminal_weak = std::abs(stats::mean(under) - stats::mean(cand));
      w.standard_error = std::hypot(stats::standard_error(under), stats::standard_error(cand));
      w.ks = stats::ks_statistic(under, cand);
      weak_row.push_back(w);
    }
    report.pathwise.push_back(std::move(path_row));
    report.weak.push_back(std::move(weak_row));
  }

  for (Eigen::Index c = 0; c < n_cand; ++c) {
    Trend t;
    t.strictly_decreasing = true;
    for (Eigen::Index k = 1; k < n_mass; ++k)
      if (!(report.pathwise[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)].mean_sup <
            report.pathwise[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(c)].mean_sup))
        t.strictly_decreasing = false;
    if (n_mass >= 2 && n_mass * n_used >= 3) {
      Eigen::VectorXd mass(n_mass * n_used), err(n_mass * n_used);
      for (Eigen::Index k = 0; k < n_mass; ++k) {
        mass.segment(k * n_used, n_used).setConstant(config.masses[static_cast<std::size_t>(k)]);
        err.segment(k * n_used, n_used) = sup_by_mass[static_cast<std::size_t>(k)].col(c);
      }
      t.pooled = stats::spearman(mass, err);
    }
    report.trends.push_back(t);
  }

  const auto& last_path = report.pathwise.back();
  const auto& last_weak = report.weak.back();
  auto argmin = [&](auto metric) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < report.candidates.size(); ++c)
      if (metric(c) < metric(best)) best = c;
    return report.candidates[best];
  };
  report.winner_pathwise = argmin([&](std::size_t c) { return last_path[c].mean_sup; });
  report.winner_weak = argmin([&](std::size_t c) { return last_weak[c].terminal_weak; });
  report.winner_ks = argmin([&](std::size_t c) { return last_weak[c].ks; });
  return report;
}

std::vector<Candidate> singular_candidates(const DynamicsSpec& spec, double c) {
  SingularLimit limit = singular_sk_drift(spec, c);
  const ScalarField diffusion = fields::constant(limit.diffusion).restricted(spec.domain());
  const ScalarField force = spec.force();
  const ScalarField sigma = spec.noise();
  ScalarField naive =
      ScalarField::numeric([force, sigma, c](double x) { return force(x) / (c * sigma(x)); })
          .restricted(spec.domain());
  return {{"limit", std::move(limit.drift), diffusion}, {"naive", std::move(naive), diffusion}};
}

ConvergenceReport singular_case_experiment(const DynamicsSpec& spec, double c,
                                           const SweepConfig& config) {
  const std::vector<Candidate> candidates = singular_candidates(spec, c);
  return mass_sweep(spec, candidates, config);
}

OuCheckResult ou_stationary_check(double gamma0, double sigma0, double t_final, double dt,
                                  std::uint64_t seed, Eigen::Index n_paths) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be positive");
  if (!(sigma0 >= 0.0)) throw std::invalid_argument("sigma0 must be non-negative");
  if (!(dt > 0.0) || !(dt < t_final)) throw std::invalid_argument("dt must lie in (0, t_final)");
  if (t_final * gamma0 < 50.0)
    throw std::invalid_argument("t_final * gamma0 must be at least 50 relaxation times");
  if (n_paths < 1) throw std::invalid_argument("n_paths must be positive");

  const auto n_steps = static_cast<Eigen::Index>(std::llround(t_final / dt));
  const Eigen::Index burn_in = n_steps / 10;
  double sum = 0.0;
  double sum_sq = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index p = 0; p < n_paths; ++p) {
    const WienerPath path = sample_path(t_final, n_steps, seed, static_cast<std::uint64_t>(p));
    double u = 1.0;
    for (Eigen::Index n = 0; n < n_steps; ++n) {
      u += -gamma0 * u * path.dt + sigma0 * path.increments[n];
      if (n + 1 > burn_in) {
        sum += u;
        sum_sq += u * u;
        ++count;
      }
    }
  }
  const double m = sum / static_cast<double>(count);
  OuCheckResult out;
  out.empirical_variance = sum_sq / static_cast<double>(count) - m * m;
  out.expected_variance = ou_stationary_variance(gamma0, sigma0);
  const double diff = std::abs(out.empirical_variance - out.expected_variance);
  out.relative_error = out.expected_variance > 0.0 ? diff / out.expected_variance : diff;
  return out;
}

}  // namespace sklimit
