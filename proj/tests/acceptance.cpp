// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sklimit/cli.hpp"
#include "sklimit/coefficients.hpp"
#include "sklimit/config.hpp"
#include "sklimit/experiments.hpp"
#include "sklimit/integrators.hpp"
#include "sklimit/limits.hpp"
#include "sklimit/noise.hpp"

using namespace sklimit;
namespace fs = std::filesystem;

namespace {

constexpr double kDriftIdentityTolerance = 1e-10;
constexpr double kAlphaTableTolerance = 1e-12;
constexpr double kTrendPValue = 0.01;
constexpr double kWinFraction = 0.8;
constexpr double kWeakSigmas = 3.0;
constexpr double kOuTolerance = 0.05;
constexpr double kHalvingLo = 1.7;
constexpr double kHalvingHi = 2.3;
constexpr double kEmOrderLo = 0.35;
constexpr double kEmOrderHi = 0.65;

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
  bool pass;
  std::string detail;
};

const ScalarField kZero = fields::constant(0.0);

Outcome drift_identity() {
  const Interval d{-6.0, 6.0};
  const ScalarField sigma = fields::sinusoidal_offset(2.0, 1.0, 1.0);
  std::vector<std::pair<std::string, DynamicsSpec>> specs;
  {
    const Interval e{-50.0, 200.0};
    const auto pair = from_einstein(fields::reciprocal_affine(1.0, 0.01), 1.0, e);
    specs.emplace_back("einstein", DynamicsSpec(kZero, pair.friction, pair.noise, e, 0.0));
  }
  for (double lambda : {0.0, 4.0 / 3.0, 2.0, 3.0})
    specs.emplace_back("power-law", DynamicsSpec(fields::affine(0.2, -0.5),
                                                 power_law(sigma, 1.0, lambda, d), sigma, d, 0.0));
  specs.emplace_back("independent",
                     DynamicsSpec(fields::affine(0.3, -0.5), fields::exponential(1.0, 0.25),
                                  fields::quadratic(1.0, 0.2, 0.1), d, 0.0));

  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (const auto& [name, spec] : specs) {
    const ScalarField lhs = ito_drift_from_alpha(spec, alpha_field(spec));
    const ScalarField rhs = sk_drift(spec);
    std::uniform_real_distribution<double> u(spec.domain().lo, spec.domain().hi);
    for (int i = 0; i < 1000; ++i) {
      const double x = u(rng);
      worst = std::max(worst, std::abs(lhs(x) - rhs(x)) / std::abs(rhs(x)));
    }
  }
  std::ostringstream os;
  os << specs.size() << " specs x 1000 points, max relative deviation " << worst;
  return {worst <= kDriftIdentityTolerance, os.str()};
}

Outcome alpha_table() {
  bool pass = std::abs(alpha_of_lambda(0.0)) <= kAlphaTableTolerance &&
              std::abs(alpha_of_lambda(2.0) - 1.0) <= kAlphaTableTolerance &&
              std::abs(alpha_of_lambda(4.0 / 3.0) - 2.0) <= kAlphaTableTolerance;
  double worst = 0.0;
  for (int i = -400; i <= 400; ++i) {
    const double lambda = 0.0125 * i;
    if (i == 80) continue;  // lambda = 1
    const double expected = 1.0 / (2.0 * std::abs(lambda - 1.0));
    worst = std::max(worst, std::abs(std::abs(alpha_of_lambda(lambda) - 0.5) - expected) / expected);
  }
  pass = pass && worst <= kAlphaTableTolerance;
  bool singular = false;
  try {
    alpha_of_lambda(1.0);
  } catch (const SingularProportionalCase&) {
    singular = true;
  }
  std::ostringstream os;
  os << "exact values ok=" << pass << ", lambda-grid max relative deviation " << worst
     << ", lambda=1 singular=" << singular;
  return {pass && singular, os.str()};
}

/// Criteria 3 to 5: the expected candidate's mean sup error decreases with the
/// mass and it has the smallest sup error in at least 80% of samples at the
/// smallest mass.
Outcome preset_winner(const std::string& preset, const std::string& expected) {
  const RunConfig config = preset_config(preset);
  const DynamicsSpec spec = build_spec(config.problem);
  const std::vector<Candidate> candidates = build_candidates(config, spec);
  const ConvergenceReport r = mass_sweep(spec, candidates, sweep_config(config, threads()));
  const std::size_t c = r.candidate_index(expected);
  const Trend& t = r.trends[c];
  const double wins = r.pathwise.back()[c].win_fraction;
  std::ostringstream os;
  os << expected << " mean sup error";
  for (std::size_t k = 0; k < r.masses.size(); ++k) os << (k ? " > " : " ") << r.pathwise[k][c].mean_sup;
  os << ", strictly decreasing=" << t.strictly_decreasing << ", spearman rho=" << t.pooled.rho
     << " p=" << t.pooled.p_positive << ", win fraction at m=" << r.masses.back() << " " << wins
     << ", excluded " << r.excluded.size();
  const bool pass = t.strictly_decreasing && t.pooled.p_positive < kTrendPValue && wins >= kWinFraction;
  return {pass, os.str()};
}

Outcome singular_case() {
  RunConfig config = preset_config("fig5-singular");
  config.run.masses = {1e-3};
  config.run.n_samples = 10'000;
  config.run.n_steps = 100'000;
  const DynamicsSpec spec = build_spec(config.problem);
  const ConvergenceReport r =
      singular_case_experiment(spec, proportionality_constant(spec), sweep_config(config, threads()));
  const WeakStats& limit = r.weak[0][r.candidate_index("limit")];
  const WeakStats& naive = r.weak[0][r.candidate_index("naive")];
  const bool pass = naive.terminal_weak > kWeakSigmas * naive.standard_error &&
                    limit.terminal_weak <= kWeakSigmas * limit.standard_error && naive.ks > limit.ks;
  std::ostringstream os;
  os << "naive |dmean|=" << naive.terminal_weak << " (" << naive.terminal_weak / naive.standard_error
     << " se), limit |dmean|=" << limit.terminal_weak << " ("
     << limit.terminal_weak / limit.standard_error << " se), ks naive=" << naive.ks
     << " limit=" << limit.ks << ", " << r.retained.size() << " samples";
  return {pass, os.str()};
}

Outcome ou_variance() {
  bool pass = true;
  std::ostringstream os;
  for (auto [g, s] : {std::pair{1.0, 1.0}, std::pair{2.0, 2.0}, std::pair{0.5, 1.0}}) {
    const OuCheckResult r = ou_stationary_check(g, s, 100.0, 1e-3, 20130101);
    pass = pass && r.relative_error <= kOuTolerance;
    os << "(" << g << "," << s << "): " << r.empirical_variance << " vs " << r.expected_variance
       << " rel " << r.relative_error << "; ";
  }
  return {pass, os.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "sk_limit_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  RunConfig config = preset_config("fig1");
  config.run.n_steps = 100'000;
  config.run.n_samples = 40;
  const fs::path cfg = root / "config.ini";
  std::ofstream(cfg) << to_text(config);

  std::vector<std::string> reports;
  std::ostringstream sink;
  bool ok = true;
  for (const char* t : {"1", "4"}) {
    const fs::path out = root / (std::string("threads_") + t);
    ok = ok && run_cli({"sweep", "--config", cfg.string(), "--threads", t, "--out", out.string()},
                       sink, sink) == kExitOk;
    reports.push_back(slurp(out / "report.csv"));
  }
  fs::remove_all(root);
  const bool same = ok && !reports[0].empty() && reports[0] == reports[1];
  return {same, "report.csv " + std::to_string(reports[0].size()) + " bytes, identical=" +
                    std::to_string(reports[0] == reports[1])};
}

/// Least-squares slope of log(err) against log(dt).
double fitted_order(const std::vector<double>& dts, const std::vector<double>& errs) {
  const auto n = static_cast<double>(dts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double lx = std::log(dts[i]), ly = std::log(errs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome self_convergence() {
  // Underdamped: runs at dt, dt/2 and dt/4 share one path and are compared on the dt grid.
  const DynamicsSpec spec = build_spec(preset_config("fig1").problem);
  constexpr Eigen::Index kCoarse = 10'000;
  constexpr int kSamples = 32;
  double d1 = 0.0, d2 = 0.0;
  for (int s = 0; s < kSamples; ++s) {
    const WienerPath fine = sample_path(1.0, 4 * kCoarse, 7, static_cast<std::uint64_t>(s));
    const auto x4 = integrate_underdamped(spec, 1e-2, fine, UnderdampedScheme::exponential, 4);
    const auto x2 = integrate_underdamped(spec, 1e-2, coarsen(fine, 2), UnderdampedScheme::exponential, 2);
    const auto x1 = integrate_underdamped(spec, 1e-2, coarsen(fine, 4), UnderdampedScheme::exponential);
    d1 += (x1.positions - x2.positions).cwiseAbs().maxCoeff();
    d2 += (x2.positions - x4.positions).cwiseAbs().maxCoeff();
  }
  const double ratio = d1 / d2;

  // Euler-Maruyama on dx = x dW against exp(W - t/2).
  std::vector<double> dts, errs;
  constexpr int kPaths = 1000;
  for (Eigen::Index f : {64, 32, 16, 8, 4}) {
    double err = 0.0, dt = 0.0;
    for (int i = 0; i < kPaths; ++i) {
      const WienerPath fine = sample_path(1.0, 1 << 12, 11, static_cast<std::uint64_t>(i));
      const WienerPath p = coarsen(fine, f);
      dt = p.dt;
      err += std::abs(integrate_ito(kZero, fields::affine(0.0, 1.0), 1.0, p).terminal() -
                      std::exp(fine.total() - 0.5));
    }
    dts.push_back(dt);
    errs.push_back(err / kPaths);
  }
  const double order = fitted_order(dts, errs);
  std::ostringstream os;
  os << "underdamped halving ratio " << ratio << ", euler-maruyama strong order " << order;
  return {ratio >= kHalvingLo && ratio <= kHalvingHi && order >= kEmOrderLo && order <= kEmOrderHi,
          os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 drift identity", drift_identity},
      {"2 alpha(lambda) table", alpha_table},
      {"3 einstein case, alpha=1 wins", [] { return preset_winner("fig1", "alpha=1"); }},
      {"4 constant friction, alpha=0 wins",
       [] { return preset_winner("fig2-constant-friction", "alpha=0"); }},
      {"5 lambda=4/3, alpha=2 wins", [] { return preset_winner("fig4-alpha2", "alpha=2"); }},
      {"6 singular case", singular_case},
      {"7 OU stationary variance", ou_variance},
      {"8 thread determinism", determinism},
      {"9 integrator self-convergence", self_convergence},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << secs << " s]"
              << std::endl;
    if (!o.pass) ++failures;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
