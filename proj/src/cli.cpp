#include "sklimit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <thread>

#include "CLI11.hpp"
#include "format.hpp"
#include "sklimit/config.hpp"
#include "sklimit/experiments.hpp"
#include "sklimit/integrators.hpp"
#include "sklimit/limits.hpp"
#include "sklimit/noise.hpp"
#include "sklimit/report_io.hpp"

namespace sklimit {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;
  std::string preset;
};

/// Failure that maps to a specific exit code.
struct CliFailure {
  int code;
  std::string message;
};

unsigned resolve_threads(const Options& opt) {
  if (opt.threads) return std::max(1u, *opt.threads);
  if (const char* env = std::getenv("SK_LIMIT_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw CliFailure{kExitValidation, "SK_LIMIT_THREADS must be a positive integer"};
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunConfig load(const Options& opt) {
  if (opt.config_path.empty()) throw CliFailure{kExitValidation, "--config is required"};
  RunConfig config = load_config(opt.config_path);
  if (opt.seed) config.run.master_seed = *opt.seed;
  if (opt.out_dir) config.output.directory = *opt.out_dir;
  return config;
}

/// Output directory plus the list of files written, for the manifest.
class OutputDir {
 public:
  OutputDir(const RunConfig& config, std::string command)
      : config_(config), command_(std::move(command)), root_(config.output.directory) {
    fs::create_directories(root_);
  }

  std::ofstream open(const std::string& relative) {
    const fs::path p = root_ / relative;
    fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw CliFailure{kExitNumerical, "cannot write " + p.string()};
    files_.push_back(relative);
    return os;
  }

  void write_manifest() {
    nlohmann::json m;
    m["command"] = command_;
    m["config_hash"] = hex_hash(config_hash(config_));
    m["master_seed"] = config_.run.master_seed;
    m["files"] = files_;
    m["config"] = to_text(config_);
    std::ofstream os(root_ / "manifest.json", std::ios::binary);
    os << m.dump(2) << '\n';
  }

  const fs::path& root() const { return root_; }

 private:
  const RunConfig& config_;
  std::string command_;
  fs::path root_;
  std::vector<std::string> files_;
};

std::string file_label(std::string label) {
  std::replace(label.begin(), label.end(), '=', '_');
  return label;
}

void write_coefficients(OutputDir& dir, const DynamicsSpec& spec) {
  auto os = dir.open("coefficients.csv");
  os << "x,force,friction,noise\n";
  for (double x : spec.domain().grid(401))
    os << format_double(x) << ',' << format_double(spec.force()(x)) << ','
       << format_double(spec.friction()(x)) << ',' << format_double(spec.noise()(x)) << '\n';
}

void write_report(OutputDir& dir, const RunConfig& config, const ConvergenceReport& report) {
  if (config.output.json) dir.open("report.json") << to_json(report).dump(2) << '\n';
  if (config.output.csv) {
    auto os = dir.open("report.csv");
    write_report_csv(os, report);
  }
  for (const LabelledTrajectory& t : report.sample_trajectories) {
    auto os = dir.open("trajectories/" + file_label(t.label) + ".csv");
    write_trajectory_csv(os, t.trajectory);
  }
}

void print_summary(std::ostream& out, const ConvergenceReport& report) {
  out << "samples: " << report.retained.size() << " retained, " << report.excluded.size()
      << " excluded\n";
  const std::size_t last = report.masses.size() - 1;
  for (std::size_t c = 0; c < report.candidates.size(); ++c)
    out << report.candidates[c] << ": mean sup error " << report.pathwise[last][c].mean_sup
        << " at m = " << report.masses[last] << ", win fraction "
        << report.pathwise[last][c].win_fraction << '\n';
  out << "winner (pathwise): " << report.winner_pathwise << '\n'
      << "winner (terminal weak): " << report.winner_weak << '\n'
      << "winner (ks): " << report.winner_ks << '\n';
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const RunConfig config = load(opt);
  const DynamicsSpec spec = build_spec(config.problem);
  const std::vector<Candidate> candidates = build_candidates(config, spec);
  const UnderdampedScheme scheme = parse_scheme(config.run.scheme);
  const Eigen::Index factor = choose_coarse_factor(config.run.n_steps, 1000);

  const WienerPath fine =
      sample_path(config.run.t_final, config.run.n_steps, config.run.master_seed, 0);
  const WienerPath coarse = coarsen(fine, factor);

  OutputDir dir(config, "simulate");
  write_coefficients(dir, spec);
  if (config.output.dump_trajectories) {
    auto os = dir.open("wiener_path.csv");
    write_path_csv(os, coarse);
  }
  for (double m : config.run.masses) {
    const Trajectory t = integrate_underdamped(spec, m, fine, scheme, factor);
    auto os = dir.open("trajectories/m_" + format_double(m) + ".csv");
    write_trajectory_csv(os, t);
  }
  for (const Candidate& c : candidates) {
    const Trajectory t = integrate_ito(c.drift, c.diffusion, spec.x0(), coarse);
    auto os = dir.open("trajectories/" + file_label(c.label) + ".csv");
    write_trajectory_csv(os, t);
  }
  dir.write_manifest();
  out << "wrote trajectories to " << dir.root().string() << '\n';
  return kExitOk;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  const RunConfig config = load(opt);
  const DynamicsSpec spec = build_spec(config.problem);
  const std::vector<Candidate> candidates = build_candidates(config, spec);
  if (candidates.empty())
    throw ConfigError("candidates.alphas", "sweep needs at least one candidate");
  const ConvergenceReport report =
      mass_sweep(spec, candidates, sweep_config(config, resolve_threads(opt)));
  OutputDir dir(config, "sweep");
  write_coefficients(dir, spec);
  write_report(dir, config, report);
  dir.write_manifest();
  print_summary(out, report);
  return kExitOk;
}

int cmd_singular(const Options& opt, std::ostream& out) {
  const RunConfig config = load(opt);
  const DynamicsSpec spec = build_spec(config.problem);
  const double c = proportionality_constant(spec);
  const ConvergenceReport report =
      singular_case_experiment(spec, c, sweep_config(config, resolve_threads(opt)));
  OutputDir dir(config, "singular");
  write_coefficients(dir, spec);
  write_report(dir, config, report);
  dir.write_manifest();
  out << "proportionality constant c = " << c << ", limiting diffusion 1/c = " << 1.0 / c
      << '\n';
  print_summary(out, report);
  return kExitOk;
}

int cmd_alpha(const Options& opt, std::ostream& out) {
  const RunConfig config = load(opt);
  const DynamicsSpec spec = build_spec(config.problem);
  const Eigen::ArrayXd xs = spec.domain().grid(201);
  Eigen::ArrayXd alphas(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) alphas[i] = alpha_of_x(spec, xs[i]);

  OutputDir dir(config, "alpha");
  {
    auto os = dir.open("alpha.csv");
    os << "x,alpha\n";
    for (Eigen::Index i = 0; i < xs.size(); ++i)
      os << format_double(xs[i]) << ',' << format_double(alphas[i]) << '\n';
  }
  if (config.problem.friction.family == "power-of-field") {
    const double lambda = config.problem.friction.params[1];
    out << "power law: lambda = " << format_double(lambda)
        << ", alpha = " << format_double(alpha_of_lambda(lambda)) << '\n';
  } else if (config.problem.friction.family == "einstein-from-D") {
    out << "einstein relation: lambda = 2, alpha = " << format_double(alpha_of_lambda(2.0))
        << '\n';
  }
  out << "alpha range: [" << format_double(alphas.minCoeff()) << ", "
      << format_double(alphas.maxCoeff()) << "]\n";
  dir.write_manifest();
  return kExitOk;
}

int cmd_check(const Options& opt, std::ostream& out) {
  const RunConfig config = load(opt);
  const DynamicsSpec spec = build_spec(config.problem);
  nlohmann::json results = nlohmann::json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, double value, double tolerance) {
    out << (pass ? "PASS " : "FAIL ") << name << " value=" << value
        << " tolerance=" << tolerance << '\n';
    results.push_back({{"check", name}, {"pass", pass}, {"value", value}, {"tolerance", tolerance}});
    all_pass = all_pass && pass;
  };

  std::mt19937_64 rng(config.run.master_seed);
  std::uniform_real_distribution<double> uniform(spec.domain().lo, spec.domain().hi);
  const ScalarField limit = sk_drift(spec);
  bool singular = false;
  try {
    for (double x : spec.domain().grid(kValidationGridPoints)) (void)alpha_of_x(spec, x);
  } catch (const SingularProportionalCase&) {
    singular = true;
  }

  double worst = 0.0;
  if (!singular) {
    const ScalarField via_alpha = ito_drift_from_alpha(spec, alpha_field(spec));
    for (int i = 0; i < 1000; ++i) {
      const double x = uniform(rng);
      const double g = spec.friction()(x);
      const double s = spec.noise()(x);
      const double scale = std::abs(spec.force()(x) / g) +
                           std::abs(s * s * spec.friction().deriv(x) / (2 * g * g * g));
      worst = std::max(worst, std::abs(via_alpha(x) - limit(x)) / std::max(scale, 1e-300));
    }
    record("drift-identity", worst <= 1e-10, worst, 1e-10);
  } else {
    const SingularLimit sl = singular_sk_drift(spec, proportionality_constant(spec));
    for (int i = 0; i < 1000; ++i) {
      const double x = uniform(rng);
      const double a = sl.drift(x);
      const double b = limit(x);
      worst = std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}));
    }
    record("singular-drift-identity", worst <= 1e-10, worst, 1e-10);
  }

  for (auto [g, s] : {std::pair{1.0, 1.0}, std::pair{2.0, 2.0}, std::pair{0.5, 1.0}}) {
    const OuCheckResult r = ou_stationary_check(g, s, 100.0, 1e-3, config.run.master_seed);
    record("ou-variance gamma=" + format_double(g) + " sigma=" + format_double(s),
           r.relative_error <= 0.05, r.relative_error, 0.05);
  }

  OutputDir dir(config, "check");
  dir.open("check.json") << results.dump(2) << '\n';
  dir.write_manifest();
  return all_pass ? kExitOk : kExitNumerical;
}

int cmd_preset(const Options& opt, std::ostream& out) {
  out << to_text(preset_config(opt.preset));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-mass (Smoluchowski-Kramers) limit of Langevin dynamics", "sk-limit"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "configuration file")->required();
    sub->add_option("--seed", opt.seed, "override run.master_seed");
    sub->add_option("--threads", opt.threads, "worker threads (default SK_LIMIT_THREADS)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out_dir, "override output.directory");
  };

  auto* simulate = app.add_subcommand("simulate", "integrate one shared-path sample");
  auto* sweep = app.add_subcommand("sweep", "mass sweep against alpha candidates");
  auto* singular = app.add_subcommand("singular", "mass sweep for gamma = c sigma");
  auto* alpha = app.add_subcommand("alpha", "tabulate alpha(x) over the domain");
  auto* check = app.add_subcommand("check", "drift identity and OU variance checks");
  auto* preset = app.add_subcommand("preset", "print a preset configuration");
  for (auto* sub : {simulate, sweep, singular, alpha, check}) add_common(sub);
  preset->add_option("name", opt.preset, "preset name")
      ->required()
      ->check(CLI::IsMember(preset_names()));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opt, out);
    if (sweep->parsed()) return cmd_sweep(opt, out);
    if (singular->parsed()) return cmd_singular(opt, out);
    if (alpha->parsed()) return cmd_alpha(opt, out);
    if (check->parsed()) return cmd_check(opt, out);
    if (preset->parsed()) return cmd_preset(opt, out);
  } catch (const CliFailure& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const CoefficientError& e) {
    err << "invalid coefficients: " << e.what() << '\n';
    return kExitValidation;
  } catch (const StabilityError& e) {
    err << "invalid step size: " << e.what() << '\n';
    return kExitValidation;
  } catch (const SingularProportionalCase& e) {
    err << "singular case: " << e.what() << " (run the singular subcommand)\n";
    return kExitNumerical;
  } catch (const ProportionalityError& e) {
    err << "singular experiment: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainExitError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ExperimentError& e) {
    err << "experiment failed: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitValidation;
}

}  // namespace sklimit
