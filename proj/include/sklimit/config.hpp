#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sklimit/coefficients.hpp"
#include "sklimit/experiments.hpp"
#include "sklimit/field.hpp"

namespace sklimit {

/// Invalid configuration; `key()` is "section.key" of the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// A coefficient family with its numeric parameters.
///
///   constant a | affine a b | quadratic a b c | sinusoidal-offset a b k |
///   exponential a b | reciprocal-affine a b | power-of-field c lambda
///   (friction only, gamma = c sigma^lambda) | einstein-from-D (friction and
///   noise together, from problem.diffusivity and problem.kbt)
struct FieldConfig {
  std::string family;
  std::vector<double> params;
  bool operator==(const FieldConfig&) const = default;
};

struct ProblemConfig {
  FieldConfig force{"constant", {0.0}};
  FieldConfig friction;
  FieldConfig noise;
  FieldConfig diffusivity;
  double kbt = 1.0;
  Interval domain{0.0, 0.0};
  double x0 = 0.0;
  double v0 = 0.0;
  bool operator==(const ProblemConfig&) const = default;
};

struct RunSection {
  double t_final = 1.0;
  std::int64_t n_steps = 1'000'000;
  std::vector<double> masses;
  std::int64_t n_samples = 100;
  std::uint64_t master_seed = 0;
  std::string scheme = "exponential";
  bool operator==(const RunSection&) const = default;
};

struct CandidatesSection {
  /// nullopt stands for "auto" (alpha from alpha_of_x).
  std::vector<std::optional<double>> alphas;
  bool operator==(const CandidatesSection&) const = default;
};

struct OutputSection {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
  bool dump_trajectories = false;
  bool operator==(const OutputSection&) const = default;
};

struct RunConfig {
  ProblemConfig problem;
  RunSection run;
  CandidatesSection candidates;
  OutputSection output;
  bool operator==(const RunConfig&) const = default;
};

/// Parses the INI text. Unknown sections or keys are rejected.
RunConfig parse_config(std::istream& is);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config_text(to_text(c)) == c.
std::string to_text(const RunConfig& config);

/// FNV-1a 64 of the canonical text.
std::uint64_t config_hash(const RunConfig& config);

ScalarField make_field(const FieldConfig& field, const std::string& key);
DynamicsSpec build_spec(const ProblemConfig& problem);
std::vector<Candidate> build_candidates(const RunConfig& config, const DynamicsSpec& spec);
SweepConfig sweep_config(const RunConfig& config, unsigned threads);

/// Names accepted by preset_config.
std::vector<std::string> preset_names();
RunConfig preset_config(const std::string& name);

}  // namespace sklimit
