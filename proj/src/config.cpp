#include "sklimit/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "format.hpp"
#include "sklimit/limits.hpp"

namespace sklimit {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"problem",
       {"force", "force_params", "friction", "friction_params", "noise", "noise_params",
        "diffusivity", "diffusivity_params", "kbt", "domain", "x0", "v0"}},
      {"run", {"t_final", "n_steps", "masses", "n_samples", "master_seed", "scheme"}},
      {"candidates", {"alphas"}},
      {"output", {"directory", "formats", "dump_trajectories"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  if (trim(value).empty()) return out;
  std::string_view rest(value);
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& key) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError(key, "expected a number, got '" + text + "'");
  return value;
}

template <typename Int>
Int parse_integer(const std::string& text, const std::string& key) {
  Int value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  return value;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) out.push_back(parse_double(item, key));
  return out;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

std::size_t expected_params(const std::string& family, const std::string& key) {
  static const std::map<std::string, std::size_t> arity = {
      {"constant", 1},       {"affine", 2},         {"quadratic", 3},
      {"sinusoidal-offset", 3}, {"exponential", 2}, {"reciprocal-affine", 2},
      {"power-of-field", 2}, {"einstein-from-D", 0}};
  const auto it = arity.find(family);
  if (it == arity.end()) throw ConfigError(key, "unknown coefficient family '" + family + "'");
  return it->second;
}

void check_field(const FieldConfig& field, const std::string& key) {
  if (field.family.empty()) throw ConfigError(key, "missing coefficient family");
  const std::size_t n = expected_params(field.family, key);
  if (field.params.size() != n)
    throw ConfigError(key + "_params", "family '" + field.family + "' takes " +
                                           std::to_string(n) + " parameters, got " +
                                           std::to_string(field.params.size()));
}

void validate(const RunConfig& c) {
  const ProblemConfig& p = c.problem;
  check_field(p.force, "problem.force");
  check_field(p.friction, "problem.friction");
  check_field(p.noise, "problem.noise");
  if (p.force.family == "power-of-field" || p.force.family == "einstein-from-D")
    throw ConfigError("problem.force", "family '" + p.force.family + "' is not a force");
  if (p.noise.family == "power-of-field")
    throw ConfigError("problem.noise", "power-of-field applies to friction only");
  const bool einstein_friction = p.friction.family == "einstein-from-D";
  const bool einstein_noise = p.noise.family == "einstein-from-D";
  if (einstein_friction != einstein_noise)
    throw ConfigError("problem.noise",
                      "einstein-from-D must be used for both friction and noise");
  if (einstein_friction) {
    check_field(p.diffusivity, "problem.diffusivity");
    if (p.diffusivity.family == "power-of-field" || p.diffusivity.family == "einstein-from-D")
      throw ConfigError("problem.diffusivity", "invalid diffusivity family");
    if (!(p.kbt > 0.0)) throw ConfigError("problem.kbt", "kbt must be positive");
  } else if (!p.diffusivity.family.empty()) {
    throw ConfigError("problem.diffusivity", "only used with einstein-from-D");
  }
  if (!p.domain.bounded() || !(p.domain.lo < p.domain.hi))
    throw ConfigError("problem.domain", "domain must be two finite numbers lo < hi");
  if (!p.domain.interior(p.x0)) throw ConfigError("problem.x0", "x0 must lie inside the domain");

  const RunSection& r = c.run;
  if (!(r.t_final > 0.0)) throw ConfigError("run.t_final", "t_final must be positive");
  if (r.n_steps < 1) throw ConfigError("run.n_steps", "n_steps must be positive");
  if (r.n_samples < 1) throw ConfigError("run.n_samples", "n_samples must be positive");
  if (r.masses.empty()) throw ConfigError("run.masses", "at least one mass is required");
  for (std::size_t i = 0; i < r.masses.size(); ++i) {
    if (!(r.masses[i] > 0.0)) throw ConfigError("run.masses", "masses must be positive");
    if (i > 0 && !(r.masses[i] < r.masses[i - 1]))
      throw ConfigError("run.masses", "masses must be strictly decreasing");
  }
  if (r.scheme != "exponential" && r.scheme != "explicit-euler")
    throw ConfigError("run.scheme", "scheme must be exponential or explicit-euler");
  if (c.output.directory.empty())
    throw ConfigError("output.directory", "output directory must not be empty");
}

FieldConfig read_field(const pt::ptree& section, const std::string& name) {
  FieldConfig f;
  f.family = section.get<std::string>(name, "");
  f.params = parse_doubles(section.get<std::string>(name + "_params", ""),
                           "problem." + name + "_params");
  return f;
}

void write_field(std::ostream& os, const FieldConfig& field, const std::string& name) {
  if (field.family.empty()) return;
  os << name << " = " << field.family << '\n';
  if (!field.params.empty()) os << name << "_params = " << join(field.params) << '\n';
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}

RunConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  for (const auto& [section, body] : tree) {
    const auto allowed = allowed_keys().find(section);
    if (allowed == allowed_keys().end()) throw ConfigError(section, "unknown section");
    for (const auto& entry : body)
      if (!allowed->second.contains(entry.first))
        throw ConfigError(section + "." + entry.first, "unknown key");
  }

  RunConfig c;
  const pt::ptree empty;
  const auto section = [&](const std::string& name) -> const pt::ptree& {
    const auto it = tree.find(name);
    return it == tree.not_found() ? empty : it->second;
  };

  const pt::ptree& problem = section("problem");
  if (problem.count("force")) {
    c.problem.force = read_field(problem, "force");
  } else if (problem.count("force_params")) {
    throw ConfigError("problem.force_params", "given without problem.force");
  }
  c.problem.friction = read_field(problem, "friction");
  c.problem.noise = read_field(problem, "noise");
  c.problem.diffusivity = read_field(problem, "diffusivity");
  if (auto v = problem.get_optional<std::string>("kbt"))
    c.problem.kbt = parse_double(*v, "problem.kbt");
  if (auto v = problem.get_optional<std::string>("domain")) {
    const std::vector<double> d = parse_doubles(*v, "problem.domain");
    if (d.size() != 2) throw ConfigError("problem.domain", "expected two numbers lo, hi");
    c.problem.domain = {d[0], d[1]};
  }
  if (auto v = problem.get_optional<std::string>("x0"))
    c.problem.x0 = parse_double(*v, "problem.x0");
  if (auto v = problem.get_optional<std::string>("v0"))
    c.problem.v0 = parse_double(*v, "problem.v0");

  const pt::ptree& run = section("run");
  if (auto v = run.get_optional<std::string>("t_final"))
    c.run.t_final = parse_double(*v, "run.t_final");
  if (auto v = run.get_optional<std::string>("n_steps"))
    c.run.n_steps = parse_integer<std::int64_t>(*v, "run.n_steps");
  if (auto v = run.get_optional<std::string>("masses"))
    c.run.masses = parse_doubles(*v, "run.masses");
  if (auto v = run.get_optional<std::string>("n_samples"))
    c.run.n_samples = parse_integer<std::int64_t>(*v, "run.n_samples");
  if (auto v = run.get_optional<std::string>("master_seed"))
    c.run.master_seed = parse_integer<std::uint64_t>(*v, "run.master_seed");
  if (auto v = run.get_optional<std::string>("scheme")) c.run.scheme = *v;

  const pt::ptree& candidates = section("candidates");
  if (auto v = candidates.get_optional<std::string>("alphas")) {
    for (const std::string& item : split_list(*v)) {
      if (item == "auto")
        c.candidates.alphas.emplace_back(std::nullopt);
      else
        c.candidates.alphas.emplace_back(parse_double(item, "candidates.alphas"));
    }
  }

  const pt::ptree& output = section("output");
  if (auto v = output.get_optional<std::string>("directory")) c.output.directory = *v;
  if (auto v = output.get_optional<std::string>("formats")) {
    c.output.csv = false;
    c.output.json = false;
    for (const std::string& item : split_list(*v)) {
      if (item == "csv")
        c.output.csv = true;
      else if (item == "json")
        c.output.json = true;
      else
        throw ConfigError("output.formats", "unknown format '" + item + "'");
    }
  }
  if (auto v = output.get_optional<std::string>("dump_trajectories"))
    c.output.dump_trajectories = parse_bool(*v, "output.dump_trajectories");

  validate(c);
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot open '" + path + "'");
  return parse_config(is);
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  os << "[problem]\n";
  write_field(os, c.problem.force, "force");
  write_field(os, c.problem.friction, "friction");
  write_field(os, c.problem.noise, "noise");
  write_field(os, c.problem.diffusivity, "diffusivity");
  os << "kbt = " << format_double(c.problem.kbt) << '\n'
     << "domain = " << format_double(c.problem.domain.lo) << ", "
     << format_double(c.problem.domain.hi) << '\n'
     << "x0 = " << format_double(c.problem.x0) << '\n'
     << "v0 = " << format_double(c.problem.v0) << '\n';

  os << "\n[run]\n"
     << "t_final = " << format_double(c.run.t_final) << '\n'
     << "n_steps = " << c.run.n_steps << '\n'
     << "masses = " << join(c.run.masses) << '\n'
     << "n_samples = " << c.run.n_samples << '\n'
     << "master_seed = " << c.run.master_seed << '\n'
     << "scheme = " << c.run.scheme << '\n';

  os << "\n[candidates]\nalphas = ";
  for (std::size_t i = 0; i < c.candidates.alphas.size(); ++i) {
    if (i > 0) os << ", ";
    const auto& a = c.candidates.alphas[i];
    os << (a ? format_double(*a) : std::string("auto"));
  }
  os << '\n';

  os << "\n[output]\n"
     << "directory = " << c.output.directory << '\n'
     << "formats = ";
  std::vector<std::string> formats;
  if (c.output.csv) formats.emplace_back("csv");
  if (c.output.json) formats.emplace_back("json");
  for (std::size_t i = 0; i < formats.size(); ++i) os << (i > 0 ? ", " : "") << formats[i];
  os << '\n' << "dump_trajectories = " << (c.output.dump_trajectories ? "true" : "false") << '\n';
  return os.str();
}

std::uint64_t config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : to_text(config)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

ScalarField make_field(const FieldConfig& field, const std::string& key) {
  const auto& p = field.params;
  check_field(field, key);
  if (field.family == "constant") return fields::constant(p[0]);
  if (field.family == "affine") return fields::affine(p[0], p[1]);
  if (field.family == "quadratic") return fields::quadratic(p[0], p[1], p[2]);
  if (field.family == "sinusoidal-offset") return fields::sinusoidal_offset(p[0], p[1], p[2]);
  if (field.family == "exponential") return fields::exponential(p[0], p[1]);
  if (field.family == "reciprocal-affine") return fields::reciprocal_affine(p[0], p[1]);
  throw ConfigError(key, "family '" + field.family + "' cannot be built on its own");
}

DynamicsSpec build_spec(const ProblemConfig& p) {
  const ScalarField force = make_field(p.force, "problem.force");
  if (p.friction.family == "einstein-from-D") {
    const ScalarField d = make_field(p.diffusivity, "problem.diffusivity");
    FrictionNoisePair pair = from_einstein(d, p.kbt, p.domain);
    return DynamicsSpec(force, pair.friction, pair.noise, p.domain, p.x0, p.v0);
  }
  const ScalarField noise = make_field(p.noise, "problem.noise");
  ScalarField friction = p.friction.family == "power-of-field"
                             ? power_law(noise, p.friction.params[0], p.friction.params[1],
                                         p.domain)
                             : make_field(p.friction, "problem.friction");
  return DynamicsSpec(force, friction, noise, p.domain, p.x0, p.v0);
}

std::vector<Candidate> build_candidates(const RunConfig& config, const DynamicsSpec& spec) {
  std::vector<Candidate> out;
  for (const auto& a : config.candidates.alphas)
    out.push_back(a ? alpha_candidate(spec, *a) : auto_alpha_candidate(spec));
  return out;
}

SweepConfig sweep_config(const RunConfig& config, unsigned threads) {
  SweepConfig s;
  s.masses = config.run.masses;
  s.t_final = config.run.t_final;
  s.n_fine = config.run.n_steps;
  s.n_samples = config.run.n_samples;
  s.master_seed = config.run.master_seed;
  s.threads = threads;
  s.scheme = parse_scheme(config.run.scheme);
  s.keep_first_sample = config.output.dump_trajectories;
  return s;
}

std::vector<std::string> preset_names() {
  return {"fig1", "fig1-harmonic", "fig2-constant-friction", "fig4-alpha2", "fig5-singular"};
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.run.t_final = 1.0;
  c.run.n_steps = 1'000'000;
  c.run.masses = {1e-1, 1e-2, 1e-3, 1e-4};
  c.run.n_samples = 100;
  c.run.master_seed = 20130101;
  c.problem.force = {"constant", {0.0}};
  c.problem.x0 = 0.0;
  c.problem.v0 = 0.0;
  c.output.directory = "out/" + name;

  if (name == "fig1" || name == "fig1-harmonic") {
    if (name == "fig1-harmonic") c.problem.force = {"affine", {0.0, -1.0}};
    c.problem.friction = {"einstein-from-D", {}};
    c.problem.noise = {"einstein-from-D", {}};
    c.problem.diffusivity = {"reciprocal-affine", {1.0, 0.01}};
    c.problem.kbt = 1.0;
    c.problem.domain = {-50.0, 200.0};
    c.candidates.alphas = {1.0, 0.0};
  } else if (name == "fig2-constant-friction") {
    c.problem.friction = {"constant", {1.0}};
    c.problem.noise = {"quadratic", {1.0, 0.0, 0.1}};
    c.problem.domain = {-6.0, 6.0};
    c.candidates.alphas = {0.0, 1.0};
  } else if (name == "fig4-alpha2") {
    c.problem.friction = {"power-of-field", {1.0, 4.0 / 3.0}};
    c.problem.noise = {"sinusoidal-offset", {2.0, 1.0, 1.0}};
    c.problem.domain = {-6.0, 6.0};
    c.candidates.alphas = {0.0, 1.0, 2.0};
  } else if (name == "fig5-singular") {
    c.problem.friction = {"power-of-field", {1.0, 1.0}};
    c.problem.noise = {"sinusoidal-offset", {2.0, 1.0, 1.0}};
    c.problem.domain = {-6.0, 6.0};
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "'");
  }
  validate(c);
  return c;
}

}  // namespace sklimit
