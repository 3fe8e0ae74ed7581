#include "sklimit/report_io.hpp"

#include <cstdio>
#include <ostream>

#include "format.hpp"

namespace sklimit {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

nlohmann::json to_json(const ConvergenceReport& r) {
  using nlohmann::json;
  json j;
  j["masses"] = r.masses;
  j["candidates"] = r.candidates;
  j["t_final"] = r.t_final;
  j["fine_dt"] = r.fine_dt;
  j["coarse_dt"] = r.coarse_dt;
  j["coarse_factor"] = r.coarse_factor;
  j["master_seed"] = r.master_seed;
  j["n_requested"] = r.n_requested;
  j["retained"] = r.retained;
  j["excluded"] = r.excluded;
  j["n_excluded"] = r.excluded.size();
  j["path_checksums"] = to_vector(r.path_checksums);

  json per_mass = json::array();
  for (std::size_t k = 0; k < r.masses.size(); ++k) {
    json m;
    m["mass"] = r.masses[k];
    m["underdamped_terminal"] = {{"mean", r.underdamped_terminal[k].mean},
                                 {"variance", r.underdamped_terminal[k].variance}};
    json cands = json::array();
    for (std::size_t c = 0; c < r.candidates.size(); ++c) {
      const PathwiseStats& p = r.pathwise[k][c];
      const WeakStats& w = r.weak[k][c];
      cands.push_back({{"candidate", r.candidates[c]},
                       {"mean_sup_err", p.mean_sup},
                       {"max_sup_err", p.max_sup},
                       {"win_fraction", p.win_fraction},
                       {"sup_errors", to_vector(p.sup_errors)},
                       {"terminal_weak", w.terminal_weak},
                       {"terminal_weak_se", w.standard_error},
                       {"ks", w.ks}});
    }
    m["candidates"] = std::move(cands);
    per_mass.push_back(std::move(m));
  }
  j["per_mass"] = std::move(per_mass);

  json per_cand = json::array();
  for (std::size_t c = 0; c < r.candidates.size(); ++c) {
    per_cand.push_back({{"candidate", r.candidates[c]},
                        {"terminal_mean", r.candidate_terminal[c].mean},
                        {"terminal_variance", r.candidate_terminal[c].variance},
                        {"strictly_decreasing", r.trends[c].strictly_decreasing},
                        {"spearman_rho", r.trends[c].pooled.rho},
                        {"spearman_p", r.trends[c].pooled.p_positive}});
  }
  j["per_candidate"] = std::move(per_cand);
  j["winner"] = {{"pathwise", r.winner_pathwise},
                 {"terminal_weak", r.winner_weak},
                 {"ks", r.winner_ks}};
  return j;
}

void write_report_csv(std::ostream& os, const ConvergenceReport& r) {
  os << "mass,candidate,mean_sup_err,max_sup_err,terminal_weak,terminal_weak_se,ks,"
        "win_fraction\n";
  for (std::size_t k = 0; k < r.masses.size(); ++k) {
    for (std::size_t c = 0; c < r.candidates.size(); ++c) {
      const PathwiseStats& p = r.pathwise[k][c];
      const WeakStats& w = r.weak[k][c];
      os << format_double(r.masses[k]) << ',' << r.candidates[c] << ','
         << format_double(p.mean_sup) << ',' << format_double(p.max_sup) << ','
         << format_double(w.terminal_weak) << ',' << format_double(w.standard_error) << ','
         << format_double(w.ks) << ',' << format_double(p.win_fraction) << '\n';
    }
  }
}

std::string hex_hash(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace sklimit
