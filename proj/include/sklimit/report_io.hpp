#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sklimit/experiments.hpp"

namespace sklimit {

nlohmann::json to_json(const ConvergenceReport& report);

/// One row per (mass, candidate):
/// mass,candidate,mean_sup_err,max_sup_err,terminal_weak,terminal_weak_se,ks,win_fraction
void write_report_csv(std::ostream& os, const ConvergenceReport& report);

std::string hex_hash(std::uint64_t hash);

}  // namespace sklimit
