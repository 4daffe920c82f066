// emit.hpp
// Machine-readable artifacts of a campaign run: sample-path CSV, terminal
// wealth CSV, terminal statistics JSON and a manifest that reproduces the run.
// Numbers are written in shortest round-trip form so re-runs are
// byte-identical and files re-parse to the exact in-memory values.

#pragma once

#include <string>
#include <vector>

#include "statarb/config.hpp"
#include "statarb/sim_harness.hpp"

namespace statarb {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// Writes paths.csv, terminal.csv, stats.json and manifest.json into
/// `out_dir` (created if missing). Returns the file paths in that order.
std::vector<std::string> emit_campaign(const CampaignResult& result,
                                       const RunConfig& config,
                                       const std::string& out_dir);

/// Row of terminal.csv.
struct TerminalRow {
    std::string strategy_id;
    double gamma = 0.0;
    double alpha = 0.0;
    double lambda = 0.0;
    double a_perturb = 0.0;
    long path_id = 0;
    double terminal_wealth = 0.0;
};

std::vector<TerminalRow> load_terminal_csv(const std::string& path);

/// Row of paths.csv.
struct PathRow {
    std::string strategy_id;
    double gamma = 0.0;
    double alpha = 0.0;
    double lambda = 0.0;
    double a_perturb = 0.0;
    long path_id = 0;
    double t = 0.0;
    double wealth = 0.0;
    double pi_first = 0.0;
};

std::vector<PathRow> load_paths_csv(const std::string& path);

nlohmann::json load_json_file(const std::string& path);

}  // namespace statarb
