// config.hpp
// JSON run configuration: strict schema (unknown keys rejected), hyperparameter
// grids expanded to strategy cells, optional factor-model-derived capital
// vector. The parsed document is kept verbatim for the run manifest.

#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

#include "statarb/factor_basis.hpp"
#include "statarb/sim_harness.hpp"

namespace statarb {

struct OutputOptions {
    std::string dir = "out";
    int path_csv_paths = 4;  // paths per cell written to the paths CSV
};

struct RunConfig {
    SimCampaign campaign;
    OutputOptions output;
    std::optional<FactorModel> factor_model;  // source of p when present
    nlohmann::json echo;                      // effective configuration
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

}  // namespace statarb
