#include "statarb/emit.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace statarb {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
    std::ofstream stream(path, std::ios::binary);
    if (!stream) throw NumericalError("emit: cannot open '" + path + "' for writing");
    return stream;
}

void cell_prefix(std::ostream& os, const CellResult& cr) {
    os << family_id(cr.cell.family) << ',' << format_double(cr.cell.gamma) << ','
       << format_double(cr.cell.alpha) << ','
       << format_double(cr.cell.has_explicit_cost() ? -1.0 : cr.cell.lambda) << ','
       << format_double(cr.cell.a_perturb);
}

json stats_to_json(const CellResult& cr, int n_paths) {
    json quantiles = json::object();
    const char* names[] = {"p01", "p05", "p25", "p50", "p75", "p95", "p99"};
    for (std::size_t i = 0; i < cr.stats.quantiles.size(); ++i)
        quantiles[names[i]] = cr.stats.quantiles[i];
    return json{{"strategy_id", family_id(cr.cell.family)},
                {"gamma", cr.cell.gamma},
                {"alpha", cr.cell.alpha},
                {"lambda", cr.cell.has_explicit_cost() ? -1.0 : cr.cell.lambda},
                {"a_perturb", cr.cell.a_perturb},
                {"paths", n_paths},
                {"mean", cr.stats.mean},
                {"sd", cr.stats.sd},
                {"quantiles", quantiles},
                {"histogram",
                 {{"edges", cr.stats.histogram.edges},
                  {"counts", cr.stats.histogram.counts}}}};
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream stream(line);
    std::string field;
    while (std::getline(stream, field, ',')) fields.push_back(field);
    return fields;
}

double parse_double(const std::string& s, const std::string& where) {
    double value = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw InvalidInputError(where + ": bad numeric field '" + s + "'");
    return value;
}

}  // namespace

std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) throw NumericalError("format_double: conversion failed");
    return {buffer, ptr};
}

std::vector<std::string> emit_campaign(const CampaignResult& result,
                                       const RunConfig& config,
                                       const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string paths_file = (fs::path(out_dir) / "paths.csv").string();
    const std::string terminal_file = (fs::path(out_dir) / "terminal.csv").string();
    const std::string stats_file = (fs::path(out_dir) / "stats.json").string();
    const std::string manifest_file = (fs::path(out_dir) / "manifest.json").string();

    {
        std::ofstream out = open_out(paths_file);
        out << "strategy_id,gamma,alpha,lambda,a_perturb,path_id,t,W,pi1\n";
        const int n_emit =
            std::min(config.output.path_csv_paths, config.campaign.n_paths);
        for (const CellResult& cr : result.cells)
            for (int m = 0; m < n_emit; ++m)
                for (std::size_t l = 0; l < result.grid.size(); ++l) {
                    cell_prefix(out, cr);
                    out << ',' << m << ',' << format_double(result.grid[l]) << ','
                        << format_double(cr.wealth(m, static_cast<Index>(l))) << ','
                        << format_double(cr.pi_first(m, static_cast<Index>(l))) << '\n';
                }
    }
    {
        std::ofstream out = open_out(terminal_file);
        out << "strategy_id,gamma,alpha,lambda,a_perturb,path_id,W_T\n";
        for (const CellResult& cr : result.cells)
            for (int m = 0; m < config.campaign.n_paths; ++m) {
                cell_prefix(out, cr);
                out << ',' << m << ','
                    << format_double(cr.terminal[static_cast<std::size_t>(m)]) << '\n';
            }
    }
    {
        json stats = json::array();
        for (const CellResult& cr : result.cells)
            stats.push_back(stats_to_json(cr, config.campaign.n_paths));
        std::ofstream out = open_out(stats_file);
        out << json{{"cells", stats}}.dump(2) << '\n';
    }
    {
        const json manifest = {
            {"tool", "statarb"},
            {"version", kToolVersion},
            {"seed", config.campaign.seed},
            {"n_assets", config.campaign.n_assets},
            {"paths", config.campaign.n_paths},
            {"n_cells", result.cells.size()},
            {"grid",
             {{"horizon", config.campaign.horizon},
              {"steps", config.campaign.steps},
              {"dt", config.campaign.dt()}}},
            {"files", {"paths.csv", "terminal.csv", "stats.json"}},
            {"config", config.echo}};
        std::ofstream out = open_out(manifest_file);
        out << manifest.dump(2) << '\n';
    }
    return {paths_file, terminal_file, stats_file, manifest_file};
}

std::vector<TerminalRow> load_terminal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("load_terminal_csv: cannot open '" + path + "'");
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "load_terminal_csv: empty file");
    require(line == "strategy_id,gamma,alpha,lambda,a_perturb,path_id,W_T",
            "load_terminal_csv: unexpected header");
    std::vector<TerminalRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        require(fields.size() == 7, "load_terminal_csv: expected 7 fields");
        TerminalRow row;
        row.strategy_id = fields[0];
        row.gamma = parse_double(fields[1], "terminal.csv");
        row.alpha = parse_double(fields[2], "terminal.csv");
        row.lambda = parse_double(fields[3], "terminal.csv");
        row.a_perturb = parse_double(fields[4], "terminal.csv");
        row.path_id = std::stol(fields[5]);
        row.terminal_wealth = parse_double(fields[6], "terminal.csv");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<PathRow> load_paths_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("load_paths_csv: cannot open '" + path + "'");
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "load_paths_csv: empty file");
    require(line == "strategy_id,gamma,alpha,lambda,a_perturb,path_id,t,W,pi1",
            "load_paths_csv: unexpected header");
    std::vector<PathRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        require(fields.size() == 9, "load_paths_csv: expected 9 fields");
        PathRow row;
        row.strategy_id = fields[0];
        row.gamma = parse_double(fields[1], "paths.csv");
        row.alpha = parse_double(fields[2], "paths.csv");
        row.lambda = parse_double(fields[3], "paths.csv");
        row.a_perturb = parse_double(fields[4], "paths.csv");
        row.path_id = std::stol(fields[5]);
        row.t = parse_double(fields[6], "paths.csv");
        row.wealth = parse_double(fields[7], "paths.csv");
        row.pi_first = parse_double(fields[8], "paths.csv");
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("load_json_file: cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInputError("load_json_file: parse error in '" + path + "': " +
                                e.what());
    }
}

}  // namespace statarb
