#include "statarb/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

namespace statarb {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    require(obj.is_object(), where + ": expected a JSON object");
    const std::set<std::string> allowed_set(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed_set.contains(key))
            throw InvalidInputError(where + ": unknown key '" + key + "'");
    }
}

std::vector<double> scalar_or_array(const json& v, const std::string& name) {
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array() && !v.empty()) {
        std::vector<double> values;
        for (const auto& item : v) {
            require(item.is_number(), name + ": expected numbers");
            values.push_back(item.get<double>());
        }
        return values;
    }
    throw InvalidInputError(name + ": expected a number or a non-empty array");
}

Vector read_vector(const json& arr, const std::string& name) {
    require(arr.is_array() && !arr.empty(), name + ": expected a non-empty array");
    Vector v(static_cast<Index>(arr.size()));
    for (Index i = 0; i < v.size(); ++i)
        v[i] = arr.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

Matrix read_square(const json& arr, Index n, const std::string& name) {
    require(arr.is_array() && static_cast<Index>(arr.size()) == n * n,
            name + ": expected a row-major array of length N*N");
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            m(i, j) = arr.at(static_cast<std::size_t>(i * n + j)).get<double>();
    return m;
}

void expand_strategy_entry(const json& entry, Index n_assets,
                           std::vector<StrategyCell>& cells) {
    require(entry.is_object(), "strategies: each entry must be an object");
    require(entry.contains("family"), "strategies: entry missing 'family'");
    const std::string family_str = entry.at("family").get<std::string>();
    const auto family = family_from_id(family_str);
    if (!family)
        throw InvalidInputError("strategies: unknown family '" + family_str +
                                "' (use exp|mv|mv-dollar|mv-tcost)");

    switch (*family) {
        case StrategyFamily::kExponential:
        case StrategyFamily::kMeanVariance:
            check_keys(entry, {"family", "gamma", "r", "p_perturb_a"},
                       "strategies[" + family_str + "]");
            break;
        case StrategyFamily::kMvDollar:
            check_keys(entry, {"family", "gamma", "r", "alpha", "p_perturb_a"},
                       "strategies[" + family_str + "]");
            break;
        case StrategyFamily::kMvTransactionCost:
            check_keys(entry, {"family", "gamma", "r", "lambda", "cost", "p_perturb_a"},
                       "strategies[" + family_str + "]");
            break;
    }

    const std::vector<double> gammas =
        entry.contains("gamma") ? scalar_or_array(entry.at("gamma"), "gamma")
                                : std::vector<double>{1.0};
    const std::vector<double> rates =
        entry.contains("r") ? scalar_or_array(entry.at("r"), "r")
                            : std::vector<double>{0.0};
    const std::vector<double> alphas =
        entry.contains("alpha") ? scalar_or_array(entry.at("alpha"), "alpha")
                                : std::vector<double>{0.0};
    const std::vector<double> perturbs =
        entry.contains("p_perturb_a")
            ? scalar_or_array(entry.at("p_perturb_a"), "p_perturb_a")
            : std::vector<double>{0.0};

    std::vector<double> lambdas{0.0};
    Matrix explicit_cost;
    if (*family == StrategyFamily::kMvTransactionCost) {
        const bool has_lambda = entry.contains("lambda");
        const bool has_cost = entry.contains("cost");
        require(has_lambda != has_cost,
                "strategies[mv-tcost]: provide exactly one of 'lambda' or 'cost'");
        if (has_lambda) {
            lambdas = scalar_or_array(entry.at("lambda"), "lambda");
        } else {
            const json& cost = entry.at("cost");
            check_keys(cost, {"lambda", "matrix"}, "strategies[mv-tcost].cost");
            require(cost.contains("lambda") != cost.contains("matrix"),
                    "strategies[mv-tcost].cost: provide 'lambda' or 'matrix'");
            if (cost.contains("lambda"))
                lambdas = scalar_or_array(cost.at("lambda"), "cost.lambda");
            else
                explicit_cost = read_square(cost.at("matrix"), n_assets, "cost.matrix");
        }
    }

    for (const double gamma : gammas)
        for (const double r : rates)
            for (const double alpha : alphas)
                for (const double lambda : lambdas)
                    for (const double a : perturbs) {
                        StrategyCell cell;
                        cell.family = *family;
                        cell.gamma = gamma;
                        cell.r = r;
                        cell.alpha = alpha;
                        cell.lambda = lambda;
                        cell.cost_matrix = explicit_cost;
                        cell.a_perturb = a;
                        require(a >= 0.0, "p_perturb_a: must be >= 0");
                        cells.push_back(std::move(cell));
                    }
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& doc) {
    check_keys(doc,
               {"n_assets", "paths", "horizon", "steps", "seed", "debit_costs",
                "ode_steps_multiplier", "histogram_bins", "initial_wealth", "params",
                "strategies", "output"},
               "config");
    RunConfig config;
    SimCampaign& campaign = config.campaign;

    if (doc.contains("n_assets")) campaign.n_assets = doc.at("n_assets").get<int>();
    if (doc.contains("paths")) campaign.n_paths = doc.at("paths").get<int>();
    if (doc.contains("horizon")) campaign.horizon = doc.at("horizon").get<double>();
    if (doc.contains("steps")) campaign.steps = doc.at("steps").get<int>();
    if (doc.contains("seed")) campaign.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("debit_costs"))
        campaign.debit_costs = doc.at("debit_costs").get<bool>();
    if (doc.contains("ode_steps_multiplier"))
        campaign.ode_steps_multiplier = doc.at("ode_steps_multiplier").get<int>();
    if (doc.contains("histogram_bins"))
        campaign.histogram_bins = doc.at("histogram_bins").get<int>();
    if (doc.contains("initial_wealth"))
        campaign.initial_wealth = doc.at("initial_wealth").get<double>();

    if (doc.contains("params")) {
        const json& params = doc.at("params");
        check_keys(params, {"recipe", "ou", "p", "factor_model", "x0"}, "params");
        const std::string recipe =
            params.contains("recipe") ? params.at("recipe").get<std::string>() : "paper";
        if (recipe == "paper") {
            check_keys(params, {"recipe"}, "params (paper recipe)");
            campaign.use_paper_recipe = true;
        } else if (recipe == "explicit") {
            campaign.use_paper_recipe = false;
            require(params.contains("ou"), "params: explicit recipe requires 'ou'");
            campaign.explicit_ou = OuParams::from_json(params.at("ou"));
            require(!(params.contains("p") && params.contains("factor_model")),
                    "params: provide at most one of 'p' and 'factor_model'");
            if (params.contains("p"))
                campaign.explicit_p = read_vector(params.at("p"), "params.p");
            if (params.contains("factor_model")) {
                config.factor_model = FactorModel::from_json(params.at("factor_model"));
                campaign.explicit_p = build_basis(*config.factor_model).capital;
            }
            if (params.contains("x0"))
                campaign.x0 = read_vector(params.at("x0"), "params.x0");
        } else {
            throw InvalidInputError("params.recipe: expected 'paper' or 'explicit'");
        }
    }

    require(doc.contains("strategies"), "config: missing 'strategies'");
    const json& strategies = doc.at("strategies");
    require(strategies.is_array() && !strategies.empty(),
            "strategies: expected a non-empty array");
    for (const auto& entry : strategies)
        expand_strategy_entry(entry, campaign.n_assets, campaign.cells);

    if (doc.contains("output")) {
        const json& output = doc.at("output");
        check_keys(output, {"dir", "path_csv_paths"}, "output");
        if (output.contains("dir")) config.output.dir = output.at("dir").get<std::string>();
        if (output.contains("path_csv_paths"))
            config.output.path_csv_paths = output.at("path_csv_paths").get<int>();
        require(config.output.path_csv_paths >= 0, "output.path_csv_paths: must be >= 0");
    }

    config.echo = doc;
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream stream(path);
    if (!stream) throw InvalidInputError("config: cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(stream);
    } catch (const json::parse_error& e) {
        throw InvalidInputError("config: JSON parse error in '" + path + "': " + e.what());
    }
    return parse_run_config(doc);
}

}  // namespace statarb
