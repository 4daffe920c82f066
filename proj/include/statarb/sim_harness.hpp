// sim_harness.hpp
// Monte Carlo campaign runner: parameter generation, exact path simulation,
// strategy execution on the grid, wealth accounting and terminal statistics.
// One campaign shares a single set of residual paths across every strategy
// cell so cross-cell comparisons are not confounded by sampling noise.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "statarb/ou_model.hpp"
#include "statarb/types.hpp"

namespace statarb {

enum class StrategyFamily { kExponential, kMeanVariance, kMvDollar, kMvTransactionCost };

const char* family_id(StrategyFamily family);
std::optional<StrategyFamily> family_from_id(const std::string& id);

/// One strategy/hyperparameter combination to execute.
struct StrategyCell {
    StrategyFamily family = StrategyFamily::kExponential;
    double gamma = 1.0;
    double r = 0.0;
    double alpha = 0.0;       // dollar-neutrality penalty (mv-dollar)
    double lambda = 0.0;      // cost scale for C = lambda * sigma sigma' (mv-tcost)
    Matrix cost_matrix;       // explicit C; empty means use lambda form
    double a_perturb = 0.0;   // scale of the uniform perturbation applied to p

    bool has_explicit_cost() const { return cost_matrix.size() > 0; }
};

struct SimCampaign {
    int n_assets = 100;
    int n_paths = 1000;
    double horizon = 20.0;
    int steps = 40;  // dt = horizon / steps; defaults give dt = 0.5
    std::uint64_t seed = 20191001;
    bool use_paper_recipe = true;       // A, sigma, mu, p drawn per the recipe below
    std::optional<OuParams> explicit_ou;
    std::optional<Vector> explicit_p;   // defaults to the ones vector
    std::optional<Vector> x0;           // defaults to mu
    std::vector<StrategyCell> cells;
    bool debit_costs = true;            // subtract 0.5 I'CI dt from tcost wealth
    int ode_steps_multiplier = 10;      // ODE grid density relative to `steps`
    int histogram_bins = 0;             // 0 = Freedman-Diaconis
    double initial_wealth = 0.0;

    double dt() const { return horizon / steps; }
};

struct Histogram {
    std::vector<double> edges;  // size counts.size() + 1
    std::vector<int> counts;
};

struct TerminalStats {
    double mean = 0.0;
    double sd = 0.0;
    static constexpr std::array<double, 7> kQuantileLevels = {0.01, 0.05, 0.25,
                                                              0.50, 0.75, 0.95, 0.99};
    std::array<double, 7> quantiles{};
    Histogram histogram;
};

struct CellResult {
    StrategyCell cell;
    Vector p;                       // capital vector actually used
    std::vector<double> terminal;   // W_T per path
    Matrix wealth;                  // n_paths x (steps + 1)
    Matrix pi_first;                // first portfolio coordinate, same shape
    TerminalStats stats;
};

struct CampaignResult {
    std::vector<double> grid;
    OuParams ou;
    Vector base_p;
    PathArray x_paths;
    std::vector<CellResult> cells;
};

/// OU parameters and capital vector drawn per the reference recipe:
/// mu = 0, A diagonal with N(0.5, 0.1^2) entries redrawn while <= 0, sigma
/// with U[-0.3, 0.3] off-diagonal and U[0, 0.5] diagonal entries, p = ones.
/// Redraws sigma on an incremented substream (up to 10 attempts) if
/// sigma*sigma' comes out numerically singular.
struct PaperDraw {
    OuParams ou;
    Vector p;
};
PaperDraw generate_paper_params(int n, std::uint64_t seed);

/// p = base + eps with eps_i = a * U[-1, 1), i.i.d. The same seed yields the
/// same underlying draw for every scale a.
Vector perturb_p(const Vector& base, double a, std::uint64_t seed);

/// Wealth recursion W_{l+1} = W_l + pi_l . dX_l + (W_l - pi_l . p) r dt,
/// minus cost_debit[l] * dt when provided. pi_path and x_path have one row
/// per grid node; the position in row l is held over [t_l, t_{l+1}).
Vector simulate_wealth_path(const Matrix& pi_path, const Matrix& x_path,
                            const Vector& p, double r, double dt, double w0,
                            const Vector* cost_debit = nullptr);

TerminalStats compute_terminal_stats(std::vector<double> terminal, int bins);

CampaignResult run_campaign(const SimCampaign& campaign);

}  // namespace statarb
