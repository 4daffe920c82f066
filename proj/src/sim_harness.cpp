#include "statarb/sim_harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <tuple>

#include "statarb/constrained.hpp"
#include "statarb/frictionless.hpp"
#include "statarb/frictions.hpp"
#include "statarb/parallel.hpp"
#include "statarb/rng.hpp"

namespace statarb {

namespace {

// Purpose tags for deriving independent sub-seeds from the campaign seed.
constexpr std::uint64_t kTagParams = 0x01;
constexpr std::uint64_t kTagPerturb = 0x02;
constexpr std::uint64_t kTagPaths = 0x03;

constexpr int kPathBlock = 256;

}  // namespace

const char* family_id(StrategyFamily family) {
    switch (family) {
        case StrategyFamily::kExponential: return "exp";
        case StrategyFamily::kMeanVariance: return "mv";
        case StrategyFamily::kMvDollar: return "mv-dollar";
        case StrategyFamily::kMvTransactionCost: return "mv-tcost";
    }
    return "unknown";
}

std::optional<StrategyFamily> family_from_id(const std::string& id) {
    if (id == "exp") return StrategyFamily::kExponential;
    if (id == "mv") return StrategyFamily::kMeanVariance;
    if (id == "mv-dollar") return StrategyFamily::kMvDollar;
    if (id == "mv-tcost") return StrategyFamily::kMvTransactionCost;
    return std::nullopt;
}

PaperDraw generate_paper_params(int n, std::uint64_t seed) {
    require(n >= 1, "generate_paper_params: n must be >= 1");
    const std::uint64_t sub_seed = split_seed(seed, kTagParams);

    Philox mean_reversion_rng(sub_seed, 0);
    Vector a_diag(n);
    for (int i = 0; i < n; ++i) {
        double entry;
        do {
            entry = 0.5 + 0.1 * mean_reversion_rng.next_gaussian();
        } while (entry <= 0.0);
        a_diag[i] = entry;
    }
    const Matrix a = a_diag.asDiagonal();

    for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
        Philox sigma_rng(sub_seed, 1 + attempt);
        Matrix sigma(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                sigma(i, j) = (i == j) ? 0.5 * sigma_rng.next_double()
                                       : sigma_rng.next_uniform(-0.3, 0.3);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma * sigma.transpose());
        if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 1e-12)
            continue;
        PaperDraw draw{OuParams::create(a, Vector::Zero(n), sigma), Vector::Ones(n)};
        return draw;
    }
    throw NumericalError(
        "generate_paper_params: sigma*sigma' singular after 10 redraw attempts");
}

Vector perturb_p(const Vector& base, double a, std::uint64_t seed) {
    require(a >= 0.0, "perturb_p: a must be >= 0");
    Philox rng(seed, 0);
    Vector p = base;
    for (Index i = 0; i < p.size(); ++i) p[i] += a * (2.0 * rng.next_double() - 1.0);
    return p;
}

Vector simulate_wealth_path(const Matrix& pi_path, const Matrix& x_path,
                            const Vector& p, double r, double dt, double w0,
                            const Vector* cost_debit) {
    require(pi_path.rows() == x_path.rows() && pi_path.cols() == x_path.cols(),
            "simulate_wealth_path: pi_path and x_path shapes must match");
    require(p.size() == pi_path.cols(), "simulate_wealth_path: p length mismatch");
    const Index n_nodes = pi_path.rows();
    require(n_nodes >= 1, "simulate_wealth_path: empty paths");
    if (cost_debit != nullptr)
        require(cost_debit->size() == n_nodes - 1,
                "simulate_wealth_path: cost_debit must have one entry per step");

    Vector wealth(n_nodes);
    wealth[0] = w0;
    for (Index l = 0; l + 1 < n_nodes; ++l) {
        const double pi_dx = pi_path.row(l).dot(x_path.row(l + 1) - x_path.row(l));
        const double pi_p = pi_path.row(l).dot(p);
        double next = wealth[l] + pi_dx + (wealth[l] - pi_p) * r * dt;
        if (cost_debit != nullptr) next -= (*cost_debit)[l] * dt;
        wealth[l + 1] = next;
    }
    return wealth;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    const double w = h - static_cast<double>(lo);
    return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

Histogram build_histogram(const std::vector<double>& sorted, int bins) {
    Histogram hist;
    const std::size_t n = sorted.size();
    const double lo = sorted.front();
    const double hi = sorted.back();
    int n_bins = bins;
    if (n_bins <= 0) {
        // Freedman-Diaconis rule; falls back to one bin for degenerate data.
        const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
        const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
        if (width <= 0.0 || hi <= lo)
            n_bins = 1;
        else
            n_bins = std::clamp(static_cast<int>(std::ceil((hi - lo) / width)), 1, 512);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    hist.edges.resize(n_bins + 1);
    for (int b = 0; b <= n_bins; ++b)
        hist.edges[b] = lo + span * static_cast<double>(b) / n_bins;
    hist.counts.assign(n_bins, 0);
    for (const double v : sorted) {
        auto b = static_cast<int>((v - lo) / span * n_bins);
        b = std::clamp(b, 0, n_bins - 1);
        ++hist.counts[static_cast<std::size_t>(b)];
    }
    return hist;
}

}  // namespace

TerminalStats compute_terminal_stats(std::vector<double> terminal, int bins) {
    require(!terminal.empty(), "compute_terminal_stats: no terminal values");
    TerminalStats stats;
    const auto n = static_cast<double>(terminal.size());
    double sum = 0.0;
    for (const double v : terminal) sum += v;
    stats.mean = sum / n;
    double ss = 0.0;
    for (const double v : terminal) ss += (v - stats.mean) * (v - stats.mean);
    stats.sd = terminal.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

    std::sort(terminal.begin(), terminal.end());
    for (std::size_t i = 0; i < TerminalStats::kQuantileLevels.size(); ++i)
        stats.quantiles[i] = quantile_sorted(terminal, TerminalStats::kQuantileLevels[i]);
    stats.histogram = build_histogram(terminal, bins);
    return stats;
}

namespace {

/// Per-node affine position tables for the closed-form families:
/// pi_l(x) = base[l] + slope[l] x, stored transposed for batched use.
struct AffineTables {
    std::vector<Matrix> slope_t;  // index l = 1..steps (node 0 holds pi = 0)
    std::vector<Vector> base;
};

/// Per-node intensity tables for the transaction-cost family:
/// I_l(x, pi) = rate[l] pi + aim0[l] + aim1[l](mu - x).
struct TcostTables {
    std::vector<Matrix> rate_t;
    std::vector<Matrix> aim1_t;
    std::vector<Vector> aim0;
    Matrix cost;
};

AffineTables build_affine_tables(const StrategyCell& cell, const OuParams& ou,
                                 const Vector& p, const std::vector<double>& grid,
                                 double horizon) {
    const Matrix& a = ou.mean_reversion;
    const int n_nodes = static_cast<int>(grid.size());

    AffineTables tables;
    tables.slope_t.resize(n_nodes);
    tables.base.resize(n_nodes);

    if (cell.family == StrategyFamily::kExponential ||
        cell.family == StrategyFamily::kMeanVariance) {
        require(cell.gamma > 0.0, "strategy cell: gamma must be > 0");
        Eigen::LLT<Matrix> cov(ou.sigma_sq);
        if (cov.info() != Eigen::Success)
            throw NumericalError("strategy cell: sigma*sigma' factorization failed");
        const Matrix qa = cov.solve(a);
        const Vector q_pr = cov.solve(Vector(p * cell.r));
        const Vector qa_mu = qa * ou.mean;
        if (cell.family == StrategyFamily::kMeanVariance) {
            for (int l = 1; l < n_nodes; ++l) {
                const double scale = std::exp(cell.r * (horizon - grid[l])) / cell.gamma;
                tables.slope_t[l] = (-scale) * qa.transpose();
                tables.base[l] = scale * (qa_mu - q_pr);
            }
            return tables;
        }
        const Matrix at_qa = a.transpose() * qa;
        const Vector at_q_pr = a.transpose() * q_pr;
        const Vector at_qa_mu = at_qa * ou.mean;
        const Vector at_qa_p = at_qa * p;
        for (int l = 1; l < n_nodes; ++l) {
            const double tau = horizon - grid[l];
            const double disc = cell.gamma * std::exp(cell.r * tau);
            tables.slope_t[l] = (-(qa + tau * at_qa) / disc).transpose();
            tables.base[l] = (qa_mu - q_pr + tau * (at_qa_mu - at_q_pr) -
                              (tau * tau * cell.r / 2.0) * at_qa_p) /
                             disc;
        }
        return tables;
    }

    // mv-dollar
    require(cell.family == StrategyFamily::kMvDollar, "build_affine_tables: bad family");
    require(cell.gamma > 0.0, "strategy cell: gamma must be > 0");
    require(cell.alpha >= 0.0, "strategy cell: alpha must be >= 0");
    const Matrix system = cell.gamma * ou.sigma_sq + cell.alpha * p * p.transpose();
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success)
        throw NumericalError("strategy cell: penalized system not positive definite");
    const Matrix ma = llt.solve(a);
    const Vector m_signal = llt.solve(Vector(a * ou.mean - p * cell.r));
    for (int l = 1; l < n_nodes; ++l) {
        const double scale = std::exp(cell.r * (horizon - grid[l]));
        tables.slope_t[l] = (-scale) * ma.transpose();
        tables.base[l] = scale * m_signal;
    }
    return tables;
}

/// Cached capital-independent friction computation, keyed by (gamma, lambda, r).
struct FrictionKernelCache {
    std::map<std::tuple<double, double, double>,
             std::shared_ptr<std::pair<OdeGridSolution, BKernel>>>
        entries;
};

TcostTables build_tcost_tables(const StrategyCell& cell, const OuParams& ou,
                               const Vector& p, const SimCampaign& campaign,
                               FrictionKernelCache& cache) {
    require(cell.gamma >= 0.0, "strategy cell: gamma must be >= 0");
    Matrix cost;
    if (cell.has_explicit_cost())
        cost = cell.cost_matrix;
    else {
        require(cell.lambda > 0.0, "strategy cell: lambda must be > 0");
        cost = cell.lambda * ou.sigma_sq;
    }
    CostParams params(ou, cost, cell.gamma, cell.r, campaign.horizon, p);
    const int ode_steps = campaign.ode_steps_multiplier * campaign.steps;

    std::shared_ptr<std::pair<OdeGridSolution, BKernel>> solved;
    if (!cell.has_explicit_cost()) {
        const auto key = std::make_tuple(cell.gamma, cell.lambda, cell.r);
        auto it = cache.entries.find(key);
        if (it == cache.entries.end()) {
            auto a_solution = solve_a(params, ode_steps);
            auto kernel = solve_b_kernel(params, a_solution);
            solved = std::make_shared<std::pair<OdeGridSolution, BKernel>>(
                std::move(a_solution), std::move(kernel));
            cache.entries.emplace(key, solved);
        } else {
            solved = it->second;
        }
    } else {
        auto a_solution = solve_a(params, ode_steps);
        auto kernel = solve_b_kernel(params, a_solution);
        solved = std::make_shared<std::pair<OdeGridSolution, BKernel>>(
            std::move(a_solution), std::move(kernel));
    }
    const AffineB affine = assemble_b(solved->second, p, cell.r);

    TcostTables tables;
    tables.cost = cost;
    const int n_nodes = campaign.steps + 1;
    tables.rate_t.resize(n_nodes);
    tables.aim1_t.resize(n_nodes);
    tables.aim0.resize(n_nodes);
    Eigen::LLT<Matrix> cost_llt(cost);
    for (int l = 0; l < n_nodes; ++l) {
        const int k = l * campaign.ode_steps_multiplier;  // grids are aligned
        tables.rate_t[l] = cost_llt.solve(solved->first.values[k]).transpose();
        tables.aim1_t[l] = cost_llt.solve(affine.beta1[k]).transpose();
        tables.aim0[l] = cost_llt.solve(affine.beta0[k]);
    }
    return tables;
}

void validate_campaign(const SimCampaign& campaign) {
    require(campaign.n_assets >= 1, "SimCampaign: n_assets must be >= 1");
    require(campaign.n_paths >= 1, "SimCampaign: n_paths must be >= 1");
    require(campaign.horizon > 0.0, "SimCampaign: horizon must be > 0");
    require(campaign.steps >= 1, "SimCampaign: steps must be >= 1");
    require(!campaign.cells.empty(), "SimCampaign: no strategy cells");
    require(campaign.ode_steps_multiplier >= 1,
            "SimCampaign: ode_steps_multiplier must be >= 1");
}

std::string cell_context(const StrategyCell& cell) {
    std::string context = family_id(cell.family);
    context += " gamma=" + std::to_string(cell.gamma) + " r=" + std::to_string(cell.r);
    if (cell.family == StrategyFamily::kMvDollar)
        context += " alpha=" + std::to_string(cell.alpha);
    if (cell.family == StrategyFamily::kMvTransactionCost)
        context += " lambda=" + std::to_string(cell.lambda);
    if (cell.a_perturb != 0.0) context += " a=" + std::to_string(cell.a_perturb);
    return context;
}

}  // namespace

CampaignResult run_campaign(const SimCampaign& campaign) {
    validate_campaign(campaign);

    CampaignResult result;
    if (campaign.use_paper_recipe) {
        PaperDraw draw = generate_paper_params(campaign.n_assets, campaign.seed);
        result.ou = std::move(draw.ou);
        result.base_p = std::move(draw.p);
    } else {
        require(campaign.explicit_ou.has_value(),
                "SimCampaign: explicit parameters required when the recipe is off");
        result.ou = *campaign.explicit_ou;
        require(result.ou.dim() == campaign.n_assets,
                "SimCampaign: explicit OU dimension must match n_assets");
        result.base_p = campaign.explicit_p.value_or(Vector::Ones(campaign.n_assets));
        require(result.base_p.size() == campaign.n_assets,
                "SimCampaign: p length must match n_assets");
    }

    const int n_nodes = campaign.steps + 1;
    result.grid.resize(n_nodes);
    for (int l = 0; l < n_nodes; ++l) result.grid[l] = campaign.dt() * l;
    // Keep the terminal node exact.
    result.grid.back() = campaign.horizon;

    const Vector x0 = campaign.x0.value_or(result.ou.mean);
    require(x0.size() == campaign.n_assets, "SimCampaign: x0 length must match n_assets");
    result.x_paths = sample_paths(result.ou, x0, result.grid, campaign.n_paths,
                                  split_seed(campaign.seed, kTagPaths));

    const std::uint64_t perturb_seed = split_seed(campaign.seed, kTagPerturb);
    FrictionKernelCache friction_cache;
    const Index n = campaign.n_assets;
    const double dt = campaign.dt();

    for (const StrategyCell& cell : campaign.cells) {
        CellResult cr;
        cr.cell = cell;
        cr.p = cell.a_perturb == 0.0 ? result.base_p
                                     : perturb_p(result.base_p, cell.a_perturb,
                                                 perturb_seed);
        cr.wealth.resize(campaign.n_paths, n_nodes);
        cr.pi_first.resize(campaign.n_paths, n_nodes);

        const bool is_tcost = cell.family == StrategyFamily::kMvTransactionCost;
        AffineTables affine;
        TcostTables tcost;
        try {
            if (is_tcost)
                tcost = build_tcost_tables(cell, result.ou, cr.p, campaign,
                                           friction_cache);
            else
                affine = build_affine_tables(cell, result.ou, cr.p, result.grid,
                                             campaign.horizon);
        } catch (const DivergenceError& e) {
            throw DivergenceError("cell [" + cell_context(cell) + "]: " + e.what(),
                                  e.blow_up_time());
        } catch (const NumericalError& e) {
            throw NumericalError("cell [" + cell_context(cell) + "]: " + e.what());
        }

        const Vector& p_cell = cr.p;
        const auto run_block = [&](int begin, int end) {
            const int block = end - begin;
            Matrix x_cur(block, n), x_next(block, n);
            Matrix pi = Matrix::Zero(block, n);
            Matrix intensity_block, aim_deviation;
            Vector w = Vector::Constant(block, campaign.initial_wealth);
            Vector debit = Vector::Zero(block);

            for (int row = 0; row < block; ++row)
                x_cur.row(row) = result.x_paths.node(begin + row, 0).transpose();

            for (int l = 0; l < n_nodes; ++l) {
                if (!is_tcost && l >= 1) {
                    pi.noalias() = x_cur * affine.slope_t[l];
                    pi.rowwise() += affine.base[l].transpose();
                }
                cr.wealth.col(l).segment(begin, block) = w;
                cr.pi_first.col(l).segment(begin, block) = pi.col(0);
                if (l + 1 == n_nodes) break;

                for (int row = 0; row < block; ++row)
                    x_next.row(row) = result.x_paths.node(begin + row, l + 1).transpose();

                if (is_tcost) {
                    // I_l = rate pi + aim0 + aim1 (mu - x)
                    intensity_block.noalias() = pi * tcost.rate_t[l];
                    aim_deviation.noalias() =
                        ((-x_cur).rowwise() + result.ou.mean.transpose()) *
                        tcost.aim1_t[l];
                    intensity_block += aim_deviation;
                    intensity_block.rowwise() += tcost.aim0[l].transpose();
                    if (campaign.debit_costs)
                        debit = 0.5 *
                                ((intensity_block * tcost.cost)
                                     .cwiseProduct(intensity_block))
                                    .rowwise()
                                    .sum();
                }

                const Vector pi_dx =
                    (pi.cwiseProduct(x_next - x_cur)).rowwise().sum();
                const Vector pi_p = pi * p_cell;
                w += pi_dx + (w - pi_p) * (cell.r * dt);
                if (is_tcost && campaign.debit_costs) w -= debit * dt;

                if (is_tcost) pi += intensity_block * dt;
                x_cur.swap(x_next);
            }
        };
        parallel_blocks(campaign.n_paths, kPathBlock, run_block);

        cr.terminal.resize(static_cast<std::size_t>(campaign.n_paths));
        for (int m = 0; m < campaign.n_paths; ++m)
            cr.terminal[static_cast<std::size_t>(m)] = cr.wealth(m, n_nodes - 1);
        cr.stats = compute_terminal_stats(cr.terminal, campaign.histogram_bins);
        result.cells.push_back(std::move(cr));
    }
    return result;
}

}  // namespace statarb
