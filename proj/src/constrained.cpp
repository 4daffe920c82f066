#include "statarb/constrained.hpp"

#include <cmath>
#include <utility>

namespace statarb {

namespace {

/// Factorizes gamma_scale * ss' + alpha * pp' (SPD for gamma_scale > 0,
/// alpha >= 0) and solves against v.
Vector penalized_solve(const Matrix& sigma_sq, double gamma_scale, double alpha,
                       const Vector& p, const Vector& v) {
    const Matrix system = gamma_scale * sigma_sq + alpha * p * p.transpose();
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success)
        throw NumericalError("dollar penalty: penalized system is not positive definite");
    return llt.solve(v);
}

}  // namespace

Vector mv_dollar_portfolio(const MvDollarParams& params, double t, const Vector& x) {
    const MvStrategyParams& base = params.base;
    if (t < -1e-12 || t > base.horizon() + 1e-12)
        throw InvalidInputError("mv_dollar_portfolio: t outside [0, T]");
    require(x.size() == base.ou().dim(), "mv_dollar_portfolio: x length must match N");
    const double gamma_t = base.gamma()(t);
    if (gamma_t <= 0.0)
        throw InvalidInputError("mv_dollar_portfolio: gamma(t) must be positive");
    const double alpha_t = params.alpha(t);
    if (alpha_t < 0.0)
        throw InvalidInputError("mv_dollar_portfolio: alpha(t) must be >= 0");

    const OuParams& ou = base.ou();
    const double tau = base.horizon() - t;
    const Vector signal = ou.mean_reversion * (ou.mean - x) - base.p() * base.rate();
    return penalized_solve(ou.sigma_sq, gamma_t, alpha_t, base.p(), signal) *
           std::exp(base.rate() * tau);
}

namespace {

/// Index and weight for linear interpolation on a uniform ascending grid.
std::pair<std::size_t, double> grid_weight(const std::vector<double>& times, double t) {
    if (times.empty()) throw InvalidInputError("ExpPenaltyOdeSolution: empty solution");
    if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
        throw InvalidInputError("ExpPenaltyOdeSolution: t outside the solution grid");
    if (t <= times.front()) return {0, 0.0};
    if (t >= times.back()) return {times.size() - 2, 1.0};
    const double dt = times[1] - times[0];
    const auto k = std::min(static_cast<std::size_t>((t - times.front()) / dt),
                            times.size() - 2);
    return {k, (t - times[k]) / (times[k + 1] - times[k])};
}

}  // namespace

Matrix ExpPenaltyOdeSolution::c_at(double t) const {
    const auto [k, w] = grid_weight(times, t);
    return (1.0 - w) * c[k] + w * c[k + 1];
}

Vector ExpPenaltyOdeSolution::b_at(double t) const {
    const auto [k, w] = grid_weight(times, t);
    return (1.0 - w) * b[k] + w * b[k + 1];
}

ExpPenaltyOdeSolution solve_exp_penalty_odes(const ExpDollarParams& params, int steps) {
    require(steps >= 10, "solve_exp_penalty_odes: steps must be >= 10");
    const ExpStrategyParams& base = params.base;
    const OuParams& ou = base.ou();
    const Matrix& a = ou.mean_reversion;
    const Matrix& ss = ou.sigma_sq;
    const Vector& p = base.p();
    const double gamma = base.gamma();
    const double r = base.rate();
    const double horizon = base.horizon();
    const Index n = ou.dim();

    const auto penalized_inverse = [&](double t) {
        const double alpha_t = params.alpha(t);
        if (alpha_t < 0.0)
            throw InvalidInputError("solve_exp_penalty_odes: alpha(t) must be >= 0");
        const Matrix system =
            gamma * std::exp(r * (horizon - t)) * ss + alpha_t * p * p.transpose();
        Eigen::LLT<Matrix> llt(system);
        if (llt.info() != Eigen::Success)
            throw NumericalError("solve_exp_penalty_odes: M(t) system not positive definite");
        return llt;
    };

    // dc/dt = A'c + cA + gamma c ss' c - e^{r(T-t)} (A + gamma ss' c)' M(t) (A + gamma ss' c)
    const auto c_rhs = [&](double t, const Matrix& c) {
        const Matrix v = a + gamma * ss * c;
        const Matrix m_v = penalized_inverse(t).solve(v);
        return Matrix(a.transpose() * c + c * a + gamma * c * ss * c -
                      std::exp(r * (horizon - t)) * v.transpose() * m_v);
    };
    ExpPenaltyOdeSolution solution;
    OdeGridSolution c_sol =
        riccati_backward(Matrix::Zero(n, n), c_rhs, horizon, steps, /*symmetrize=*/true);

    // db/dt = A'b - cA mu + e^{r(T-t)} (A + gamma ss' c)' M(t) (A mu - pr - gamma ss' b)
    //         + gamma c ss' b,  using the stored (interpolated) c.
    const OdeGridSolution& c_view = c_sol;
    const auto b_rhs = [&](double t, const Matrix& b_col) {
        const Vector b = b_col.col(0);
        const Matrix c = c_view.eval(t);
        const Matrix v = a + gamma * ss * c;
        const Vector w = a * ou.mean - p * r - gamma * ss * b;
        const Vector m_w = penalized_inverse(t).solve(w);
        Vector rhs = a.transpose() * b - c * (a * ou.mean) +
                     std::exp(r * (horizon - t)) * v.transpose() * m_w +
                     gamma * c * (ss * b);
        return Matrix(rhs);
    };
    OdeGridSolution b_sol = riccati_backward(Matrix::Zero(n, 1), b_rhs, horizon, steps,
                                             /*symmetrize=*/false);

    solution.times = std::move(c_sol.times);
    solution.c = std::move(c_sol.values);
    solution.b.reserve(b_sol.values.size());
    for (const Matrix& column : b_sol.values) solution.b.push_back(column.col(0));
    return solution;
}

Vector exp_dollar_portfolio(const ExpDollarParams& params,
                            const ExpPenaltyOdeSolution& sol, double t,
                            const Vector& x) {
    const ExpStrategyParams& base = params.base;
    require(!sol.times.empty(), "exp_dollar_portfolio: empty ODE solution");
    if (t < sol.times.front() - 1e-12 || t > sol.times.back() + 1e-12)
        throw InvalidInputError("exp_dollar_portfolio: t outside the solution grid");
    require(x.size() == base.ou().dim(), "exp_dollar_portfolio: x length must match N");

    const OuParams& ou = base.ou();
    const double tau = base.horizon() - t;
    const double alpha_t = params.alpha(t);
    const Vector bc = sol.b_at(t) + sol.c_at(t) * x;
    const Vector numerator = ou.mean_reversion * (ou.mean - x) -
                             base.p() * base.rate() -
                             base.gamma() * (ou.sigma_sq * bc);
    return penalized_solve(ou.sigma_sq, base.gamma() * std::exp(base.rate() * tau),
                           alpha_t, base.p(), numerator);
}

}  // namespace statarb
