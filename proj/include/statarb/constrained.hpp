// constrained.hpp
// Strategies with a soft dollar-neutrality penalty: the closed-form
// mean-variance variant and the exponential variant, whose feedback
// coefficients b(t), c(t) solve a backward matrix Riccati / linear ODE pair.

#pragma once

#include "statarb/frictionless.hpp"
#include "statarb/matrix_kernels.hpp"
#include "statarb/types.hpp"

namespace statarb {

/// penalty alpha(t) (pi . p)^2 / 2 added to the running objective;
/// alpha(t) >= 0 and continuous.
struct MvDollarParams {
    MvStrategyParams base;
    TimeScalar alpha;
};

struct ExpDollarParams {
    ExpStrategyParams base;
    TimeScalar alpha;
};

/// Closed-form penalized mean-variance portfolio:
/// (gamma(t) ss' + alpha(t) pp')^{-1} (A(mu-x) - pr) e^{r(T-t)}.
/// The rank-one update is solved through a factorization of the full matrix.
Vector mv_dollar_portfolio(const MvDollarParams& params, double t, const Vector& x);

/// Backward solution of the penalized exponential problem's coefficient ODEs
/// with terminal conditions b(T) = c(T) = 0, sampled on a uniform grid.
struct ExpPenaltyOdeSolution {
    std::vector<double> times;
    std::vector<Matrix> c;  // symmetric N x N
    std::vector<Vector> b;  // length N

    Matrix c_at(double t) const;  // linear interpolation between nodes
    Vector b_at(double t) const;
};

/// RK4 for c (with symmetrization), then for b using the stored c.
ExpPenaltyOdeSolution solve_exp_penalty_odes(const ExpDollarParams& params, int steps);

/// Penalized exponential portfolio:
/// (gamma e^{r(T-t)} ss' + alpha(t) pp')^{-1}
///     (A(mu-x) - pr - gamma ss'(b(t) + c(t) x)).
Vector exp_dollar_portfolio(const ExpDollarParams& params,
                            const ExpPenaltyOdeSolution& sol, double t,
                            const Vector& x);

}  // namespace statarb
