// frictionless.hpp
// Closed-form optimal portfolios without trading frictions: the exponential
// utility strategy (with its value-function component h and an eigenvalue
// verification diagnostic) and the mean-variance strategy. Both are affine
// in the residual deviation from its long-run mean.

#pragma once

#include "statarb/ou_model.hpp"
#include "statarb/types.hpp"

namespace statarb {

/// Parameters of the exponential-utility strategy. Holds a cached
/// factorization of sigma*sigma' reused by every evaluation.
class ExpStrategyParams {
public:
    ExpStrategyParams(OuParams ou, double gamma, double r, double horizon, Vector p);

    const OuParams& ou() const { return ou_; }
    double gamma() const { return gamma_; }
    double rate() const { return r_; }
    double horizon() const { return horizon_; }
    const Vector& p() const { return p_; }

    /// (sigma sigma')^{-1} b via the cached factorization.
    Vector solve_cov(const Vector& b) const { return cov_llt_.solve(b); }
    Matrix solve_cov(const Matrix& b) const { return cov_llt_.solve(b); }

private:
    OuParams ou_;
    double gamma_;
    double r_;
    double horizon_;
    Vector p_;
    Eigen::LLT<Matrix> cov_llt_;
};

/// Mean-variance parameters; gamma is a (possibly time-varying) positive
/// volatility-aversion function on [0, T].
class MvStrategyParams {
public:
    MvStrategyParams(OuParams ou, TimeScalar gamma, double r, double horizon, Vector p);

    const OuParams& ou() const { return ou_; }
    const TimeScalar& gamma() const { return gamma_; }
    double rate() const { return r_; }
    double horizon() const { return horizon_; }
    const Vector& p() const { return p_; }

    Vector solve_cov(const Vector& b) const { return cov_llt_.solve(b); }

private:
    OuParams ou_;
    TimeScalar gamma_;
    double r_;
    double horizon_;
    Vector p_;
    Eigen::LLT<Matrix> cov_llt_;
};

/// Optimal exponential-utility portfolio at (t, x): myopic Merton-like term
/// plus a horizon-dependent correction that vanishes at t = T.
Vector exp_portfolio(const ExpStrategyParams& params, double t, const Vector& x);

/// The first (myopic) summand of exp_portfolio alone.
Vector exp_portfolio_myopic(const ExpStrategyParams& params, double t, const Vector& x);

/// Optimal mean-variance portfolio at (t, x).
Vector mv_portfolio(const MvStrategyParams& params, double t, const Vector& x);

/// The value-function component h(t, x) of the exponential problem
/// (quadratic polynomial in x, h(T, .) = 0).
double exp_value_h(const ExpStrategyParams& params, double t, const Vector& x);

/// Eigenvalue conditions sufficient for optimality of the exponential
/// strategy, scanned on a uniform s-grid of [0, T]. Reported, not enforced:
/// the conditions are sufficient, not necessary.
struct VerificationReport {
    double max4_lambda0 = 0.0;   // 4 * max_s |lambda|_max of Om^{1/2}(C0+C0')Om^{1/2}
    double max32_lambda1 = 0.0;  // 32 * max_s |lambda|_max of Om^{1/2}C1 C1'Om^{1/2}
    bool lambda0_satisfied = false;
    bool lambda1_satisfied = false;
    bool satisfied() const { return lambda0_satisfied && lambda1_satisfied; }
};

VerificationReport verification_diagnostic(const ExpStrategyParams& params,
                                           int s_grid_steps);

}  // namespace statarb
