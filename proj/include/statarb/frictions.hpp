// frictions.hpp
// Mean-variance trading under temporary quadratic transaction costs I'CI.
// The optimal intensity tracks a moving aim portfolio:
//   I(t, x, pi) = C^{-1}(a(t) pi + b(t, x)) = Aim(t, x) + Rate(t) pi,
// where a(t) solves a backward matrix Riccati ODE (closed tanh form for
// constant volatility aversion) and b(t, x) = beta0(t) + beta1(t)(mu - x)
// is computed deterministically from its integral representation.

#pragma once

#include <vector>

#include "statarb/matrix_kernels.hpp"
#include "statarb/ou_model.hpp"
#include "statarb/types.hpp"

namespace statarb {

/// C must be symmetric positive definite; the common proportional-cost case
/// is C = lambda * sigma*sigma'.
class CostParams {
public:
    CostParams(OuParams ou, Matrix cost, TimeScalar gamma, double r, double horizon,
               Vector p);

    const OuParams& ou() const { return ou_; }
    const Matrix& cost() const { return cost_; }
    const TimeScalar& gamma() const { return gamma_; }
    double rate() const { return r_; }
    double horizon() const { return horizon_; }
    const Vector& p() const { return p_; }

    Vector solve_cost(const Vector& v) const { return cost_llt_.solve(v); }
    Matrix solve_cost(const Matrix& m) const { return cost_llt_.solve(m); }

private:
    OuParams ou_;
    Matrix cost_;
    TimeScalar gamma_;
    double r_;
    double horizon_;
    Vector p_;
    Eigen::LLT<Matrix> cost_llt_;
};

/// a(t) on a uniform grid of [0, T]; symmetric, negative semi-definite,
/// a(T) = 0. Closed form for constant gamma, backward RK4 otherwise.
OdeGridSolution solve_a(const CostParams& params, int steps);

/// The affine coefficients of b(t, x) = beta0(t) + beta1(t)(mu - x) on the
/// same grid, by composite Simpson quadrature of the integral representation
/// with time-ordered-exponential kernels (kernel sub-step = grid step / 4).
struct AffineB {
    std::vector<double> times;
    std::vector<Vector> beta0;
    std::vector<Matrix> beta1;
};

/// The capital-independent part of the b quadrature: beta1 plus the weight
/// matrices W(t) = int_t^T Phi(t,s) e^{r(T-s)} ds, from which
/// beta0(t) = -W(t) (r p) for any capital vector p. Lets a caller reuse one
/// expensive kernel computation across several p.
struct BKernel {
    std::vector<double> times;
    std::vector<Matrix> beta1;
    std::vector<Matrix> weight;
};

BKernel solve_b_kernel(const CostParams& params, const OdeGridSolution& a_solution);
AffineB assemble_b(const BKernel& kernel, const Vector& p, double r);
AffineB solve_b_affine(const CostParams& params, const OdeGridSolution& a_solution);

/// Everything needed to evaluate the strategy along a path.
class FrictionSolution {
public:
    FrictionSolution(CostParams params, OdeGridSolution a, AffineB b);

    const CostParams& params() const { return params_; }
    const std::vector<double>& times() const { return a_.times; }

    Matrix a_at(double t) const { return a_.eval(t); }
    Vector b_at(double t, const Vector& x) const;
    Matrix rate_at(double t) const { return params_.solve_cost(a_at(t)); }
    Vector aim_at(double t, const Vector& x) const {
        return params_.solve_cost(b_at(t, x));
    }

private:
    CostParams params_;
    OdeGridSolution a_;
    AffineB b_;
};

FrictionSolution solve_frictions(const CostParams& params, int steps);

/// Optimal trading intensity I = C^{-1}(a(t) pi + b(t, x)).
Vector intensity(const FrictionSolution& sol, double t, const Vector& x,
                 const Vector& pi);

/// Forward Euler for d pi = I dt along the grid of x_path (one row per node).
/// Returns the pi path with pi(grid[0]) = pi0.
Matrix evolve_position(const FrictionSolution& sol, const std::vector<double>& grid,
                       const Matrix& x_path, const Vector& pi0);

}  // namespace statarb
