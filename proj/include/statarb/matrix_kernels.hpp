// matrix_kernels.hpp
// Dense matrix kernels shared by the strategy and simulation modules:
// matrix exponential, symmetric square root and tanh, the Ornstein-Uhlenbeck
// covariance integral, time-ordered exponentials, and a backward Riccati
// integrator. All functions are pure and safe to call concurrently.

#pragma once

#include <functional>
#include <vector>

#include "statarb/types.hpp"

namespace statarb {

/// e^M by scaling-and-squaring with a Pade core. Throws InvalidInputError on
/// non-finite input.
Matrix mat_exp(const Matrix& m);

/// Checks symmetry to `tol` and clips eigenvalues in [-tol, 0) to zero.
/// Eigenvalues below -tol raise NotPsdError.
Matrix project_psd(const Matrix& m, double tol = 1e-10, const char* name = "matrix");

/// Symmetric PSD square root: S with S*S = m. Eigenvalues below -1e-10 raise
/// NotPsdError; small negative eigenvalues are clipped to zero.
Matrix sym_sqrt(const Matrix& m);

/// Eigenvalue-wise tanh of a symmetric matrix. Result is symmetric with
/// spectral radius < 1.
Matrix sym_tanh(const Matrix& m);

/// Sigma(delta) = integral_0^delta e^{-A(delta-s)} sigma_sq e^{-A'(delta-s)} ds,
/// computed exactly through the block matrix exponential of
/// [[-A, sigma_sq], [0, A']] (Van Loan). Symmetric PSD; Sigma(0) = 0.
Matrix ou_cov_integral(const Matrix& a, const Matrix& sigma_sq, double delta);

/// Time-ordered exponential :exp(int_{t0}^{t1} generator(s) ds): as the
/// increasing-time-ordered product of per-step exponentials (earliest factor
/// leftmost), with midpoint evaluation per step. O(step^2) accurate; exact
/// for a constant generator.
Matrix time_ordered_exp(const std::function<Matrix(double)>& generator, double t0,
                        double t1, double step);

/// Backward ODE solution sampled on a uniform grid of [0, T].
struct OdeGridSolution {
    std::vector<double> times;   // ascending, times[k] = T*k/steps
    std::vector<Matrix> values;  // values[k] at times[k]

    /// Linear interpolation in t; exact at the nodes.
    Matrix eval(double t) const;
};

/// Classical RK4 integration of dY/dt = rhs(t, Y) backward from Y(T) =
/// terminal to t = 0 on a uniform grid with `steps` steps. When `symmetrize`
/// is set, iterates are replaced by (Y+Y')/2 after each step so symmetric
/// solutions stay symmetric. Non-finite or exploding iterates raise
/// DivergenceError carrying the blow-up time.
OdeGridSolution riccati_backward(const Matrix& terminal,
                                 const std::function<Matrix(double, const Matrix&)>& rhs,
                                 double T, int steps, bool symmetrize = true);

}  // namespace statarb
