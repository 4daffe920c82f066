#include "statarb/frictions.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace statarb {

namespace {

/// Evaluates a(u) at arbitrary times: exact tanh closed form for constant
/// volatility aversion, linear interpolation of the RK4 grid otherwise.
class AEvaluator {
public:
    AEvaluator(const CostParams& params, const OdeGridSolution* grid_solution)
        : grid_(grid_solution) {
        if (params.gamma().is_constant()) {
            exact_ = true;
            horizon_ = params.horizon();
            Eigen::SelfAdjointEigenSolver<Matrix> cost_eig(params.cost());
            if (cost_eig.info() != Eigen::Success ||
                cost_eig.eigenvalues().minCoeff() <= 1e-12)
                throw InvalidInputError("solve_a: cost matrix must be positive definite");
            const Matrix cost_half = cost_eig.eigenvectors() *
                                     cost_eig.eigenvalues().cwiseSqrt().asDiagonal() *
                                     cost_eig.eigenvectors().transpose();
            const Matrix cost_half_inv =
                cost_eig.eigenvectors() *
                cost_eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                cost_eig.eigenvectors().transpose();
            const Matrix d = sym_sqrt(params.gamma().constant_value() * cost_half_inv *
                                      params.ou().sigma_sq * cost_half_inv);
            Eigen::SelfAdjointEigenSolver<Matrix> d_eig(d);
            if (d_eig.info() != Eigen::Success)
                throw NumericalError("solve_a: eigendecomposition of D failed");
            d_values_ = d_eig.eigenvalues();
            left_ = cost_half * d_eig.eigenvectors();  // C^{1/2} U
        }
    }

    Matrix operator()(double u) const {
        if (!exact_) return grid_->eval(u);
        Vector scaled =
            d_values_.array() * (d_values_.array() * (u - horizon_)).tanh();
        return left_ * scaled.asDiagonal() * left_.transpose();
    }

private:
    const OdeGridSolution* grid_ = nullptr;
    bool exact_ = false;
    double horizon_ = 0.0;
    Vector d_values_;
    Matrix left_;
};

}  // namespace

CostParams::CostParams(OuParams ou, Matrix cost, TimeScalar gamma, double r,
                       double horizon, Vector p)
    : ou_(std::move(ou)), cost_(std::move(cost)), gamma_(std::move(gamma)), r_(r),
      horizon_(horizon), p_(std::move(p)) {
    require(horizon_ > 0.0, "CostParams: horizon must be > 0");
    require(p_.size() == ou_.dim(), "CostParams: p length must match N");
    require_symmetric(cost_, 1e-10, "CostParams: cost");
    require(cost_.rows() == ou_.dim(), "CostParams: cost must be N x N");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cost_);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 1e-12)
        throw InvalidInputError("CostParams: cost matrix must be positive definite");
    cost_llt_.compute(cost_);
    if (cost_llt_.info() != Eigen::Success)
        throw NumericalError("CostParams: cost factorization failed");
}

OdeGridSolution solve_a(const CostParams& params, int steps) {
    require(steps >= 10, "solve_a: steps must be >= 10");
    const double horizon = params.horizon();

    if (params.gamma().is_constant()) {
        AEvaluator exact(params, nullptr);
        OdeGridSolution solution;
        solution.times.resize(steps + 1);
        solution.values.resize(steps + 1);
        for (int k = 0; k <= steps; ++k) {
            solution.times[k] = horizon * k / steps;
            solution.values[k] = exact(solution.times[k]);
        }
        return solution;
    }

    const Matrix& ss = params.ou().sigma_sq;
    const auto rhs = [&](double t, const Matrix& a) {
        const double gamma_t = params.gamma()(t);
        if (gamma_t < 0.0) throw InvalidInputError("solve_a: gamma(t) must be >= 0");
        // da/dt = gamma(t) ss' - a C^{-1} a
        return Matrix(gamma_t * ss - a * params.solve_cost(a));
    };
    return riccati_backward(Matrix::Zero(params.ou().dim(), params.ou().dim()), rhs,
                            horizon, steps, /*symmetrize=*/true);
}

BKernel solve_b_kernel(const CostParams& params, const OdeGridSolution& a_solution) {
    require(a_solution.times.size() >= 2, "solve_b_kernel: a solution grid too small");
    const AEvaluator a_eval(params, &a_solution);
    const Matrix& a_mat = params.ou().mean_reversion;
    const double r = params.rate();
    const double horizon = params.horizon();
    const Index n = params.ou().dim();
    const int n_nodes = static_cast<int>(a_solution.times.size());
    const double h = a_solution.times[1] - a_solution.times[0];

    // Kernel generator K(u) = a(u) C^{-1} = (C^{-1} a(u))' since both are
    // symmetric.
    const auto kernel = [&](double u) {
        return Matrix(params.solve_cost(a_eval(u)).transpose());
    };

    const Matrix decay_half = mat_exp(-a_mat * (h / 2.0));
    const Matrix decay_full = decay_half * decay_half;

    BKernel result;
    result.times = a_solution.times;
    result.beta1.assign(n_nodes, Matrix::Zero(n, n));
    result.weight.assign(n_nodes, Matrix::Zero(n, n));

    // Backward sweep: accumulated integrals from t_k to T.
    Matrix beta1_acc = Matrix::Zero(n, n);   // int Phi(t,s) e^{r(T-s)} A e^{-A(s-t)} ds
    Matrix weight_acc = Matrix::Zero(n, n);  // int Phi(t,s) e^{r(T-s)} ds
    for (int k = n_nodes - 2; k >= 0; --k) {
        const double t_k = a_solution.times[k];
        // Quarter-step kernel exponentials (midpoint rule), earliest first.
        Matrix q[4];
        for (int j = 0; j < 4; ++j)
            q[j] = mat_exp(kernel(t_k + (j + 0.5) * h / 4.0) * (h / 4.0));
        const Matrix phi_half = q[0] * q[1];             // Phi(t_k, t_k + h/2)
        const Matrix phi_full = phi_half * q[2] * q[3];  // Phi(t_k, t_{k+1})

        const double w0 = std::exp(r * (horizon - t_k));
        const double w_half = std::exp(r * (horizon - t_k - h / 2.0));
        const double w1 = std::exp(r * (horizon - t_k - h));

        // Simpson over [t_k, t_{k+1}] for both integrands.
        const Matrix beta1_local =
            (h / 6.0) * (w0 * a_mat + 4.0 * w_half * phi_half * a_mat * decay_half +
                         w1 * phi_full * a_mat * decay_full);
        const Matrix weight_local =
            (h / 6.0) * (w0 * Matrix::Identity(n, n) + 4.0 * w_half * phi_half +
                         w1 * phi_full);

        beta1_acc = beta1_local + phi_full * beta1_acc * decay_full;
        weight_acc = weight_local + phi_full * weight_acc;

        result.beta1[k] = beta1_acc;
        result.weight[k] = weight_acc;
    }
    return result;
}

AffineB assemble_b(const BKernel& kernel, const Vector& p, double r) {
    AffineB result;
    result.times = kernel.times;
    result.beta1 = kernel.beta1;
    result.beta0.reserve(kernel.weight.size());
    const Vector rp = r * p;
    for (const Matrix& w : kernel.weight) result.beta0.push_back(-(w * rp));
    return result;
}

AffineB solve_b_affine(const CostParams& params, const OdeGridSolution& a_solution) {
    return assemble_b(solve_b_kernel(params, a_solution), params.p(), params.rate());
}

FrictionSolution::FrictionSolution(CostParams params, OdeGridSolution a, AffineB b)
    : params_(std::move(params)), a_(std::move(a)), b_(std::move(b)) {}

Vector FrictionSolution::b_at(double t, const Vector& x) const {
    require(x.size() == params_.ou().dim(), "FrictionSolution: x length must match N");
    const auto& times = b_.times;
    if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
        throw InvalidInputError("FrictionSolution: t outside the solution grid");
    const Vector deviation = params_.ou().mean - x;
    if (t >= times.back()) return b_.beta0.back() + b_.beta1.back() * deviation;
    const double dt = times[1] - times[0];
    const auto k = std::min(
        static_cast<std::size_t>(std::max(0.0, (t - times.front()) / dt)),
        times.size() - 2);
    const double w = std::clamp((t - times[k]) / (times[k + 1] - times[k]), 0.0, 1.0);
    const Vector beta0 = (1.0 - w) * b_.beta0[k] + w * b_.beta0[k + 1];
    const Matrix beta1 = (1.0 - w) * b_.beta1[k] + w * b_.beta1[k + 1];
    return beta0 + beta1 * deviation;
}

FrictionSolution solve_frictions(const CostParams& params, int steps) {
    OdeGridSolution a = solve_a(params, steps);
    AffineB b = solve_b_affine(params, a);
    return {params, std::move(a), std::move(b)};
}

Vector intensity(const FrictionSolution& sol, double t, const Vector& x,
                 const Vector& pi) {
    require(pi.size() == sol.params().ou().dim(),
            "intensity: pi length must match N");
    return sol.params().solve_cost(Vector(sol.a_at(t) * pi + sol.b_at(t, x)));
}

Matrix evolve_position(const FrictionSolution& sol, const std::vector<double>& grid,
                       const Matrix& x_path, const Vector& pi0) {
    require(grid.size() >= 1, "evolve_position: empty grid");
    require(x_path.rows() == static_cast<Index>(grid.size()),
            "evolve_position: x_path must have one row per grid node");
    require(x_path.cols() == sol.params().ou().dim(),
            "evolve_position: x_path width must match N");
    require(pi0.size() == sol.params().ou().dim(),
            "evolve_position: pi0 length must match N");

    Matrix pi_path(grid.size(), pi0.size());
    Vector pi = pi0;
    pi_path.row(0) = pi.transpose();
    for (std::size_t l = 0; l + 1 < grid.size(); ++l) {
        const double dt = grid[l + 1] - grid[l];
        const Vector x = x_path.row(l).transpose();
        pi += intensity(sol, grid[l], x, pi) * dt;
        pi_path.row(l + 1) = pi.transpose();
    }
    return pi_path;
}

}  // namespace statarb
