#include "statarb/matrix_kernels.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

namespace statarb {

Matrix mat_exp(const Matrix& m) {
    require_square(m, "mat_exp");
    require_finite(m, "mat_exp");
    return m.exp();
}

Matrix project_psd(const Matrix& m, double tol, const char* name) {
    require_symmetric(m, tol, name);
    Eigen::SelfAdjointEigenSolver<Matrix> eig((m + m.transpose()) / 2.0);
    if (eig.info() != Eigen::Success)
        throw NumericalError(std::string(name) + ": eigendecomposition failed");
    Vector values = eig.eigenvalues();
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    if (values.minCoeff() < -tol * scale)
        throw NotPsdError(std::string(name) + ": eigenvalue below -tolerance, not PSD");
    values = values.cwiseMax(0.0);
    return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

namespace {

/// Applies fn to the eigenvalues of a symmetric matrix.
Matrix sym_apply(const Matrix& m, double (*fn)(double), const char* name) {
    require_symmetric(m, 1e-10, name);
    Eigen::SelfAdjointEigenSolver<Matrix> eig((m + m.transpose()) / 2.0);
    if (eig.info() != Eigen::Success)
        throw NumericalError(std::string(name) + ": eigendecomposition failed");
    Vector values = eig.eigenvalues().unaryExpr([fn](double v) { return fn(v); });
    return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

Matrix sym_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig;
    require_symmetric(m, 1e-10, "sym_sqrt");
    eig.compute((m + m.transpose()) / 2.0);
    if (eig.info() != Eigen::Success)
        throw NumericalError("sym_sqrt: eigendecomposition failed");
    Vector values = eig.eigenvalues();
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    if (values.minCoeff() < -1e-10 * scale)
        throw NotPsdError("sym_sqrt: matrix is not positive semi-definite");
    values = values.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix sym_tanh(const Matrix& m) { return sym_apply(m, std::tanh, "sym_tanh"); }

Matrix ou_cov_integral(const Matrix& a, const Matrix& sigma_sq, double delta) {
    require_square(a, "ou_cov_integral: A");
    require_symmetric(sigma_sq, 1e-8, "ou_cov_integral: sigma_sq");
    require(a.rows() == sigma_sq.rows(), "ou_cov_integral: dimension mismatch");
    if (delta < 0.0) throw InvalidInputError("ou_cov_integral: delta must be >= 0");
    const Index n = a.rows();
    if (delta == 0.0) return Matrix::Zero(n, n);

    Matrix block = Matrix::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = -a;
    block.topRightCorner(n, n) = sigma_sq;
    block.bottomRightCorner(n, n) = a.transpose();
    const Matrix expm = mat_exp(block * delta);
    // exp of the block matrix is [[e^{-A d}, H], [0, e^{A' d}]] with
    // H = int_0^d e^{-A(d-s)} sigma_sq e^{A' s} ds; Sigma(d) = H e^{-A' d}.
    const Matrix cov =
        expm.topRightCorner(n, n) * expm.topLeftCorner(n, n).transpose();
    return (cov + cov.transpose()) / 2.0;
}

Matrix time_ordered_exp(const std::function<Matrix(double)>& generator, double t0,
                        double t1, double step) {
    if (t0 > t1) throw InvalidInputError("time_ordered_exp: t0 > t1");
    if (step <= 0.0) throw InvalidInputError("time_ordered_exp: step must be > 0");
    const Matrix probe = generator(t0);
    require_square(probe, "time_ordered_exp: generator");
    const Index n = probe.rows();
    if (t1 == t0) return Matrix::Identity(n, n);

    const int n_steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / step)));
    const double h = (t1 - t0) / n_steps;
    Matrix product = Matrix::Identity(n, n);
    for (int i = 0; i < n_steps; ++i) {
        const double mid = t0 + (i + 0.5) * h;
        const Matrix g = generator(mid);
        require_finite(g, "time_ordered_exp: generator");
        product = product * mat_exp(g * h);
    }
    return product;
}

Matrix OdeGridSolution::eval(double t) const {
    if (times.empty()) throw InvalidInputError("OdeGridSolution: empty solution");
    if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
        throw InvalidInputError("OdeGridSolution: t outside the solution grid");
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const double dt = times[1] - times[0];
    const auto k = static_cast<std::size_t>((t - times.front()) / dt);
    const std::size_t lo = std::min(k, times.size() - 2);
    const double w = (t - times[lo]) / (times[lo + 1] - times[lo]);
    return (1.0 - w) * values[lo] + w * values[lo + 1];
}

OdeGridSolution riccati_backward(const Matrix& terminal,
                                 const std::function<Matrix(double, const Matrix&)>& rhs,
                                 double T, int steps, bool symmetrize) {
    require(steps >= 1, "riccati_backward: steps must be >= 1");
    require(T > 0.0, "riccati_backward: T must be > 0");
    require_finite(terminal, "riccati_backward: terminal");

    OdeGridSolution solution;
    solution.times.resize(steps + 1);
    solution.values.resize(steps + 1);
    for (int k = 0; k <= steps; ++k) solution.times[k] = T * k / steps;

    const double h = -T / steps;  // backward
    Matrix y = terminal;
    solution.values[steps] = y;
    constexpr double kBlowUpNorm = 1e12;
    for (int k = steps; k > 0; --k) {
        const double t = solution.times[k];
        const Matrix k1 = rhs(t, y);
        const Matrix k2 = rhs(t + h / 2, y + (h / 2) * k1);
        const Matrix k3 = rhs(t + h / 2, y + (h / 2) * k2);
        const Matrix k4 = rhs(t + h, y + h * k3);
        y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
        if (symmetrize) y = (y + y.transpose()) / 2.0;
        if (!y.allFinite() || y.cwiseAbs().maxCoeff() > kBlowUpNorm)
            throw DivergenceError(
                "riccati_backward: solution blew up near t = " + std::to_string(t + h),
                t + h);
        solution.values[k - 1] = y;
    }
    return solution;
}

}  // namespace statarb
