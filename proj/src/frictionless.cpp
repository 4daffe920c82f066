#include "statarb/frictionless.hpp"

#include <cmath>
#include <utility>

#include "statarb/matrix_kernels.hpp"

namespace statarb {

namespace {

void check_time_in_horizon(double t, double horizon, const char* name) {
    if (t < -1e-12 || t > horizon + 1e-12)
        throw InvalidInputError(std::string(name) + ": t outside [0, T]");
}

Eigen::LLT<Matrix> factorize_cov(const Matrix& sigma_sq, const char* name) {
    Eigen::LLT<Matrix> llt(sigma_sq);
    if (llt.info() != Eigen::Success)
        throw NumericalError(std::string(name) + ": sigma*sigma' factorization failed");
    return llt;
}

}  // namespace

ExpStrategyParams::ExpStrategyParams(OuParams ou, double gamma, double r,
                                     double horizon, Vector p)
    : ou_(std::move(ou)), gamma_(gamma), r_(r), horizon_(horizon), p_(std::move(p)) {
    require(gamma_ > 0.0, "ExpStrategyParams: gamma must be > 0");
    require(horizon_ > 0.0, "ExpStrategyParams: horizon must be > 0");
    require(p_.size() == ou_.dim(), "ExpStrategyParams: p length must match N");
    cov_llt_ = factorize_cov(ou_.sigma_sq, "ExpStrategyParams");
}

MvStrategyParams::MvStrategyParams(OuParams ou, TimeScalar gamma, double r,
                                   double horizon, Vector p)
    : ou_(std::move(ou)), gamma_(std::move(gamma)), r_(r), horizon_(horizon),
      p_(std::move(p)) {
    require(horizon_ > 0.0, "MvStrategyParams: horizon must be > 0");
    require(p_.size() == ou_.dim(), "MvStrategyParams: p length must match N");
    cov_llt_ = factorize_cov(ou_.sigma_sq, "MvStrategyParams");
}

Vector exp_portfolio_myopic(const ExpStrategyParams& params, double t, const Vector& x) {
    check_time_in_horizon(t, params.horizon(), "exp_portfolio");
    require(x.size() == params.ou().dim(), "exp_portfolio: x length must match N");
    const OuParams& ou = params.ou();
    const double tau = params.horizon() - t;
    const Vector signal = ou.mean_reversion * (ou.mean - x) - params.p() * params.rate();
    return params.solve_cov(signal) / (params.gamma() * std::exp(params.rate() * tau));
}

Vector exp_portfolio(const ExpStrategyParams& params, double t, const Vector& x) {
    check_time_in_horizon(t, params.horizon(), "exp_portfolio");
    require(x.size() == params.ou().dim(), "exp_portfolio: x length must match N");
    const OuParams& ou = params.ou();
    const double tau = params.horizon() - t;
    const double discount = params.gamma() * std::exp(params.rate() * tau);
    const Vector signal = ou.mean_reversion * (ou.mean - x) - params.p() * params.rate();

    const Vector myopic = params.solve_cov(signal) / discount;
    const Vector inner = signal * tau -
                         ou.mean_reversion * params.p() * (params.rate() * tau * tau / 2.0);
    const Vector correction =
        ou.mean_reversion.transpose() * params.solve_cov(inner) / discount;
    return myopic + correction;
}

Vector mv_portfolio(const MvStrategyParams& params, double t, const Vector& x) {
    check_time_in_horizon(t, params.horizon(), "mv_portfolio");
    require(x.size() == params.ou().dim(), "mv_portfolio: x length must match N");
    const double gamma_t = params.gamma()(t);
    if (gamma_t <= 0.0)
        throw InvalidInputError("mv_portfolio: gamma(t) must be positive");
    const OuParams& ou = params.ou();
    const double tau = params.horizon() - t;
    const Vector signal = ou.mean_reversion * (ou.mean - x) - params.p() * params.rate();
    return params.solve_cov(signal) * (std::exp(params.rate() * tau) / gamma_t);
}

double exp_value_h(const ExpStrategyParams& params, double t, const Vector& x) {
    check_time_in_horizon(t, params.horizon(), "exp_value_h");
    require(x.size() == params.ou().dim(), "exp_value_h: x length must match N");
    const OuParams& ou = params.ou();
    const Matrix& a = ou.mean_reversion;
    const double r = params.rate();
    const double gamma = params.gamma();
    const double tau = params.horizon() - t;
    const Vector rp = params.p() * r;

    // h = (1/2g) m0'Q m0 tau - (1/g) m0'Q A [x tau + rp tau^2/2]
    //   + (1/2g) [x'A'QA x tau + (2 x'A'QA rp + tr(A'QA ss')) tau^2/2
    //             + rp'A'QA rp tau^3/3],   Q = (ss')^{-1}, m0 = A mu - rp.
    const Vector m0 = a * ou.mean - rp;
    const Vector q_m0 = params.solve_cov(m0);
    const Vector ax = a * x;
    const Vector arp = a * rp;
    const Vector q_ax = params.solve_cov(ax);
    const Vector q_arp = params.solve_cov(arp);
    const double trace_term = params.solve_cov(Matrix(a * ou.sigma_sq)).cwiseProduct(a).sum();

    const double tau2 = tau * tau / 2.0;
    const double tau3 = tau * tau * tau / 3.0;
    double h = q_m0.dot(m0) * tau / 2.0;
    h -= q_m0.dot(ax * tau + arp * tau2);
    h += (ax.dot(q_ax) * tau + (2.0 * ax.dot(q_arp) + trace_term) * tau2 +
          arp.dot(q_arp) * tau3) /
         2.0;
    return h / gamma;
}

VerificationReport verification_diagnostic(const ExpStrategyParams& params,
                                           int s_grid_steps) {
    require(s_grid_steps >= 2, "verification_diagnostic: s_grid_steps must be >= 2");
    const OuParams& ou = params.ou();
    const Matrix& a = ou.mean_reversion;
    const Index n = ou.dim();
    const Matrix identity = Matrix::Identity(n, n);
    const Matrix aq = a.transpose() * params.solve_cov(identity);  // A'(ss')^{-1}

    VerificationReport report;
    for (int k = 0; k <= s_grid_steps; ++k) {
        const double s = params.horizon() * k / s_grid_steps;
        const Matrix omega = ou_cov_integral(a, ou.sigma_sq, s);
        Matrix omega_half;
        try {
            omega_half = sym_sqrt(omega);
        } catch (const NotPsdError&) {
            throw NumericalError("verification_diagnostic: Omega(s) is not PSD");
        }
        const double tail = params.horizon() - s;
        const Matrix c0 = aq * a * (identity + a * tail);
        const Matrix c1 = aq * (identity + a * tail) * ou.diffusion;

        const Matrix m0 = omega_half * (c0 + c0.transpose()) * omega_half;
        const Matrix m1 = omega_half * (c1 * c1.transpose()) * omega_half;
        Eigen::SelfAdjointEigenSolver<Matrix> eig0((m0 + m0.transpose()) / 2.0);
        Eigen::SelfAdjointEigenSolver<Matrix> eig1((m1 + m1.transpose()) / 2.0);
        report.max4_lambda0 =
            std::max(report.max4_lambda0, 4.0 * eig0.eigenvalues().cwiseAbs().maxCoeff());
        report.max32_lambda1 =
            std::max(report.max32_lambda1, 32.0 * eig1.eigenvalues().cwiseAbs().maxCoeff());
    }
    report.lambda0_satisfied = report.max4_lambda0 < 1.0;
    report.lambda1_satisfied = report.max32_lambda1 < 1.0;
    return report;
}

}  // namespace statarb
