#include <doctest.h>

#include <cmath>

#include "statarb/frictionless.hpp"
#include "statarb/matrix_kernels.hpp"
#include "statarb/rng.hpp"

using namespace statarb;

namespace {

OuParams one_d(double a, double mu, double sigma) {
    Matrix am(1, 1), sm(1, 1);
    am(0, 0) = a;
    sm(0, 0) = sigma;
    Vector muv(1);
    muv[0] = mu;
    return OuParams::create(am, muv, sm);
}

OuParams random_params(Philox& rng, Index n) {
    Matrix shift(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) shift(i, j) = 2.0 * rng.next_double() - 1.0;
    const Matrix a = 0.6 * Matrix::Identity(n, n) + 0.25 / std::sqrt(double(n)) * shift;
    Vector mu(n);
    for (Index i = 0; i < n; ++i) mu[i] = 0.5 * rng.next_gaussian();
    Matrix sigma(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            sigma(i, j) = (i == j) ? 0.25 + 0.25 * rng.next_double()
                                   : 0.15 * (2.0 * rng.next_double() - 1.0);
    return OuParams::create(a, mu, sigma);
}

Vector random_vector(Philox& rng, Index n, double scale = 1.0) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = scale * rng.next_gaussian();
    return v;
}

}  // namespace

TEST_CASE("exponential portfolio 1-D reference values") {
    // A = 0.5, mu = 0, sigma^2 = 0.09, gamma = 1, r = 0.02, p = 1, T - t = 1,
    // x = -0.1. Scalar evaluation of the two summands:
    //   first  = 0.03 / (0.09 e^{0.02})
    //   second = (0.5/0.09) e^{-0.02} (0.03*1 - 0.5*0.02*0.5)
    const ExpStrategyParams params(one_d(0.5, 0.0, 0.3), 1.0, 0.02, 1.0,
                                   Vector::Ones(1));
    Vector x(1);
    x[0] = -0.1;
    const double first = exp_portfolio_myopic(params, 0.0, x)[0];
    const double total = exp_portfolio(params, 0.0, x)[0];
    CHECK(first == doctest::Approx(0.3267328911022518).epsilon(1e-12));
    CHECK(total - first == doctest::Approx(0.13613870462593824).epsilon(1e-10));
    CHECK(total == doctest::Approx(0.46287159572819003).epsilon(1e-12));
    CHECK(total == doctest::Approx(0.462872).epsilon(1e-5));
}

TEST_CASE("exponential portfolio trivial cases") {
    Philox rng(4001, 0);
    const OuParams ou = random_params(rng, 4);
    const ExpStrategyParams params(ou, 2.0, 0.03, 1.5, random_vector(rng, 4));

    // At t = T the correction dies: pi = (ss')^{-1}(A(mu-x) - pr)/gamma.
    const Vector x = random_vector(rng, 4);
    const Vector at_t = exp_portfolio(params, 1.5, x);
    const Vector expected = params.solve_cov(
        Vector(ou.mean_reversion * (ou.mean - x) - params.p() * params.rate())) / 2.0;
    CHECK((at_t - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((at_t - exp_portfolio_myopic(params, 1.5, x)).cwiseAbs().maxCoeff() < 1e-14);

    // x = mu and r = 0 gives a zero portfolio.
    const ExpStrategyParams no_rate(ou, 2.0, 0.0, 1.5, random_vector(rng, 4));
    CHECK(exp_portfolio(no_rate, 0.4, ou.mean).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(exp_portfolio(params, -0.1, x), InvalidInputError);
    CHECK_THROWS_AS(exp_portfolio(params, 1.6, x), InvalidInputError);
}

TEST_CASE("mean-variance portfolio values and errors") {
    const OuParams ou = one_d(0.5, 0.0, 0.3);
    const MvStrategyParams params(ou, 1.0, 0.02, 1.0, Vector::Ones(1));
    Vector x(1);
    x[0] = -0.1;
    CHECK(mv_portfolio(params, 0.0, x)[0] ==
          doctest::Approx(0.3400671133422519).epsilon(1e-12));

    const MvStrategyParams no_rate(ou, 1.0, 0.0, 1.0, Vector::Ones(1));
    Vector mu(1);
    mu[0] = 0.0;
    CHECK(mv_portfolio(no_rate, 0.3, mu)[0] == 0.0);

    const MvStrategyParams bad_gamma(ou, [](double) { return -1.0; }, 0.0, 1.0,
                                     Vector::Ones(1));
    CHECK_THROWS_AS(mv_portfolio(bad_gamma, 0.3, x), InvalidInputError);
}

TEST_CASE("mv with gamma(t) = gamma e^{2r(T-t)} equals the exponential myopic term") {
    // 1-D reference value first.
    const OuParams ou = one_d(0.5, 0.0, 0.3);
    const double gamma = 1.0, r = 0.02, horizon = 1.0;
    const MvStrategyParams tuned(
        ou, [=](double t) { return gamma * std::exp(2.0 * r * (horizon - t)); }, r,
        horizon, Vector::Ones(1));
    Vector x(1);
    x[0] = -0.1;
    CHECK(mv_portfolio(tuned, 0.0, x)[0] ==
          doctest::Approx(0.32673289110225173).epsilon(1e-12));

    // Formula identity across random multivariate instances.
    Philox rng(4002, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const OuParams params = random_params(rng, 5);
        const double g = 0.5 + 2.0 * rng.next_double();
        const double rr = 0.05 * rng.next_double();
        const double t_end = 0.5 + 2.0 * rng.next_double();
        const Vector p = random_vector(rng, 5);
        const ExpStrategyParams exp_params(params, g, rr, t_end, p);
        const MvStrategyParams mv_params(
            params, [=](double t) { return g * std::exp(2.0 * rr * (t_end - t)); }, rr,
            t_end, p);
        for (int probe = 0; probe < 10; ++probe) {
            const double t = t_end * rng.next_double();
            const Vector x_probe = random_vector(rng, 5);
            const Vector lhs = mv_portfolio(mv_params, t, x_probe);
            const Vector rhs = exp_portfolio_myopic(exp_params, t, x_probe);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("portfolios are affine in x with the analytic slope") {
    Philox rng(4003, 0);
    const OuParams ou = random_params(rng, 3);
    const ExpStrategyParams exp_params(ou, 1.5, 0.02, 2.0, random_vector(rng, 3));
    const MvStrategyParams mv_params(ou, 1.5, 0.02, 2.0, exp_params.p());
    const double t = 0.7;
    const double tau = 2.0 - t;

    // Analytic slopes.
    const Matrix qa = exp_params.solve_cov(Matrix(ou.mean_reversion));
    const Matrix exp_slope =
        -(qa + tau * ou.mean_reversion.transpose() * qa) /
        (1.5 * std::exp(0.02 * tau));
    const Matrix mv_slope = -std::exp(0.02 * tau) / 1.5 * qa;

    const Vector x0 = random_vector(rng, 3);
    for (Index j = 0; j < 3; ++j) {
        const double eps = 1e-6;
        Vector bumped = x0;
        bumped[j] += eps;
        const Vector exp_diff =
            (exp_portfolio(exp_params, t, bumped) - exp_portfolio(exp_params, t, x0)) /
            eps;
        const Vector mv_diff =
            (mv_portfolio(mv_params, t, bumped) - mv_portfolio(mv_params, t, x0)) / eps;
        CHECK((exp_diff - exp_slope.col(j)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((mv_diff - mv_slope.col(j)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("exp_value_h terminal condition and quadrature oracle") {
    const ExpStrategyParams params(one_d(0.5, 0.3, 0.3), 1.3, 0.02, 2.0,
                                   Vector::Ones(1));
    Vector x(1);
    x[0] = -0.4;
    CHECK(exp_value_h(params, 2.0, x) == 0.0);

    // Oracle: Simpson quadrature in s of the closed Gaussian moments of the
    // integrand: m(s) = A(mu - x - rp(s-t)) - pr,
    // E[...] = m(s)'Q m(s) + (s-t) tr(sigma'A'QA sigma).
    const auto oracle = [&](double t, const Vector& xv) {
        const double a = 0.5, mu = 0.3, ss = 0.09, r = 0.02, gamma = 1.3, T = 2.0;
        const double p = 1.0;
        const auto integrand = [&](double s) {
            const double m = a * (mu - xv[0] - r * p * (s - t)) - p * r;
            const double trace = a * a;  // sigma' A'QA sigma = a^2 in 1-D
            return (m * m / ss + (s - t) * trace) / (2.0 * gamma);
        };
        const int pairs = 200;
        const double h = (T - t) / (2 * pairs);
        double sum = 0.0;
        for (int k = 0; k < pairs; ++k) {
            const double s0 = t + 2 * k * h;
            sum += (h / 3.0) * (integrand(s0) + 4.0 * integrand(s0 + h) +
                                integrand(s0 + 2 * h));
        }
        return sum;
    };
    for (const double t : {0.0, 0.5, 1.7}) {
        for (const double xv : {-0.4, 0.0, 0.3, 1.1}) {
            Vector probe(1);
            probe[0] = xv;
            CHECK(exp_value_h(params, t, probe) ==
                  doctest::Approx(oracle(t, probe)).epsilon(1e-8));
        }
    }
}

TEST_CASE("exp_value_h is exactly quadratic in x") {
    Philox rng(4004, 0);
    const OuParams ou = random_params(rng, 4);
    const ExpStrategyParams params(ou, 2.0, 0.01, 1.5, random_vector(rng, 4));
    const double t = 0.4;
    for (int trial = 0; trial < 5; ++trial) {
        const Vector x0 = random_vector(rng, 4);
        const Vector direction = random_vector(rng, 4);
        // Third difference of a quadratic along any line vanishes.
        const double h0 = exp_value_h(params, t, x0);
        const double h1 = exp_value_h(params, t, Vector(x0 + direction));
        const double h2 = exp_value_h(params, t, Vector(x0 + 2.0 * direction));
        const double h3 = exp_value_h(params, t, Vector(x0 + 3.0 * direction));
        const double third = h3 - 3.0 * h2 + 3.0 * h1 - h0;
        const double scale = std::max({1.0, std::abs(h0), std::abs(h3)});
        CHECK(std::abs(third) < 1e-9 * scale);
    }
}

TEST_CASE("verification diagnostic endpoints and brute-force oracle") {
    // Very small horizon: both conditions must be satisfied.
    const ExpStrategyParams tiny(one_d(0.5, 0.0, 0.3), 1.0, 0.02, 0.01,
                                 Vector::Ones(1));
    const VerificationReport tiny_report = verification_diagnostic(tiny, 50);
    CHECK(tiny_report.lambda0_satisfied);
    CHECK(tiny_report.lambda1_satisfied);
    CHECK(tiny_report.satisfied());

    // Paper-scale 1-D horizon: compare against an independent scalar scan
    // (closed-form Omega + direct products).
    const double a = 0.5, sigma = 0.3, horizon = 20.0;
    const ExpStrategyParams params(one_d(a, 0.0, sigma), 1.0, 0.02, horizon,
                                   Vector::Ones(1));
    const int grid_steps = 6;
    const VerificationReport report = verification_diagnostic(params, grid_steps);

    double max0 = 0.0, max1 = 0.0;
    const double ss = sigma * sigma;
    for (int k = 0; k <= grid_steps; ++k) {
        const double s = horizon * k / grid_steps;
        const double omega = ss * (1.0 - std::exp(-2.0 * a * s)) / (2.0 * a);
        const double c0 = a * a / ss * (1.0 + a * (horizon - s));
        const double c1 = a / ss * (1.0 + a * (horizon - s)) * sigma;
        max0 = std::max(max0, 4.0 * omega * 2.0 * c0);
        max1 = std::max(max1, 32.0 * omega * c1 * c1);
    }
    CHECK(report.max4_lambda0 == doctest::Approx(max0).epsilon(1e-8));
    CHECK(report.max32_lambda1 == doctest::Approx(max1).epsilon(1e-8));

    CHECK_THROWS_AS(verification_diagnostic(params, 1), InvalidInputError);
}

TEST_CASE("verification diagnostic shrinks to zero with the horizon") {
    Philox rng(4005, 0);
    const OuParams ou = random_params(rng, 3);
    const Vector p = random_vector(rng, 3);
    double previous0 = 0.0;
    bool first = true;
    for (const double horizon : {2.0, 0.5, 0.05}) {
        const ExpStrategyParams params(ou, 1.0, 0.02, horizon, p);
        const VerificationReport report = verification_diagnostic(params, 40);
        if (!first) CHECK(report.max4_lambda0 < previous0);
        previous0 = report.max4_lambda0;
        first = false;
    }
}
