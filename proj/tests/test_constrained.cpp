#include <doctest.h>

#include <cmath>
#include <limits>

#include "statarb/constrained.hpp"
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

TEST_CASE("mv dollar portfolio: penalty off reduces to the plain strategy") {
    Philox rng(5001, 0);
    const OuParams ou = random_params(rng, 4);
    const Vector p = random_vector(rng, 4);
    const MvStrategyParams base(ou, 1.7, 0.02, 2.0, p);
    const MvDollarParams penalized{base, 0.0};
    for (int trial = 0; trial < 10; ++trial) {
        const double t = 2.0 * rng.next_double();
        const Vector x = random_vector(rng, 4);
        CHECK((mv_dollar_portfolio(penalized, t, x) - mv_portfolio(base, t, x))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
}

TEST_CASE("mv dollar portfolio 1-D reference value") {
    // gamma = 1, sigma^2 = 0.09, alpha = 20, p = 1, r = 0.02, A = 0.5,
    // mu = 0, x = -0.1, T - t = 1: pi = 0.03 e^{0.02} / 20.09.
    const MvDollarParams params{
        MvStrategyParams(one_d(0.5, 0.0, 0.3), 1.0, 0.02, 1.0, Vector::Ones(1)), 20.0};
    Vector x(1);
    x[0] = -0.1;
    CHECK(mv_dollar_portfolio(params, 0.0, x)[0] ==
          doctest::Approx(0.001523446500786594).epsilon(1e-12));
    CHECK(mv_dollar_portfolio(params, 0.0, x)[0] ==
          doctest::Approx(0.0015235).epsilon(1e-4));
}

TEST_CASE("mv dollar portfolio: p = 0 disables the penalty") {
    Philox rng(5002, 0);
    const OuParams ou = random_params(rng, 3);
    const MvStrategyParams with_p0(ou, 1.0, 0.02, 1.5, Vector::Zero(3));
    const MvDollarParams heavy{with_p0, 1000.0};
    const MvDollarParams off{with_p0, 0.0};
    const Vector x = random_vector(rng, 3);
    CHECK((mv_dollar_portfolio(heavy, 0.3, x) - mv_dollar_portfolio(off, 0.3, x))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("dollar exposure is monotone non-increasing in alpha") {
    Philox rng(5003, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const OuParams ou = random_params(rng, 4);
        const Vector p = random_vector(rng, 4);
        const MvStrategyParams base(ou, 1.0, 0.02, 2.0, p);
        const Vector x = random_vector(rng, 4);
        const double t = 2.0 * rng.next_double();
        double previous = std::numeric_limits<double>::infinity();
        for (const double alpha : {0.0, 5.0, 20.0, 100.0, 1e4}) {
            const double exposure =
                std::abs(p.dot(mv_dollar_portfolio({base, alpha}, t, x)));
            CHECK(exposure <= previous + 1e-12);
            previous = exposure;
        }
    }
}

TEST_CASE("large alpha forces dollar neutrality (mean-variance)") {
    Philox rng(5004, 0);
    const OuParams ou = random_params(rng, 5);
    const Vector p = random_vector(rng, 5);
    const MvStrategyParams base(ou, 1.0, 0.02, 2.0, p);
    const Vector x = random_vector(rng, 5);
    const Vector pi = mv_dollar_portfolio({base, 1e6}, 0.5, x);
    CHECK(std::abs(p.dot(pi)) < 1e-3 * pi.norm());
}

TEST_CASE("penalty ODEs: terminal conditions and symmetry") {
    Philox rng(5005, 0);
    const OuParams ou = random_params(rng, 3);
    const ExpDollarParams params{ExpStrategyParams(ou, 1.5, 0.02, 2.0,
                                                   random_vector(rng, 3)),
                                 [](double t) { return 10.0 + 5.0 * t; }};
    const ExpPenaltyOdeSolution sol = solve_exp_penalty_odes(params, 200);
    CHECK(sol.c.back().norm() == 0.0);
    CHECK(sol.b.back().norm() == 0.0);
    for (const Matrix& c : sol.c) CHECK(asymmetry(c) < 1e-9);
    CHECK_THROWS_AS(solve_exp_penalty_odes(params, 5), InvalidInputError);
}

TEST_CASE("penalty off: ODE coefficients match the closed forms") {
    // At alpha = 0 the coefficient ODEs integrate to
    //   c(t) = (T - t) A'QA / gamma
    //   b(t) = -A'Q[(A mu - pr)(T - t) - A rp (T - t)^2 / 2] / gamma.
    Philox rng(5006, 0);
    const OuParams ou = random_params(rng, 3);
    const double gamma = 1.4, r = 0.02, horizon = 2.0;
    const Vector p = random_vector(rng, 3);
    const ExpStrategyParams base(ou, gamma, r, horizon, p);
    const ExpPenaltyOdeSolution sol = solve_exp_penalty_odes({base, 0.0}, 400);

    const Matrix qa = base.solve_cov(Matrix(ou.mean_reversion));
    const Matrix at_qa = ou.mean_reversion.transpose() * qa;
    const Vector m0 = ou.mean_reversion * ou.mean - p * r;
    const Vector arp = ou.mean_reversion * p * r;
    for (std::size_t k = 0; k < sol.times.size(); k += 40) {
        const double tau = horizon - sol.times[k];
        const Matrix c_exact = tau / gamma * at_qa;
        const Vector b_exact =
            -(ou.mean_reversion.transpose() *
              base.solve_cov(Vector(m0 * tau - arp * (tau * tau / 2.0)))) /
            gamma;
        CHECK((sol.c[k] - c_exact).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((sol.b[k] - b_exact).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("penalty off: portfolio matches the frictionless closed form") {
    // 1-D at the reference scale.
    {
        const ExpStrategyParams base(one_d(0.5, 0.0, 0.3), 1.0, 0.02, 1.0,
                                     Vector::Ones(1));
        const ExpDollarParams params{base, 0.0};
        const ExpPenaltyOdeSolution sol = solve_exp_penalty_odes(params, 400);
        double max_gap = 0.0;
        for (const double t : {0.0, 0.25, 0.5, 0.75, 1.0})
            for (const double xv : {-0.3, -0.1, 0.0, 0.2}) {
                Vector x(1);
                x[0] = xv;
                max_gap = std::max(max_gap,
                                   std::abs(exp_dollar_portfolio(params, sol, t, x)[0] -
                                            exp_portfolio(base, t, x)[0]));
            }
        CHECK(max_gap < 1e-4);
    }
    // Multivariate with non-commuting A and sigma sigma'.
    {
        Philox rng(5007, 0);
        const OuParams ou = random_params(rng, 3);
        const ExpStrategyParams base(ou, 2.0, 0.03, 1.5, random_vector(rng, 3));
        const ExpDollarParams params{base, 0.0};
        const ExpPenaltyOdeSolution sol = solve_exp_penalty_odes(params, 300);
        double max_gap = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const double t = 1.5 * rng.next_double();
            const Vector x = random_vector(rng, 3);
            max_gap = std::max(max_gap, (exp_dollar_portfolio(params, sol, t, x) -
                                         exp_portfolio(base, t, x))
                                            .cwiseAbs()
                                            .maxCoeff());
        }
        CHECK(max_gap < 1e-4);
    }
}

TEST_CASE("penalty ODE solution converges under step doubling") {
    const ExpStrategyParams base(one_d(0.5, 0.0, 0.3), 1.0, 0.02, 20.0,
                                 Vector::Ones(1));
    const ExpDollarParams params{base, 20.0};
    const ExpPenaltyOdeSolution coarse = solve_exp_penalty_odes(params, 400);
    const ExpPenaltyOdeSolution fine = solve_exp_penalty_odes(params, 800);
    CHECK((coarse.c.front() - fine.c.front()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((coarse.b.front() - fine.b.front()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("exp dollar portfolio at t = T uses only the terminal system") {
    Philox rng(5008, 0);
    const OuParams ou = random_params(rng, 3);
    const Vector p = random_vector(rng, 3);
    const double gamma = 1.2, r = 0.02, horizon = 2.0;
    const ExpStrategyParams base(ou, gamma, r, horizon, p);
    const TimeScalar alpha = 30.0;
    const ExpDollarParams params{base, alpha};
    const ExpPenaltyOdeSolution sol = solve_exp_penalty_odes(params, 100);

    const Vector x = random_vector(rng, 3);
    const Vector signal = ou.mean_reversion * (ou.mean - x) - p * r;
    const Matrix system = gamma * ou.sigma_sq + 30.0 * p * p.transpose();
    const Vector expected = system.llt().solve(signal);
    CHECK((exp_dollar_portfolio(params, sol, horizon, x) - expected)
              .cwiseAbs()
              .maxCoeff() < 1e-10);

    CHECK_THROWS_AS(exp_dollar_portfolio(params, sol, horizon + 0.1, x),
                    InvalidInputError);
}

TEST_CASE("large alpha forces dollar neutrality (exponential)") {
    Philox rng(5009, 0);
    const OuParams ou = random_params(rng, 4);
    const Vector p = random_vector(rng, 4);
    const ExpStrategyParams base(ou, 1.0, 0.02, 2.0, p);
    const ExpDollarParams params{base, 1e6};
    const ExpPenaltyOdeSolution sol = solve_exp_penalty_odes(params, 200);
    for (const double t : {0.0, 0.8, 1.6}) {
        const Vector x = random_vector(rng, 4);
        const Vector pi = exp_dollar_portfolio(params, sol, t, x);
        CHECK(std::abs(p.dot(pi)) < 1e-3 * pi.norm());
    }
}
