#include <doctest.h>

#include <nlohmann/json.hpp>

#include "statarb/factor_basis.hpp"
#include "statarb/rng.hpp"

using namespace statarb;

namespace {

FactorModel random_model(Philox& rng, Index n_assets, Index n_factors) {
    FactorModel fm;
    fm.n_assets = n_assets;
    fm.n_factors = n_factors;
    fm.loadings = Matrix(n_assets, n_factors);
    fm.regression = Matrix(n_factors, n_assets);
    for (Index i = 0; i < n_assets; ++i)
        for (Index j = 0; j < n_factors; ++j)
            fm.loadings(i, j) = 2.0 * rng.next_double() - 1.0;
    for (Index j = 0; j < n_factors; ++j)
        for (Index i = 0; i < n_assets; ++i)
            fm.regression(j, i) = 2.0 * rng.next_double() - 1.0;
    return fm;
}

}  // namespace

TEST_CASE("zero loadings give the identity basis and p = ones") {
    FactorModel fm;
    fm.n_assets = 4;
    fm.n_factors = 2;
    fm.loadings = Matrix::Zero(4, 2);
    fm.regression = Matrix::Ones(2, 4);
    const MarketNeutralBasis basis = build_basis(fm);
    CHECK(basis.c_matrix.norm() == 0.0);
    CHECK((basis.portfolio_rows - Matrix::Identity(4, 4)).norm() == 0.0);
    CHECK((basis.capital - Vector::Ones(4)).norm() == 0.0);

    // With no factor exposure the replication output is dR itself.
    Vector dr(4);
    dr << 1.0, -2.0, 0.5, 3.0;
    CHECK((replication_check(basis, dr) - dr).norm() == 0.0);
}

TEST_CASE("two-asset single-factor hand example") {
    FactorModel fm;
    fm.n_assets = 2;
    fm.n_factors = 1;
    fm.loadings = Matrix(2, 1);
    fm.loadings << 1.0, 1.0;
    fm.regression = Matrix(1, 2);
    fm.regression << 0.5, 0.5;

    const MarketNeutralBasis basis = build_basis(fm);
    CHECK(basis.c_matrix(0, 0) == doctest::Approx(0.5));
    CHECK(basis.c_matrix(0, 1) == doctest::Approx(0.5));
    CHECK(basis.c_matrix(1, 0) == doctest::Approx(0.5));
    CHECK(basis.c_matrix(1, 1) == doctest::Approx(0.5));
    CHECK(basis.portfolio_rows(0, 0) == doctest::Approx(0.5));
    CHECK(basis.portfolio_rows(0, 1) == doctest::Approx(-0.5));
    CHECK(basis.portfolio_rows(1, 0) == doctest::Approx(-0.5));
    CHECK(basis.portfolio_rows(1, 1) == doctest::Approx(0.5));
    CHECK(basis.capital.norm() == 0.0);  // dollar-neutral by construction

    // dR = (1, 0): dF = 0.5, dX = (0.5, -0.5) and the basis replicates it.
    Vector dr(2);
    dr << 1.0, 0.0;
    const Vector replicated = replication_check(basis, dr);
    CHECK(replicated[0] == doctest::Approx(0.5));
    CHECK(replicated[1] == doctest::Approx(-0.5));

    // p = 0: any position deploys zero net capital.
    Vector pi(2);
    pi << 3.0, -7.0;
    CHECK(capital_of(basis, pi) == doctest::Approx(0.0));
}

TEST_CASE("replication is exact for random models") {
    Philox rng(2001, 0);
    const FactorModel fm = random_model(rng, 100, 5);
    const MarketNeutralBasis basis = build_basis(fm);

    // p_i = 1 - row sum of C, exactly.
    for (Index i = 0; i < 100; ++i)
        CHECK(std::abs(basis.capital[i] - (1.0 - basis.c_matrix.row(i).sum())) < 1e-14);

    for (int trial = 0; trial < 1000; ++trial) {
        Vector dr(100);
        for (Index i = 0; i < dr.size(); ++i) dr[i] = 2.0 * rng.next_double() - 1.0;
        const Vector df = fm.regression * dr;
        const Vector dx = dr - fm.loadings * df;
        CHECK((replication_check(basis, dr) - dx).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("capital_of basics") {
    Philox rng(2002, 0);
    const FactorModel fm = random_model(rng, 10, 3);
    const MarketNeutralBasis basis = build_basis(fm);
    CHECK(capital_of(basis, Vector::Zero(10)) == 0.0);

    FactorModel no_factors;
    no_factors.n_assets = 100;
    no_factors.n_factors = 0;
    no_factors.loadings = Matrix(100, 0);
    no_factors.regression = Matrix(0, 100);
    const MarketNeutralBasis ones_basis = build_basis(no_factors);
    CHECK(capital_of(ones_basis, Vector::Ones(100)) == doctest::Approx(100.0));
}

TEST_CASE("dimension mismatches are rejected") {
    FactorModel fm;
    fm.n_assets = 3;
    fm.n_factors = 2;
    fm.loadings = Matrix::Zero(3, 1);  // wrong
    fm.regression = Matrix::Zero(2, 3);
    CHECK_THROWS_AS(build_basis(fm), InvalidInputError);

    fm.loadings = Matrix::Zero(3, 2);
    const MarketNeutralBasis basis = build_basis(fm);
    CHECK_THROWS_AS(replication_check(basis, Vector::Zero(2)), InvalidInputError);
    CHECK_THROWS_AS(capital_of(basis, Vector::Zero(5)), InvalidInputError);
}

TEST_CASE("factor model JSON loading") {
    const nlohmann::json doc = {{"n_assets", 2},
                                {"n_factors", 1},
                                {"loadings", {1.0, 1.0}},
                                {"regression", {0.5, 0.5}}};
    const FactorModel fm = FactorModel::from_json(doc);
    CHECK(fm.loadings(1, 0) == 1.0);
    CHECK(fm.regression(0, 1) == 0.5);

    nlohmann::json bad = doc;
    bad["extra"] = 1;
    CHECK_THROWS_AS(FactorModel::from_json(bad), InvalidInputError);

    nlohmann::json short_arr = doc;
    short_arr["loadings"] = {1.0};
    CHECK_THROWS_AS(FactorModel::from_json(short_arr), InvalidInputError);
}
