// factor_basis.hpp
// Construction of the N market-neutral portfolios implied by a factor model,
// together with the capital vector p (dollars needed per unit of each
// portfolio). Holding portfolio i earns exactly the i-th residual increment,
// so downstream strategies can treat the residual process as tradable.

#pragma once

#include <nlohmann/json_fwd.hpp>

#include "statarb/types.hpp"

namespace statarb {

/// Return decomposition dR = loadings * dF + dX with factor extraction
/// dF = regression * dR. `regression` is an input, not derived from
/// `loadings`; any matrix satisfying the extraction identity is accepted.
struct FactorModel {
    Index n_assets = 0;
    Index n_factors = 0;
    Matrix loadings;    // n_assets x n_factors
    Matrix regression;  // n_factors x n_assets

    void validate() const;
    static FactorModel from_json(const nlohmann::json& doc);
};

/// The basis rows are p_tilde_i = e_i - row i of c_matrix, where
/// c_ik = sum_j regression_jk * loadings_ij. capital[i] = p_tilde_i . 1.
struct MarketNeutralBasis {
    Matrix c_matrix;        // N x N
    Matrix portfolio_rows;  // N x N, row i = p_tilde_i = (I - C) row i
    Vector capital;         // length N

    Index size() const { return c_matrix.rows(); }
};

MarketNeutralBasis build_basis(const FactorModel& fm);

/// Returns (p_tilde_i . dR)_i. Under dF = regression*dR and
/// dX = dR - loadings*dF this equals dX exactly.
Vector replication_check(const MarketNeutralBasis& basis, const Vector& d_returns);

/// Total capital deployed by holding pi: pi . p.
double capital_of(const MarketNeutralBasis& basis, const Vector& pi);

}  // namespace statarb
