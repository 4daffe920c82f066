#include "statarb/factor_basis.hpp"

#include <nlohmann/json.hpp>

namespace statarb {

void FactorModel::validate() const {
    require(n_assets >= 1, "FactorModel: n_assets must be >= 1");
    require(n_factors >= 0, "FactorModel: n_factors must be >= 0");
    require(loadings.rows() == n_assets && loadings.cols() == n_factors,
            "FactorModel: loadings must be n_assets x n_factors");
    require(regression.rows() == n_factors && regression.cols() == n_assets,
            "FactorModel: regression must be n_factors x n_assets");
    if (n_factors > 0) {
        require_finite(loadings, "FactorModel: loadings");
        require_finite(regression, "FactorModel: regression");
    }
}

FactorModel FactorModel::from_json(const nlohmann::json& doc) {
    require(doc.is_object(), "FactorModel: JSON document must be an object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        require(key == "n_assets" || key == "n_factors" || key == "loadings" ||
                    key == "regression",
                "FactorModel: unknown key '" + key + "'");
    }
    FactorModel fm;
    fm.n_assets = doc.at("n_assets").get<Index>();
    fm.n_factors = doc.at("n_factors").get<Index>();
    require(fm.n_assets >= 1 && fm.n_factors >= 0, "FactorModel: bad dimensions");

    const auto read_row_major = [](const nlohmann::json& arr, Index rows, Index cols,
                                   const char* name) {
        require(arr.is_array() && static_cast<Index>(arr.size()) == rows * cols,
                std::string(name) + ": expected row-major array of length rows*cols");
        Matrix m(rows, cols);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j)
                m(i, j) = arr.at(static_cast<std::size_t>(i * cols + j)).get<double>();
        return m;
    };
    fm.loadings = read_row_major(doc.at("loadings"), fm.n_assets, fm.n_factors, "loadings");
    fm.regression =
        read_row_major(doc.at("regression"), fm.n_factors, fm.n_assets, "regression");
    fm.validate();
    return fm;
}

MarketNeutralBasis build_basis(const FactorModel& fm) {
    fm.validate();
    MarketNeutralBasis basis;
    // c_ik = sum_j regression_jk loadings_ij = (loadings * regression)_ik.
    basis.c_matrix = fm.n_factors > 0
                         ? Matrix(fm.loadings * fm.regression)
                         : Matrix::Zero(fm.n_assets, fm.n_assets);
    basis.portfolio_rows =
        Matrix::Identity(fm.n_assets, fm.n_assets) - basis.c_matrix;
    basis.capital = basis.portfolio_rows.rowwise().sum();
    return basis;
}

Vector replication_check(const MarketNeutralBasis& basis, const Vector& d_returns) {
    require(d_returns.size() == basis.size(),
            "replication_check: dR length must equal the number of assets");
    return basis.portfolio_rows * d_returns;
}

double capital_of(const MarketNeutralBasis& basis, const Vector& pi) {
    require(pi.size() == basis.size(),
            "capital_of: pi length must equal the number of portfolios");
    return pi.dot(basis.capital);
}

}  // namespace statarb
