#include "statarb/ou_model.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <utility>

#include "statarb/matrix_kernels.hpp"
#include "statarb/rng.hpp"

namespace statarb {

namespace {

/// Cholesky with a symmetric-eigenvalue fallback for near-degenerate
/// covariances: negative eigenvalues above -1e-8 (relative) are clipped at
/// 1e-12, anything lower is treated as genuinely indefinite.
Matrix robust_factor(const Matrix& cov) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    if (eig.info() != Eigen::Success)
        throw NumericalError("transition: covariance eigendecomposition failed");
    Vector values = eig.eigenvalues();
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    if (values.minCoeff() < -1e-8 * scale)
        throw NumericalError("transition: covariance is numerically indefinite");
    values = values.cwiseMax(1e-12).cwiseSqrt();
    return eig.eigenvectors() * values.asDiagonal();
}

}  // namespace

OuParams OuParams::create(Matrix a, Vector mu, Matrix sigma) {
    require_square(a, "OuParams: A");
    require_finite(a, "OuParams: A");
    require(mu.size() == a.rows(), "OuParams: mu length must match A");
    require(sigma.rows() == a.rows(), "OuParams: sigma must have N rows");
    require(sigma.cols() >= 1, "OuParams: sigma must have at least one column");
    require_finite(sigma, "OuParams: sigma");

    Eigen::EigenSolver<Matrix> eig(a);
    if (eig.info() != Eigen::Success)
        throw NumericalError("OuParams: eigendecomposition of A failed");
    if (eig.eigenvalues().real().minCoeff() <= 1e-10)
        throw InvalidInputError(
            "OuParams: A must have eigenvalues with positive real part");

    OuParams params;
    params.mean_reversion = std::move(a);
    params.mean = std::move(mu);
    params.sigma_sq = sigma * sigma.transpose();
    params.diffusion = std::move(sigma);

    Eigen::SelfAdjointEigenSolver<Matrix> cov_eig(params.sigma_sq);
    if (cov_eig.info() != Eigen::Success || cov_eig.eigenvalues().minCoeff() <= 1e-12)
        throw InvalidInputError("OuParams: sigma*sigma' must be invertible");
    return params;
}

OuParams OuParams::from_json(const nlohmann::json& doc) {
    require(doc.is_object(), "OuParams: JSON document must be an object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        require(key == "A" || key == "mu" || key == "sigma",
                "OuParams: unknown key '" + key + "'");
    }
    const auto& mu_arr = doc.at("mu");
    require(mu_arr.is_array() && !mu_arr.empty(), "OuParams: mu must be a non-empty array");
    const Index n = static_cast<Index>(mu_arr.size());
    Vector mu(n);
    for (Index i = 0; i < n; ++i) mu[i] = mu_arr.at(static_cast<std::size_t>(i)).get<double>();

    const auto read_row_major = [n](const nlohmann::json& arr, const char* name) {
        require(arr.is_array() && static_cast<Index>(arr.size()) % n == 0,
                std::string(name) + ": expected row-major array with N rows");
        const Index cols = static_cast<Index>(arr.size()) / n;
        Matrix m(n, cols);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < cols; ++j)
                m(i, j) = arr.at(static_cast<std::size_t>(i * cols + j)).get<double>();
        return m;
    };
    Matrix a = read_row_major(doc.at("A"), "OuParams: A");
    require(a.cols() == n, "OuParams: A must be N x N");
    Matrix sigma = read_row_major(doc.at("sigma"), "OuParams: sigma");
    return create(std::move(a), std::move(mu), std::move(sigma));
}

TransitionLaw transition(const OuParams& params, double delta) {
    if (delta <= 0.0) throw InvalidInputError("transition: delta must be > 0");
    TransitionLaw law;
    law.dt = delta;
    law.decay = mat_exp(-params.mean_reversion * delta);
    law.drift_const =
        (Matrix::Identity(params.dim(), params.dim()) - law.decay) * params.mean;
    law.cov = ou_cov_integral(params.mean_reversion, params.sigma_sq, delta);
    law.chol = robust_factor(law.cov);
    return law;
}

PathArray sample_paths(const OuParams& params, const Vector& x0,
                       const std::vector<double>& grid, int n_paths,
                       std::uint64_t seed) {
    require(n_paths >= 1, "sample_paths: n_paths must be >= 1");
    require(!grid.empty(), "sample_paths: grid must be non-empty");
    require(x0.size() == params.dim(), "sample_paths: x0 length must match params");
    for (std::size_t l = 1; l < grid.size(); ++l)
        require(grid[l] > grid[l - 1], "sample_paths: grid must be strictly increasing");

    const int n_nodes = static_cast<int>(grid.size());
    const Index n = params.dim();

    // One transition law per distinct step size (a uniform grid uses one).
    std::map<double, TransitionLaw> laws;
    std::vector<const TransitionLaw*> step_law(grid.size() - 1, nullptr);
    for (std::size_t l = 0; l + 1 < grid.size(); ++l) {
        const double dt = grid[l + 1] - grid[l];
        auto it = laws.find(dt);
        if (it == laws.end()) it = laws.emplace(dt, transition(params, dt)).first;
        step_law[l] = &it->second;
    }

    PathArray paths(n_paths, n_nodes, static_cast<int>(n));
    for (int m = 0; m < n_paths; ++m) {
        Philox rng(seed, static_cast<std::uint64_t>(m));
        paths.node(m, 0) = x0;
        Vector z(n);
        for (int l = 0; l + 1 < n_nodes; ++l) {
            for (Index i = 0; i < n; ++i) z[i] = rng.next_gaussian();
            const TransitionLaw& law = *step_law[static_cast<std::size_t>(l)];
            paths.node(m, l + 1) = law.mean(paths.node(m, l)) + law.chol * z;
        }
    }
    return paths;
}

}  // namespace statarb
