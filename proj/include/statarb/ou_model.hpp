// ou_model.hpp
// The mean-reverting residual process dX = A(mu - X)dt + sigma dB: parameter
// validation, the exact conditional transition law over any step, and seeded
// exact path sampling on a time grid.

#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <vector>

#include "statarb/types.hpp"

namespace statarb {

struct OuParams {
    Matrix mean_reversion;  // A, N x N; all eigenvalues with positive real part
    Vector mean;            // mu, length N
    Matrix diffusion;       // sigma, N x m
    Matrix sigma_sq;        // sigma * sigma', cached

    Index dim() const { return mean_reversion.rows(); }

    /// Validates dimensions, the spectrum of A and invertibility of
    /// sigma*sigma'.
    static OuParams create(Matrix a, Vector mu, Matrix sigma);
    static OuParams from_json(const nlohmann::json& doc);
};

/// Conditional law of X_{t+dt} given X_t = x:  N(mean(x), cov).
struct TransitionLaw {
    double dt = 0.0;
    Matrix decay;        // e^{-A dt}
    Vector drift_const;  // (I - e^{-A dt}) mu
    Matrix cov;          // Sigma(dt)
    Matrix chol;         // factor L with L L' = cov (not necessarily triangular)

    Vector mean(const Vector& x) const { return decay * x + drift_const; }
};

TransitionLaw transition(const OuParams& params, double delta);

/// Paths stored contiguously: path-major, then node, then coordinate.
class PathArray {
public:
    PathArray() = default;
    PathArray(int n_paths, int n_nodes, int dim)
        : n_paths_(n_paths), n_nodes_(n_nodes), dim_(dim),
          data_(static_cast<std::size_t>(n_paths) * n_nodes * dim, 0.0) {}

    int n_paths() const { return n_paths_; }
    int n_nodes() const { return n_nodes_; }
    int dim() const { return dim_; }

    double& at(int path, int node, int coord) {
        return data_[offset(path, node) + static_cast<std::size_t>(coord)];
    }
    double at(int path, int node, int coord) const {
        return data_[offset(path, node) + static_cast<std::size_t>(coord)];
    }

    Eigen::Map<const Vector> node(int path, int node_index) const {
        return {data_.data() + offset(path, node_index), dim_};
    }
    Eigen::Map<Vector> node(int path, int node_index) {
        return {data_.data() + offset(path, node_index), dim_};
    }

    const std::vector<double>& raw() const { return data_; }

    bool operator==(const PathArray& other) const = default;

private:
    std::size_t offset(int path, int node_index) const {
        return (static_cast<std::size_t>(path) * n_nodes_ +
                static_cast<std::size_t>(node_index)) *
               static_cast<std::size_t>(dim_);
    }

    int n_paths_ = 0;
    int n_nodes_ = 0;
    int dim_ = 0;
    std::vector<double> data_;
};

/// Draws n_paths independent paths of X on `grid` (strictly increasing,
/// grid[0] is the time of x0). Each step samples the exact conditional
/// Gaussian. Path m consumes RNG stream m of `seed`, so results are
/// bit-reproducible and independent of any parallel scheduling.
PathArray sample_paths(const OuParams& params, const Vector& x0,
                       const std::vector<double>& grid, int n_paths,
                       std::uint64_t seed);

}  // namespace statarb
