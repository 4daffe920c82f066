// types.hpp
// Common aliases and small helpers used by every module.

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <type_traits>
#include <utility>

#include "statarb/errors.hpp"

namespace statarb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A scalar function of time. Wraps either a constant or a callable so a
/// caller can query whether closed forms for constant coefficients apply.
class TimeScalar {
public:
    TimeScalar(double constant) : constant_(constant), is_constant_(true) {}  // NOLINT: implicit by design

    template <typename Fn,
              typename = std::enable_if_t<
                  std::is_invocable_r_v<double, Fn, double> &&
                  !std::is_same_v<std::decay_t<Fn>, TimeScalar> &&
                  !std::is_arithmetic_v<std::decay_t<Fn>>>>
    TimeScalar(Fn fn) : fn_(std::move(fn)), is_constant_(false) {}  // NOLINT: implicit by design

    double operator()(double t) const { return is_constant_ ? constant_ : fn_(t); }
    bool is_constant() const { return is_constant_; }
    double constant_value() const {
        if (!is_constant_) throw InvalidInputError("TimeScalar: not a constant");
        return constant_;
    }

private:
    std::function<double(double)> fn_;
    double constant_ = 0.0;
    bool is_constant_ = false;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidInputError(message);
}

inline void require_square(const Matrix& m, const std::string& name) {
    require(m.rows() == m.cols() && m.rows() >= 1, name + ": square matrix required");
}

inline void require_finite(const Matrix& m, const std::string& name) {
    if (!m.allFinite()) throw InvalidInputError(name + ": non-finite entries");
}

/// Max-abs deviation from symmetry.
inline double asymmetry(const Matrix& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

inline void require_symmetric(const Matrix& m, double tol, const std::string& name) {
    require_square(m, name);
    require_finite(m, name);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (asymmetry(m) > tol * scale)
        throw InvalidInputError(name + ": matrix is not symmetric to tolerance");
}

}  // namespace statarb
