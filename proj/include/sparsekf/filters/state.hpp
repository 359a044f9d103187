#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "sparsekf/core/linalg.hpp"
#include "sparsekf/core/sparse.hpp"

namespace sparsekf {

/// Per-cycle bookkeeping reported by every filter.
struct CycleDiagnostics {
    double gamma = 0.0;                 ///< diagonal shift added to the analysis covariance
    double min_eigenvalue = 0.0;        ///< smallest eigenvalue before the shift
    double jitter = 0.0;                ///< Cholesky jitter used for the sigma points
    std::uint64_t evaluations = 0;      ///< scalar model outputs evaluated this cycle
    double innovation_norm = 0.0;       ///< |y_o - predicted observation|, 0 without an observation
    bool observed = false;
};

/// Analysis mean with a pattern-restricted covariance.
struct FilterState {
    Eigen::VectorXd xa;
    SparseSymMatrix pa;
    CycleDiagnostics diagnostics;
};

struct DenseFilterState {
    Eigen::VectorXd xa;
    Eigen::MatrixXd pa;
    CycleDiagnostics diagnostics;
};

/// Ensemble members stored as columns.
struct EnsembleState {
    Eigen::MatrixXd members;
    CycleDiagnostics diagnostics;

    Eigen::VectorXd mean() const { return members.rowwise().mean(); }
};

/// Observation for one cycle; std::nullopt means forecast only.
using Observation = std::optional<Eigen::VectorXd>;

/// Default lower bound on the analysis covariance spectrum after the gamma shift.
inline constexpr double kPositivityFloor = 1e-8;

/// Shift that lifts the smallest eigenvalue to `floor`; zero when already above it.
inline double positivity_shift(double lambda_min, double floor = kPositivityFloor) {
    return lambda_min < floor ? floor - lambda_min : 0.0;
}

/// Applies the gamma rule in place and records it in `diag`.
inline void restore_positivity(SparseSymMatrix& p, CycleDiagnostics& diag, double floor = kPositivityFloor) {
    diag.min_eigenvalue = min_eigenvalue(p);
    diag.gamma = positivity_shift(diag.min_eigenvalue, floor);
    if (diag.gamma > 0.0) p.add_to_diagonal(diag.gamma);
}

inline void restore_positivity(Eigen::MatrixXd& p, CycleDiagnostics& diag, double floor = kPositivityFloor) {
    diag.min_eigenvalue = min_eigenvalue(p);
    diag.gamma = positivity_shift(diag.min_eigenvalue, floor);
    if (diag.gamma > 0.0) p.diagonal().array() += diag.gamma;
}

namespace detail {

// K = Pxy * Pyy^{-1} for symmetric positive definite Pyy.
inline Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& pxy, const Eigen::MatrixXd& pyy) {
    Eigen::LLT<Eigen::MatrixXd> llt(pyy);
    if (llt.info() != Eigen::Success) throw NumericalError("innovation covariance is not positive definite");
    return llt.solve(pxy.transpose()).transpose();
}

}  // namespace detail

}  // namespace sparsekf
