#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "sparsekf/core/linalg.hpp"
#include "sparsekf/filters/state.hpp"
#include "sparsekf/models/component_model.hpp"
#include "sparsekf/models/observation.hpp"

namespace sparsekf {

struct UkfParams {
    SparsityPattern pattern;
    double kappa = 0.0;
    double q = 0.0;  ///< model error covariance Q = q * I
    double positivity_floor = kPositivityFloor;
};

/// Sigma-point weights: w0 = kappa/(n+kappa), wi = 1/(2(n+kappa)).
inline Eigen::VectorXd unscented_weights(std::size_t n, double kappa) {
    const double scale = static_cast<double>(n) + kappa;
    if (!(scale > 0.0)) throw std::invalid_argument("unscented_weights: n + kappa must be positive");
    Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(2 * n + 1), 1.0 / (2.0 * scale));
    w[0] = kappa / scale;
    return w;
}

/// One cycle of the sparse unscented Kalman filter.
///
/// Sigma-point perturbations are the columns of the zero-fill incomplete
/// Cholesky factor of (n+kappa) Pa. The center point gets a full model step;
/// sigma point i is propagated only on pattern column i and merged into the
/// center forecast. Covariances are accumulated on the pattern only and the
/// analysis covariance is shifted by gamma*I when it is not positive definite.
template <ComponentModel Model>
FilterState sparse_ukf_cycle(const FilterState& state, const Observation& y_obs, const Model& model,
                             const ObservationOperator& obs, const UkfParams& params) {
    const SparsityPattern& pattern = params.pattern;
    const std::size_t n = pattern.dim();
    const auto ne = static_cast<Eigen::Index>(n);
    if (model.dim() != n || static_cast<std::size_t>(state.xa.size()) != n || !(state.pa.pattern() == pattern) ||
        obs.state_dim() != n) {
        throw std::invalid_argument("sparse_ukf_cycle: dimension or pattern mismatch");
    }

    FilterState next;
    CycleDiagnostics& diag = next.diagnostics;
    const auto evals_before = model.evaluations();

    const IncompleteCholesky root = incomplete_cholesky(state.pa, static_cast<double>(n) + params.kappa);
    diag.jitter = root.jitter;

    const Eigen::VectorXd center = model.step(state.xa);
    Eigen::MatrixXd forecasts(ne, 2 * ne + 1);
    forecasts.col(0) = center;
    for (Index i = 0; i < n; ++i) {
        const auto column = pattern.column(i);
        for (int sign : {1, -1}) {
            Eigen::VectorXd sigma = state.xa;
            root.factor.axpy_column(i, static_cast<double>(sign), sigma);
            const SparseVector partial = model.step_components(sigma, column);
            const Eigen::Index slot = sign > 0 ? static_cast<Eigen::Index>(i) + 1 : ne + static_cast<Eigen::Index>(i) + 1;
            forecasts.col(slot) = merge(partial, center);
        }
    }

    const Eigen::VectorXd w = unscented_weights(n, params.kappa);
    const Eigen::VectorXd x_mean = forecasts * w;
    const Eigen::MatrixXd x_dev = forecasts.colwise() - x_mean;

    SparseSymMatrix pb = restricted_outer_accumulate(x_dev, w, pattern);
    if (params.q != 0.0) pb.add_to_diagonal(params.q);

    if (!y_obs) {
        next.xa = x_mean;
        next.pa = std::move(pb);
    } else {
        if (y_obs->size() != static_cast<Eigen::Index>(obs.dim())) {
            throw std::invalid_argument("sparse_ukf_cycle: observation dimension mismatch");
        }
        const Eigen::MatrixXd y_points = obs.observe_columns(forecasts);
        const Eigen::VectorXd y_mean = y_points * w;
        const Eigen::MatrixXd y_dev = y_points.colwise() - y_mean;
        const Eigen::MatrixXd weighted_y = y_dev * w.asDiagonal();
        const Eigen::MatrixXd pxy = x_dev * weighted_y.transpose();
        const Eigen::MatrixXd pyy = y_dev * weighted_y.transpose() + obs.noise_covariance();

        const Eigen::MatrixXd gain = detail::kalman_gain(pxy, pyy);
        const Eigen::VectorXd innovation = *y_obs - y_mean;
        next.xa = x_mean + gain * innovation;
        next.pa = pb - restricted_product(gain, pxy.transpose(), pattern);
        diag.innovation_norm = innovation.norm();
        diag.observed = true;
    }

    restore_positivity(next.pa, diag, params.positivity_floor);
    diag.evaluations = model.evaluations() - evals_before;
    return next;
}

}  // namespace sparsekf
