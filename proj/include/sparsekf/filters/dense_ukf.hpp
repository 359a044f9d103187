#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "sparsekf/core/linalg.hpp"
#include "sparsekf/filters/sparse_ukf.hpp"
#include "sparsekf/filters/state.hpp"
#include "sparsekf/models/component_model.hpp"
#include "sparsekf/models/observation.hpp"

namespace sparsekf {

struct DenseUkfParams {
    double kappa = 0.0;
    double q = 0.0;
    double positivity_floor = kPositivityFloor;
};

/// Textbook UKF on a dense covariance; every sigma point gets a full model step.
template <ComponentModel Model>
DenseFilterState dense_ukf_cycle(const DenseFilterState& state, const Observation& y_obs, const Model& model,
                                 const ObservationOperator& obs, const DenseUkfParams& params) {
    const std::size_t n = model.dim();
    const auto ne = static_cast<Eigen::Index>(n);
    if (state.xa.size() != ne || state.pa.rows() != ne || state.pa.cols() != ne || obs.state_dim() != n) {
        throw std::invalid_argument("dense_ukf_cycle: dimension mismatch");
    }

    DenseFilterState next;
    CycleDiagnostics& diag = next.diagnostics;
    const auto evals_before = model.evaluations();

    const Eigen::MatrixXd root = dense_cholesky(state.pa, static_cast<double>(n) + params.kappa, &diag.jitter);

    Eigen::MatrixXd forecasts(ne, 2 * ne + 1);
    forecasts.col(0) = model.step(state.xa);
    for (Eigen::Index i = 0; i < ne; ++i) {
        forecasts.col(i + 1) = model.step(state.xa + root.col(i));
        forecasts.col(ne + i + 1) = model.step(state.xa - root.col(i));
    }

    const Eigen::VectorXd w = unscented_weights(n, params.kappa);
    const Eigen::VectorXd x_mean = forecasts * w;
    const Eigen::MatrixXd x_dev = forecasts.colwise() - x_mean;
    Eigen::MatrixXd pb = x_dev * w.asDiagonal() * x_dev.transpose();
    pb.diagonal().array() += params.q;

    if (!y_obs) {
        next.xa = x_mean;
        next.pa = pb;
    } else {
        if (y_obs->size() != static_cast<Eigen::Index>(obs.dim())) {
            throw std::invalid_argument("dense_ukf_cycle: observation dimension mismatch");
        }
        const Eigen::MatrixXd y_points = obs.observe_columns(forecasts);
        const Eigen::VectorXd y_mean = y_points * w;
        const Eigen::MatrixXd y_dev = y_points.colwise() - y_mean;
        const Eigen::MatrixXd pxy = x_dev * w.asDiagonal() * y_dev.transpose();
        const Eigen::MatrixXd pyy = y_dev * w.asDiagonal() * y_dev.transpose() + obs.noise_covariance();

        const Eigen::MatrixXd gain = detail::kalman_gain(pxy, pyy);
        const Eigen::VectorXd innovation = *y_obs - y_mean;
        next.xa = x_mean + gain * innovation;
        next.pa = pb - gain * pxy.transpose();
        diag.innovation_norm = innovation.norm();
        diag.observed = true;
    }
    next.pa = 0.5 * (next.pa + next.pa.transpose()).eval();

    restore_positivity(next.pa, diag, params.positivity_floor);
    diag.evaluations = model.evaluations() - evals_before;
    return next;
}

}  // namespace sparsekf
