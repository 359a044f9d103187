#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "sparsekf/filters/state.hpp"
#include "sparsekf/models/component_model.hpp"
#include "sparsekf/models/observation.hpp"

namespace sparsekf {

struct EnkfParams {
    std::size_t members = 10;
    double radius = 4.0;     ///< Gaspari-Cohn half-width; the taper vanishes beyond 2*radius
    double inflation = 1.08; ///< variance inflation; deviations are scaled by its square root
};

/// Gaspari-Cohn fifth-order compactly supported correlation, c = half-width.
inline double gaspari_cohn(double distance, double c) {
    if (std::isinf(c)) return 1.0;
    const double z = std::abs(distance) / c;
    if (z <= 1.0) {
        return (((-0.25 * z + 0.5) * z + 0.625) * z - 5.0 / 3.0) * z * z + 1.0;
    }
    if (z < 2.0) {
        return ((((z / 12.0 - 0.5) * z + 0.625) * z + 5.0 / 3.0) * z - 5.0) * z + 4.0 - 2.0 / (3.0 * z);
    }
    return 0.0;
}

/// Taper matrix on cyclic distance.
inline Eigen::MatrixXd cyclic_taper(std::size_t n, double radius) {
    const auto ne = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd c(ne, ne);
    for (Eigen::Index i = 0; i < ne; ++i) {
        for (Eigen::Index j = 0; j < ne; ++j) {
            const auto d = static_cast<double>(std::min(std::abs(i - j), ne - std::abs(i - j)));
            c(i, j) = gaspari_cohn(d, radius);
        }
    }
    return c;
}

/// Stochastic (perturbed-observation) EnKF cycle with tapered sample covariance.
template <ComponentModel Model, class Rng>
EnsembleState enkf_cycle(const EnsembleState& state, const Observation& y_obs, const Model& model,
                         const ObservationOperator& obs, const EnkfParams& params, Rng& rng) {
    const std::size_t n = model.dim();
    const auto ne = static_cast<Eigen::Index>(n);
    const Eigen::Index members = state.members.cols();
    if (state.members.rows() != ne || obs.state_dim() != n) {
        throw std::invalid_argument("enkf_cycle: dimension mismatch");
    }
    if (members < 2) throw std::invalid_argument("enkf_cycle: at least two members are required");
    if (!(params.inflation > 0.0)) throw std::invalid_argument("enkf_cycle: inflation must be positive");

    EnsembleState next;
    CycleDiagnostics& diag = next.diagnostics;
    const auto evals_before = model.evaluations();

    Eigen::MatrixXd forecast(ne, members);
    for (Eigen::Index k = 0; k < members; ++k) forecast.col(k) = model.step(state.members.col(k));

    const Eigen::VectorXd mean = forecast.rowwise().mean();
    Eigen::MatrixXd dev = forecast.colwise() - mean;
    dev *= std::sqrt(params.inflation);
    forecast = dev.colwise() + mean;

    if (y_obs) {
        if (y_obs->size() != static_cast<Eigen::Index>(obs.dim())) {
            throw std::invalid_argument("enkf_cycle: observation dimension mismatch");
        }
        const Eigen::MatrixXd pf = (dev * dev.transpose()) / static_cast<double>(members - 1);
        const Eigen::MatrixXd localized = pf.cwiseProduct(cyclic_taper(n, params.radius));
        const Eigen::MatrixXd pht = obs.observe_columns(localized.transpose()).transpose();
        const Eigen::MatrixXd s = obs.observe_columns(pht) + obs.noise_covariance();
        const Eigen::MatrixXd gain = detail::kalman_gain(pht, s);

        const auto m = static_cast<Eigen::Index>(obs.dim());
        const double noise_sd = std::sqrt(obs.variance());
        std::normal_distribution<double> normal(0.0, 1.0);
        const Eigen::MatrixXd y_forecast = obs.observe_columns(forecast);
        for (Eigen::Index k = 0; k < members; ++k) {
            Eigen::VectorXd perturbed(m);
            for (Eigen::Index c = 0; c < m; ++c) perturbed[c] = (*y_obs)[c] + noise_sd * normal(rng);
            forecast.col(k) += gain * (perturbed - y_forecast.col(k));
        }
        diag.innovation_norm = (*y_obs - obs.observe(mean)).norm();
        diag.observed = true;
    }

    next.members = std::move(forecast);
    diag.evaluations = model.evaluations() - evals_before;
    return next;
}

}  // namespace sparsekf
