#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "sparsekf/core/linalg.hpp"
#include "sparsekf/filters/state.hpp"
#include "sparsekf/models/component_model.hpp"
#include "sparsekf/models/observation.hpp"

namespace sparsekf {

struct ProgressiveParams {
    SparsityPattern pattern;
    double delta = 1e-4;  ///< finite-difference step along covariance columns
    int substeps = 1;     ///< inner-loop refinement n_p
    double q = 0.0;       ///< model error covariance Q = q * I
    double positivity_floor = kPositivityFloor;
};

/// One covariance propagation over a (sub-)step from `base` to `next_base`.
///
/// Column j of G is the secant (M(base + delta P_j) - M(base)) / delta on
/// pattern column j; the propagated covariance is G + G^T - P on the pattern.
template <ComponentModel Model>
SparseSymMatrix progressive_propagate(const SparseSymMatrix& p, const Eigen::VectorXd& base,
                                      const Eigen::VectorXd& next_base, const Model& model, double delta,
                                      int substeps) {
    const SparsityPattern& pattern = p.pattern();
    const std::size_t n = pattern.dim();
    const std::size_t nsp = pattern.nonzeros_per_column();

    SparseColumns secant(pattern);
    for (Index j = 0; j < n; ++j) {
        Eigen::VectorXd probe = base;
        for (std::size_t pos = 0; pos < nsp; ++pos) {
            const Index i = pattern.row_at(j, pos);
            probe[static_cast<Eigen::Index>(i)] += delta * p(i, j);
        }
        const auto column = pattern.column(j);
        const SparseVector out = model.refined_step_components(probe, column, substeps);
        for (std::size_t pos = 0; pos < nsp; ++pos) {
            const Index i = column[pos];
            secant.at_position(j, pos) = (out[i] - next_base[static_cast<Eigen::Index>(i)]) / delta;
        }
    }

    SparseSymMatrix next(pattern);
    next.for_each_slot([&](Index i, Index j, double& v) { v = secant(i, j) + secant(j, i) - p(i, j); });
    return next;
}

/// One cycle of the progressive extended Kalman filter.
///
/// With substeps = n_p > 1 the forecast runs n_p refined sub-steps of dt/n_p
/// and the covariance is propagated along each of them; Q is added once after
/// the last sub-step.
template <ComponentModel Model>
FilterState progressive_ekf_cycle(const FilterState& state, const Observation& y_obs, const Model& model,
                                  const ObservationOperator& obs, const ProgressiveParams& params) {
    const SparsityPattern& pattern = params.pattern;
    const std::size_t n = pattern.dim();
    if (model.dim() != n || static_cast<std::size_t>(state.xa.size()) != n || !(state.pa.pattern() == pattern) ||
        obs.state_dim() != n) {
        throw std::invalid_argument("progressive_ekf_cycle: dimension or pattern mismatch");
    }
    if (!(params.delta > 0.0)) throw std::invalid_argument("progressive_ekf_cycle: delta must be positive");
    if (params.substeps < 1) throw std::invalid_argument("progressive_ekf_cycle: substeps must be >= 1");

    FilterState next;
    CycleDiagnostics& diag = next.diagnostics;
    const auto evals_before = model.evaluations();

    Eigen::VectorXd base = state.xa;
    SparseSymMatrix p = state.pa;
    for (int s = 0; s < params.substeps; ++s) {
        Eigen::VectorXd next_base = model.refined_step(base, 1, params.substeps);
        p = progressive_propagate(p, base, next_base, model, params.delta, params.substeps);
        base = std::move(next_base);
    }
    if (params.q != 0.0) p.add_to_diagonal(params.q);
    const Eigen::VectorXd& xb = base;

    if (!y_obs) {
        next.xa = xb;
        next.pa = std::move(p);
    } else {
        if (y_obs->size() != static_cast<Eigen::Index>(obs.dim())) {
            throw std::invalid_argument("progressive_ekf_cycle: observation dimension mismatch");
        }
        const auto& observed = obs.indices();
        const auto m = static_cast<Eigen::Index>(observed.size());
        const auto ne = static_cast<Eigen::Index>(n);
        // P H^T: the covariance columns at the observed indices.
        Eigen::MatrixXd pht(ne, m);
        for (Eigen::Index c = 0; c < m; ++c) pht.col(c) = p.column(observed[static_cast<std::size_t>(c)]);
        const Eigen::MatrixXd s = obs.observe_columns(pht) + obs.noise_covariance();

        const Eigen::MatrixXd gain = detail::kalman_gain(pht, s);
        const Eigen::VectorXd innovation = *y_obs - obs.observe(xb);
        next.xa = xb + gain * innovation;
        next.pa = p - restricted_product(gain, pht.transpose(), pattern);
        diag.innovation_norm = innovation.norm();
        diag.observed = true;
    }

    restore_positivity(next.pa, diag, params.positivity_floor);
    diag.evaluations = model.evaluations() - evals_before;
    return next;
}

}  // namespace sparsekf
