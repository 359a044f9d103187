#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "sparsekf/filters/dense_ukf.hpp"
#include "sparsekf/filters/enkf.hpp"
#include "sparsekf/filters/progressive_ekf.hpp"
#include "sparsekf/filters/sparse_ukf.hpp"
#include "sparsekf/harness/config.hpp"
#include "sparsekf/harness/statistics.hpp"
#include "sparsekf/models/lorenz96.hpp"
#include "sparsekf/models/observation.hpp"

namespace sparsekf {

/// Independent random streams of one replicate.
enum class RngStream : std::uint32_t { truth = 1, observations = 2, initial = 3, filter = 4 };

inline std::mt19937_64 make_rng(std::uint64_t seed, std::size_t replicate, RngStream stream) {
    const auto rep = static_cast<std::uint64_t>(replicate);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

inline Lorenz96 make_model(const ExperimentConfig& c) { return Lorenz96({c.n, c.forcing, c.dt}); }

inline ObservationOperator make_observation_operator(const ExperimentConfig& c) {
    return ObservationOperator::every(c.n, c.obs_stride, c.obs_variance);
}

/// Truth trajectory x(0..steps), x(0) uniform on [-init_range, init_range]^n.
inline std::vector<Eigen::VectorXd> generate_truth(const ExperimentConfig& c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(-c.init_range, c.init_range);
    std::vector<Eigen::VectorXd> traj;
    traj.reserve(c.steps + 1);
    Eigen::VectorXd x(static_cast<Eigen::Index>(c.n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = uniform(rng);
    traj.push_back(x);
    for (std::size_t k = 1; k <= c.steps; ++k) traj.push_back(rk4_step(traj.back(), c.dt, c.forcing));
    return traj;
}

inline std::vector<Eigen::VectorXd> generate_truth(const ExperimentConfig& c, std::size_t replicate) {
    auto rng = make_rng(c.seed, replicate, RngStream::truth);
    return generate_truth(c, rng);
}

/// y(k) = H x(k) + N(0, R) at every obs_interval-th cycle; entry 0 is never observed.
inline std::vector<Observation> synthesize_observations(const std::vector<Eigen::VectorXd>& truth,
                                                        const ObservationOperator& obs, std::size_t interval,
                                                        std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(obs.variance());
    std::vector<Observation> out(truth.size());
    for (std::size_t k = 1; k < truth.size(); ++k) {
        if (k % interval != 0) continue;
        Eigen::VectorXd y = obs.observe(truth[k]);
        for (Eigen::Index c = 0; c < y.size(); ++c) y[c] += sd * normal(rng);
        out[k] = std::move(y);
    }
    return out;
}

struct ReplicateResult {
    std::size_t replicate = 0;
    double rmse = 0.0;
    double eval_per_cycle = 0.0;
    std::size_t gamma_activations = 0;
    std::size_t jitter_activations = 0;
    bool failed = false;
    std::string error;
};

/// Called after the initial state (k = 0) and after every cycle.
using CycleObserver = std::function<void(std::size_t cycle, const Eigen::VectorXd& analysis,
                                         const Eigen::VectorXd& truth, const CycleDiagnostics& diag)>;

namespace detail {

inline Eigen::VectorXd gaussian_vector(Eigen::Index n, double variance, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(variance);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = sd * normal(rng);
    return v;
}

}  // namespace detail

/// Runs one twin experiment replicate and scores it by RMSE over cycles 0..steps.
inline ReplicateResult run_replicate(const ExperimentConfig& c, std::size_t replicate,
                                     const CycleObserver& observer = {}) {
    c.validate();
    ReplicateResult result;
    result.replicate = replicate;

    const auto truth = generate_truth(c, replicate);
    const Lorenz96 model = make_model(c);
    const ObservationOperator obs = make_observation_operator(c);
    auto obs_rng = make_rng(c.seed, replicate, RngStream::observations);
    const auto observations = synthesize_observations(truth, obs, c.obs_interval, obs_rng);

    auto init_rng = make_rng(c.seed, replicate, RngStream::initial);
    const auto ne = static_cast<Eigen::Index>(c.n);
    const Eigen::VectorXd xa0 = truth[0] + detail::gaussian_vector(ne, c.init_variance, init_rng);

    double squared_error = 0.0;
    std::uint64_t evaluations = 0;
    auto record = [&](std::size_t k, const Eigen::VectorXd& xa, const CycleDiagnostics& diag) {
        if (!xa.allFinite()) throw NumericalError("analysis became non-finite at cycle " + std::to_string(k));
        squared_error += (xa - truth[k]).squaredNorm();
        evaluations += diag.evaluations;
        if (diag.gamma > 0.0) ++result.gamma_activations;
        if (diag.jitter > 0.0) ++result.jitter_activations;
        if (observer) observer(k, xa, truth[k], diag);
    };

    try {
        switch (c.filter) {
            case FilterKind::sparse_ukf:
            case FilterKind::progressive_ekf: {
                const SparsityPattern pattern = c.pattern();
                FilterState state{xa0, SparseSymMatrix::scaled_identity(pattern, c.init_variance), {}};
                record(0, state.xa, state.diagnostics);
                const UkfParams ukf{pattern, c.kappa, c.q};
                const ProgressiveParams pekf{pattern, c.delta, c.np, c.q};
                for (std::size_t k = 1; k <= c.steps; ++k) {
                    state = c.filter == FilterKind::sparse_ukf
                                ? sparse_ukf_cycle(state, observations[k], model, obs, ukf)
                                : progressive_ekf_cycle(state, observations[k], model, obs, pekf);
                    record(k, state.xa, state.diagnostics);
                }
                break;
            }
            case FilterKind::dense_ukf: {
                DenseFilterState state{xa0, c.init_variance * Eigen::MatrixXd::Identity(ne, ne), {}};
                record(0, state.xa, state.diagnostics);
                const DenseUkfParams params{c.kappa, c.q};
                for (std::size_t k = 1; k <= c.steps; ++k) {
                    state = dense_ukf_cycle(state, observations[k], model, obs, params);
                    record(k, state.xa, state.diagnostics);
                }
                break;
            }
            case FilterKind::enkf: {
                const auto members = static_cast<Eigen::Index>(c.ensemble);
                EnsembleState state;
                state.members.resize(ne, members);
                for (Eigen::Index m = 0; m < members; ++m) {
                    state.members.col(m) = xa0 + detail::gaussian_vector(ne, c.init_variance, init_rng);
                }
                record(0, xa0, state.diagnostics);
                auto filter_rng = make_rng(c.seed, replicate, RngStream::filter);
                const EnkfParams params{c.ensemble, c.radius, c.inflation};
                for (std::size_t k = 1; k <= c.steps; ++k) {
                    state = enkf_cycle(state, observations[k], model, obs, params, filter_rng);
                    record(k, state.mean(), state.diagnostics);
                }
                break;
            }
        }
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        result.failed = true;
        result.error = e.what();
        result.rmse = std::numeric_limits<double>::quiet_NaN();
        return result;
    }

    result.rmse = std::sqrt(squared_error / (static_cast<double>(c.n) * static_cast<double>(c.steps + 1)));
    result.eval_per_cycle = static_cast<double>(evaluations) / static_cast<double>(c.steps);
    return result;
}

struct RunSummary {
    ExperimentConfig config;
    std::vector<ReplicateResult> replicates;  ///< in replicate order
    Statistics rmse;                          ///< over non-failed replicates; count 0 if all failed
    std::size_t failed = 0;
    double eval_per_cycle = 0.0;
    double gamma_rate = 0.0;   ///< fraction of cycles that needed the gamma shift
    double jitter_rate = 0.0;  ///< fraction of cycles that needed Cholesky jitter
};

/// Worker count from SPARSEKF_THREADS, else the available parallelism.
inline std::size_t default_worker_count() {
    if (const char* env = std::getenv("SPARSEKF_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Aggregates replicate results; order of `results` must be by replicate index.
inline RunSummary aggregate(const ExperimentConfig& c, std::vector<ReplicateResult> results) {
    RunSummary s;
    s.config = c;
    s.replicates = std::move(results);
    std::vector<double> rmses;
    double evals = 0.0, gammas = 0.0, jitters = 0.0;
    for (const auto& r : s.replicates) {
        if (r.failed) {
            ++s.failed;
            continue;
        }
        rmses.push_back(r.rmse);
        evals += r.eval_per_cycle;
        gammas += static_cast<double>(r.gamma_activations);
        jitters += static_cast<double>(r.jitter_activations);
    }
    if (!rmses.empty()) {
        s.rmse = summarize(rmses);
        const auto ok = static_cast<double>(rmses.size());
        s.eval_per_cycle = evals / ok;
        s.gamma_rate = gammas / (ok * static_cast<double>(c.steps));
        s.jitter_rate = jitters / (ok * static_cast<double>(c.steps));
    }
    return s;
}

/// Runs all replicates on a bounded worker pool. The result does not depend
/// on the schedule: each replicate owns its random streams.
inline RunSummary run_experiment(const ExperimentConfig& c, std::size_t workers = 0) {
    c.validate();
    if (workers == 0) workers = default_worker_count();
    workers = std::min(workers, c.replicates);

    std::vector<ReplicateResult> results(c.replicates);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> errored{false};
    auto work = [&] {
        for (std::size_t r = next++; r < c.replicates; r = next++) {
            try {
                results[r] = run_replicate(c, r);
            } catch (...) {
                if (!errored.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    if (first_error) std::rethrow_exception(first_error);
    return aggregate(c, std::move(results));
}

}  // namespace sparsekf
