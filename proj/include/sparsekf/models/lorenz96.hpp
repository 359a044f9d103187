#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sparsekf/core/sparse.hpp"
#include "sparsekf/models/component_model.hpp"

namespace sparsekf {

struct Lorenz96Config {
    std::size_t n = 40;
    double forcing = 8.0;
    double dt = 0.025;
};

namespace detail {

inline Index wrap(long i, std::size_t n) {
    const auto n_l = static_cast<long>(n);
    long r = i % n_l;
    if (r < 0) r += n_l;
    return static_cast<Index>(r);
}

// dx_i/dt = (x_{i+1} - x_{i-2}) x_{i-1} - x_i + F, cyclic.
inline double l96_rate(const double* x, std::size_t n, Index i, double forcing) {
    const auto il = static_cast<long>(i);
    return (x[wrap(il + 1, n)] - x[wrap(il - 2, n)]) * x[wrap(il - 1, n)] - x[i] + forcing;
}

// Indices whose one-stage rate depends on nothing outside `set`'s neighbourhood:
// set + {-2, -1, 0, +1}, cyclic, sorted, unique.
inline std::vector<Index> widen_stage(std::span<const Index> set, std::size_t n) {
    std::vector<Index> out;
    out.reserve(set.size() + 3);
    for (Index i : set) {
        for (long o = -2; o <= 1; ++o) out.push_back(wrap(static_cast<long>(i) + o, n));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline void require_l96_dim(std::size_t n) {
    if (n < 4) throw std::invalid_argument("Lorenz-96 requires n >= 4");
}

// One RK4 step evaluated only on `out`. `x` must be valid on the input stencil
// of `out`; other entries are never read. Stage arithmetic matches rk4_step
// entry for entry, so the result is bit-identical to the full step.
inline SparseVector rk4_components(const double* x, std::size_t n, std::span<const Index> out, double dt,
                                   double forcing) {
    const std::vector<Index> w3 = widen_stage(out, n);
    const std::vector<Index> w2 = widen_stage(w3, n);
    const std::vector<Index> w1 = widen_stage(w2, n);
    const double half = 0.5 * dt;
    const double h6 = dt / 6.0;

    std::vector<double> k1(n), k2(n), k3(n), k4(n), xs(n);
    for (Index i : w1) k1[i] = l96_rate(x, n, i, forcing);
    for (Index i : w1) xs[i] = x[i] + half * k1[i];
    for (Index i : w2) k2[i] = l96_rate(xs.data(), n, i, forcing);
    for (Index i : w2) xs[i] = x[i] + half * k2[i];
    for (Index i : w3) k3[i] = l96_rate(xs.data(), n, i, forcing);
    for (Index i : w3) xs[i] = x[i] + dt * k3[i];
    for (Index i : out) k4[i] = l96_rate(xs.data(), n, i, forcing);

    std::vector<Index> idx(out.begin(), out.end());
    std::vector<double> val(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Index i = out[k];
        val[k] = x[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return SparseVector(n, std::move(idx), std::move(val));
}

}  // namespace detail

inline Eigen::VectorXd lorenz96_rhs(const Eigen::VectorXd& x, double forcing) {
    const auto n = static_cast<std::size_t>(x.size());
    detail::require_l96_dim(n);
    Eigen::VectorXd r(x.size());
    for (Index i = 0; i < n; ++i) r[static_cast<Eigen::Index>(i)] = detail::l96_rate(x.data(), n, i, forcing);
    return r;
}

/// Classical fourth-order Runge-Kutta step of the Lorenz-96 system.
inline Eigen::VectorXd rk4_step(const Eigen::VectorXd& x, double dt, double forcing) {
    const auto n = static_cast<std::size_t>(x.size());
    detail::require_l96_dim(n);
    const double half = 0.5 * dt;
    const double h6 = dt / 6.0;
    const double* x0 = x.data();

    std::vector<double> k1(n), k2(n), k3(n), k4(n), xs(n);
    for (Index i = 0; i < n; ++i) k1[i] = detail::l96_rate(x0, n, i, forcing);
    for (Index i = 0; i < n; ++i) xs[i] = x0[i] + half * k1[i];
    for (Index i = 0; i < n; ++i) k2[i] = detail::l96_rate(xs.data(), n, i, forcing);
    for (Index i = 0; i < n; ++i) xs[i] = x0[i] + half * k2[i];
    for (Index i = 0; i < n; ++i) k3[i] = detail::l96_rate(xs.data(), n, i, forcing);
    for (Index i = 0; i < n; ++i) xs[i] = x0[i] + dt * k3[i];
    for (Index i = 0; i < n; ++i) k4[i] = detail::l96_rate(xs.data(), n, i, forcing);

    Eigen::VectorXd y(x.size());
    for (Index i = 0; i < n; ++i) {
        y[static_cast<Eigen::Index>(i)] = x0[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return y;
}

/// Lorenz-96 with an RK4 step as a component-based model.
class Lorenz96 {
public:
    explicit Lorenz96(Lorenz96Config config = {}) : config_(config) {
        detail::require_l96_dim(config_.n);
        if (!(config_.dt >= 0.0)) throw std::invalid_argument("Lorenz96: dt must be non-negative");
    }

    const Lorenz96Config& config() const { return config_; }
    std::size_t dim() const { return config_.n; }
    double dt() const { return config_.dt; }
    std::uint64_t evaluations() const { return counter_.count(); }
    void reset_evaluations() const { counter_.reset(); }

    Eigen::VectorXd step(const Eigen::VectorXd& x) const {
        check_dim(x);
        counter_.add(config_.n);
        return rk4_step(x, config_.dt, config_.forcing);
    }

    SparseVector step_components(const Eigen::VectorXd& x, std::span<const Index> out) const {
        return components(x, out, config_.dt);
    }

    /// Sparse input: its index set must cover the dependency stencil of every output.
    SparseVector step_components(const SparseVector& x, std::span<const Index> out) const {
        if (x.dim() != config_.n) throw std::invalid_argument("Lorenz96: state dimension mismatch");
        for (Index i : input_window(out)) {
            if (!x.contains(i)) {
                throw std::invalid_argument("Lorenz96::step_components: input does not cover dependency stencil");
            }
        }
        return components(x.to_dense(), out, config_.dt);
    }

    Eigen::VectorXd refined_step(const Eigen::VectorXd& x, int substeps, int np) const {
        check_refinement(substeps, np);
        check_dim(x);
        const double h = config_.dt / static_cast<double>(np);
        Eigen::VectorXd y = x;
        for (int s = 0; s < substeps; ++s) y = rk4_step(y, h, config_.forcing);
        counter_.add(static_cast<std::uint64_t>(substeps) * config_.n);
        return y;
    }

    SparseVector refined_step_components(const Eigen::VectorXd& x, std::span<const Index> out, int np) const {
        check_refinement(1, np);
        return components(x, out, config_.dt / static_cast<double>(np));
    }

    /// Inputs needed for output entry i: the cyclic window i-8 .. i+4.
    std::vector<Index> dependency_stencil(Index i) const {
        const Index one[] = {i};
        return input_window(one);
    }

private:
    std::vector<Index> input_window(std::span<const Index> out) const {
        auto w = detail::widen_stage(out, config_.n);
        for (int stage = 0; stage < 3; ++stage) w = detail::widen_stage(w, config_.n);
        return w;
    }

    SparseVector components(const Eigen::VectorXd& x, std::span<const Index> out, double dt) const {
        check_dim(x);
        for (Index i : out) {
            if (i >= config_.n) throw std::out_of_range("Lorenz96: output index out of range");
        }
        counter_.add(out.size());
        return detail::rk4_components(x.data(), config_.n, out, dt, config_.forcing);
    }

    void check_dim(const Eigen::VectorXd& x) const {
        if (static_cast<std::size_t>(x.size()) != config_.n) {
            throw std::invalid_argument("Lorenz96: state dimension mismatch");
        }
    }

    static void check_refinement(int substeps, int np) {
        if (np < 1 || substeps < 0) throw std::invalid_argument("Lorenz96: invalid refinement");
    }

    Lorenz96Config config_;
    EvaluationCounter counter_;
};

static_assert(ComponentModel<Lorenz96>);

}  // namespace sparsekf
