#pragma once

#include <atomic>
#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sparsekf/core/sparse.hpp"

namespace sparsekf {

/// Running tally of scalar model outputs evaluated. Copies carry the current count.
class EvaluationCounter {
public:
    EvaluationCounter() = default;
    EvaluationCounter(const EvaluationCounter& other) : count_(other.count()) {}
    EvaluationCounter& operator=(const EvaluationCounter& other) {
        count_.store(other.count(), std::memory_order_relaxed);
        return *this;
    }

    void add(std::uint64_t k) const { count_.fetch_add(k, std::memory_order_relaxed); }
    std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }
    void reset() const { count_.store(0, std::memory_order_relaxed); }

private:
    mutable std::atomic<std::uint64_t> count_{0};
};

/// A discrete model that can evaluate any subset of its output entries.
///
/// `refined_step(x, s, np)` advances s sub-steps of length dt/np;
/// `refined_step_components(x, out, np)` evaluates one such sub-step at `out` only.
/// step_components(x, out) must equal step(x) restricted to `out`.
template <class M>
concept ComponentModel = requires(const M& m, const Eigen::VectorXd& x, const SparseVector& xs,
                                  std::span<const Index> out, int s, int np, Index i) {
    { m.dim() } -> std::convertible_to<std::size_t>;
    { m.step(x) } -> std::same_as<Eigen::VectorXd>;
    { m.step_components(x, out) } -> std::same_as<SparseVector>;
    { m.step_components(xs, out) } -> std::same_as<SparseVector>;
    { m.refined_step(x, s, np) } -> std::same_as<Eigen::VectorXd>;
    { m.refined_step_components(x, out, np) } -> std::same_as<SparseVector>;
    { m.dependency_stencil(i) } -> std::same_as<std::vector<Index>>;
    { m.evaluations() } -> std::same_as<std::uint64_t>;
};

}  // namespace sparsekf
