#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sparsekf/core/pattern.hpp"

namespace sparsekf {

/// Linear selection of state entries with noise covariance R = variance * I.
class ObservationOperator {
public:
    ObservationOperator(std::size_t n, std::vector<Index> indices, double variance = 1.0)
        : n_(n), indices_(std::move(indices)), variance_(variance) {
        if (indices_.empty()) throw std::invalid_argument("ObservationOperator: no observed indices");
        for (Index i : indices_) {
            if (i >= n_) throw std::out_of_range("ObservationOperator: observed index out of range");
        }
        if (!(variance_ >= 0.0)) throw std::invalid_argument("ObservationOperator: variance must be non-negative");
    }

    /// Observes entries 0, stride, 2*stride, ... (1, 3, 5, ... in 1-based numbering for stride 2).
    static ObservationOperator every(std::size_t n, std::size_t stride, double variance = 1.0) {
        if (stride == 0) throw std::invalid_argument("ObservationOperator: stride must be positive");
        std::vector<Index> idx;
        for (Index i = 0; i < n; i += stride) idx.push_back(i);
        return ObservationOperator(n, std::move(idx), variance);
    }

    std::size_t state_dim() const { return n_; }
    std::size_t dim() const { return indices_.size(); }
    const std::vector<Index>& indices() const { return indices_; }
    double variance() const { return variance_; }

    Eigen::VectorXd observe(const Eigen::VectorXd& x) const {
        if (static_cast<std::size_t>(x.size()) != n_) {
            throw std::invalid_argument("ObservationOperator: state dimension mismatch");
        }
        Eigen::VectorXd y(static_cast<Eigen::Index>(dim()));
        for (std::size_t k = 0; k < dim(); ++k) y[static_cast<Eigen::Index>(k)] = x[static_cast<Eigen::Index>(indices_[k])];
        return y;
    }

    /// Rows of `xs` (n x K) selected at the observed indices: m x K.
    Eigen::MatrixXd observe_columns(const Eigen::MatrixXd& xs) const {
        Eigen::MatrixXd y(static_cast<Eigen::Index>(dim()), xs.cols());
        for (std::size_t k = 0; k < dim(); ++k) {
            y.row(static_cast<Eigen::Index>(k)) = xs.row(static_cast<Eigen::Index>(indices_[k]));
        }
        return y;
    }

    Eigen::MatrixXd jacobian() const {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(n_));
        for (std::size_t k = 0; k < dim(); ++k) h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(indices_[k])) = 1.0;
        return h;
    }

    Eigen::MatrixXd noise_covariance() const {
        const auto m = static_cast<Eigen::Index>(dim());
        return variance_ * Eigen::MatrixXd::Identity(m, m);
    }

private:
    std::size_t n_;
    std::vector<Index> indices_;
    double variance_;
};

}  // namespace sparsekf
