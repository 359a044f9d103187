#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sparsekf/core/sparse.hpp"
#include "sparsekf/models/component_model.hpp"

namespace sparsekf {

/// x(k) = A x(k-1). Used as an exactly solvable reference system.
///
/// Only the unrefined step is defined (np == 1).
class LinearModel {
public:
    explicit LinearModel(Eigen::MatrixXd a) : a_(std::move(a)) {
        if (a_.rows() != a_.cols() || a_.rows() == 0) {
            throw std::invalid_argument("LinearModel: transition matrix must be square and non-empty");
        }
    }

    const Eigen::MatrixXd& matrix() const { return a_; }
    std::size_t dim() const { return static_cast<std::size_t>(a_.rows()); }
    std::uint64_t evaluations() const { return counter_.count(); }

    Eigen::VectorXd step(const Eigen::VectorXd& x) const {
        check_dim(x);
        counter_.add(dim());
        Eigen::VectorXd y(a_.rows());
        for (Eigen::Index i = 0; i < a_.rows(); ++i) y[i] = row_value(x, i);
        return y;
    }

    SparseVector step_components(const Eigen::VectorXd& x, std::span<const Index> out) const {
        check_dim(x);
        counter_.add(out.size());
        std::vector<Index> idx(out.begin(), out.end());
        std::vector<double> val(out.size());
        for (std::size_t k = 0; k < out.size(); ++k) val[k] = row_value(x, static_cast<Eigen::Index>(out[k]));
        return SparseVector(dim(), std::move(idx), std::move(val));
    }

    SparseVector step_components(const SparseVector& x, std::span<const Index> out) const {
        for (Index i : out) {
            for (Index j : dependency_stencil(i)) {
                if (!x.contains(j)) {
                    throw std::invalid_argument("LinearModel::step_components: input does not cover dependency stencil");
                }
            }
        }
        return step_components(x.to_dense(), out);
    }

    Eigen::VectorXd refined_step(const Eigen::VectorXd& x, int substeps, int np) const {
        if (np != 1) throw std::invalid_argument("LinearModel: refined steps are not defined");
        Eigen::VectorXd y = x;
        for (int s = 0; s < substeps; ++s) y = step(y);
        return y;
    }

    SparseVector refined_step_components(const Eigen::VectorXd& x, std::span<const Index> out, int np) const {
        if (np != 1) throw std::invalid_argument("LinearModel: refined steps are not defined");
        return step_components(x, out);
    }

    /// Nonzero columns of row i.
    std::vector<Index> dependency_stencil(Index i) const {
        std::vector<Index> s;
        for (Eigen::Index j = 0; j < a_.cols(); ++j) {
            if (a_(static_cast<Eigen::Index>(i), j) != 0.0) s.push_back(static_cast<Index>(j));
        }
        return s;
    }

private:
    double row_value(const Eigen::VectorXd& x, Eigen::Index i) const {
        double s = 0.0;
        for (Eigen::Index j = 0; j < a_.cols(); ++j) s += a_(i, j) * x[j];
        return s;
    }

    void check_dim(const Eigen::VectorXd& x) const {
        if (x.size() != a_.rows()) throw std::invalid_argument("LinearModel: state dimension mismatch");
    }

    Eigen::MatrixXd a_;
    EvaluationCounter counter_;
};

static_assert(ComponentModel<LinearModel>);

}  // namespace sparsekf
