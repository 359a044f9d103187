#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sparsekf/core/pattern.hpp"

namespace sparsekf {

/// Vector of dimension n with values only at an index set; reads elsewhere are zero.
class SparseVector {
public:
    SparseVector() = default;
    explicit SparseVector(std::size_t n) : n_(n) {}

    SparseVector(std::size_t n, std::vector<Index> indices, std::vector<double> values) : n_(n) {
        if (indices.size() != values.size()) {
            throw std::invalid_argument("SparseVector: index and value counts differ");
        }
        std::vector<std::size_t> order(indices.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return indices[a] < indices[b]; });
        indices_.reserve(indices.size());
        values_.reserve(values.size());
        for (auto k : order) {
            if (indices[k] >= n) throw std::out_of_range("SparseVector: index out of range");
            if (!indices_.empty() && indices_.back() == indices[k]) {
                throw std::invalid_argument("SparseVector: duplicate index");
            }
            indices_.push_back(indices[k]);
            values_.push_back(values[k]);
        }
    }

    std::size_t dim() const { return n_; }
    std::size_t nonzeros() const { return indices_.size(); }
    const std::vector<Index>& indices() const { return indices_; }
    const std::vector<double>& values() const { return values_; }

    bool contains(Index i) const { return std::binary_search(indices_.begin(), indices_.end(), i); }

    double operator[](Index i) const {
        auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
        if (it == indices_.end() || *it != i) return 0.0;
        return values_[static_cast<std::size_t>(it - indices_.begin())];
    }

    Eigen::VectorXd to_dense() const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
        for (std::size_t k = 0; k < indices_.size(); ++k) {
            out[static_cast<Eigen::Index>(indices_[k])] = values_[k];
        }
        return out;
    }

private:
    std::size_t n_ = 0;
    std::vector<Index> indices_;
    std::vector<double> values_;
};

/// Merge a sparse vector into a dense one: entries of `x` win on its index set.
inline Eigen::VectorXd merge(const SparseVector& x, const Eigen::VectorXd& y) {
    if (static_cast<Eigen::Index>(x.dim()) != y.size()) {
        throw std::invalid_argument("merge: dimension mismatch");
    }
    Eigen::VectorXd z = y;
    const auto& idx = x.indices();
    const auto& val = x.values();
    for (std::size_t k = 0; k < idx.size(); ++k) z[static_cast<Eigen::Index>(idx[k])] = val[k];
    return z;
}

/// Symmetric matrix stored only on a sparsity pattern, one slot per unordered pair.
class SparseSymMatrix {
public:
    SparseSymMatrix() = default;

    explicit SparseSymMatrix(SparsityPattern pattern)
        : pattern_(std::move(pattern)),
          stride_(static_cast<std::size_t>(pattern_.upper_offset()) + 1),
          values_(pattern_.dim() * stride_, 0.0) {}

    static SparseSymMatrix scaled_identity(const SparsityPattern& pattern, double value) {
        SparseSymMatrix m(pattern);
        m.add_to_diagonal(value);
        return m;
    }

    /// Restriction of a dense symmetric matrix to the pattern (upper/lower average).
    static SparseSymMatrix from_dense(const SparsityPattern& pattern, const Eigen::MatrixXd& a) {
        const auto n = static_cast<Eigen::Index>(pattern.dim());
        if (a.rows() != n || a.cols() != n) {
            throw std::invalid_argument("SparseSymMatrix::from_dense: dimension mismatch");
        }
        SparseSymMatrix m(pattern);
        m.for_each_slot([&](Index i, Index j, double& v) {
            const auto ie = static_cast<Eigen::Index>(i);
            const auto je = static_cast<Eigen::Index>(j);
            v = 0.5 * (a(ie, je) + a(je, ie));
        });
        return m;
    }

    const SparsityPattern& pattern() const { return pattern_; }
    std::size_t dim() const { return pattern_.dim(); }
    std::size_t storage_size() const { return values_.size(); }

    double operator()(Index i, Index j) const {
        auto s = slot(i, j);
        return s ? values_[*s] : 0.0;
    }

    void set(Index i, Index j, double v) { values_[checked_slot(i, j)] = v; }
    void add(Index i, Index j, double v) { values_[checked_slot(i, j)] += v; }

    void add_to_diagonal(double v) {
        for (Index i = 0; i < dim(); ++i) values_[i * stride_] += v;
    }

    /// Visit every stored unordered pair once as (i, j, value&) with (i,j) canonical.
    template <class Fn>
    void for_each_slot(Fn&& fn) {
        visit_slots([&](Index i, Index j, std::size_t s) { fn(i, j, values_[s]); });
    }

    template <class Fn>
    void for_each_slot(Fn&& fn) const {
        visit_slots([&](Index i, Index j, std::size_t s) { fn(i, j, values_[s]); });
    }

    /// Column j of the represented matrix as a dense vector.
    Eigen::VectorXd column(Index j) const {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
        for (std::size_t p = 0; p < pattern_.nonzeros_per_column(); ++p) {
            const Index i = pattern_.row_at(j, p);
            c[static_cast<Eigen::Index>(i)] = (*this)(i, j);
        }
        return c;
    }

    Eigen::MatrixXd to_dense() const {
        const auto n = static_cast<Eigen::Index>(dim());
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for_each_slot([&](Index i, Index j, double v) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        });
        return a;
    }

    SparseSymMatrix& operator+=(const SparseSymMatrix& other) {
        require_same_pattern(other);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
        return *this;
    }

    SparseSymMatrix& operator-=(const SparseSymMatrix& other) {
        require_same_pattern(other);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
        return *this;
    }

    friend SparseSymMatrix operator+(SparseSymMatrix a, const SparseSymMatrix& b) { return a += b; }
    friend SparseSymMatrix operator-(SparseSymMatrix a, const SparseSymMatrix& b) { return a -= b; }

private:
    // Canonical slot: the column is the endpoint from which the other lies at a
    // non-negative offset. At offset n/2 (even n, full pattern) both endpoints
    // qualify and the smaller index is used.
    std::optional<std::size_t> slot(Index i, Index j) const {
        if (i >= dim() || j >= dim()) return std::nullopt;
        auto o = pattern_.offset(i, j);
        if (!o) return std::nullopt;
        long off = *o;
        Index col = j;
        if (off < 0) {
            off = -off;
            col = i;
        } else if (2 * static_cast<std::size_t>(off) == dim()) {
            col = std::min(i, j);
        }
        return col * stride_ + static_cast<std::size_t>(off);
    }

    std::size_t checked_slot(Index i, Index j) const {
        auto s = slot(i, j);
        if (!s) throw std::out_of_range("SparseSymMatrix: entry outside sparsity pattern");
        return *s;
    }

    template <class Fn>
    void visit_slots(Fn&& fn) const {
        const std::size_t n = dim();
        const auto hi = static_cast<std::size_t>(pattern_.upper_offset());
        for (Index j = 0; j < n; ++j) {
            for (std::size_t off = 0; off <= hi; ++off) {
                const Index i = (j + off) % n;
                if (2 * off == n && j > i) continue;
                fn(i, j, j * stride_ + off);
            }
        }
    }

    void require_same_pattern(const SparseSymMatrix& other) const {
        if (!(pattern_ == other.pattern_)) {
            throw std::invalid_argument("SparseSymMatrix: pattern mismatch");
        }
    }

    SparsityPattern pattern_;
    std::size_t stride_ = 0;
    std::vector<double> values_;
};

/// n sparse columns sharing a pattern; column j is nonzero only at pattern column j.
class SparseColumns {
public:
    SparseColumns() = default;

    explicit SparseColumns(SparsityPattern pattern)
        : pattern_(std::move(pattern)),
          nsp_(pattern_.nonzeros_per_column()),
          values_(pattern_.dim() * nsp_, 0.0) {}

    const SparsityPattern& pattern() const { return pattern_; }
    std::size_t dim() const { return pattern_.dim(); }

    double operator()(Index i, Index j) const {
        auto p = pattern_.position(i, j);
        return p ? values_[j * nsp_ + *p] : 0.0;
    }

    double& at_position(Index j, std::size_t pos) { return values_[j * nsp_ + pos]; }
    double at_position(Index j, std::size_t pos) const { return values_[j * nsp_ + pos]; }

    void set(Index i, Index j, double v) {
        auto p = pattern_.position(i, j);
        if (!p) throw std::out_of_range("SparseColumns: entry outside sparsity pattern");
        values_[j * nsp_ + *p] = v;
    }

    /// Adds `scale` times column j into the dense vector `x`.
    void axpy_column(Index j, double scale, Eigen::VectorXd& x) const {
        for (std::size_t p = 0; p < nsp_; ++p) {
            x[static_cast<Eigen::Index>(pattern_.row_at(j, p))] += scale * values_[j * nsp_ + p];
        }
    }

    Eigen::MatrixXd to_dense() const {
        const auto n = static_cast<Eigen::Index>(dim());
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (Index j = 0; j < dim(); ++j) {
            for (std::size_t p = 0; p < nsp_; ++p) {
                a(static_cast<Eigen::Index>(pattern_.row_at(j, p)), static_cast<Eigen::Index>(j)) =
                    values_[j * nsp_ + p];
            }
        }
        return a;
    }

private:
    SparsityPattern pattern_;
    std::size_t nsp_ = 0;
    std::vector<double> values_;
};

}  // namespace sparsekf
