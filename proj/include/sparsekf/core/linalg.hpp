#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "sparsekf/core/sparse.hpp"

namespace sparsekf {

/// A numerical step (factorization, solve) that could not be completed.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pattern-restricted weighted outer-product sum.
///
/// result(i,j) = sum_k w_k c_k[i] c_k[j] for admissible (i,j); `columns` holds
/// the vectors c_k as its columns.
inline SparseSymMatrix restricted_outer_accumulate(const Eigen::MatrixXd& columns,
                                                   const Eigen::VectorXd& weights,
                                                   const SparsityPattern& pattern) {
    if (columns.rows() != static_cast<Eigen::Index>(pattern.dim())) {
        throw std::invalid_argument("restricted_outer_accumulate: row count differs from pattern dimension");
    }
    if (columns.cols() != weights.size()) {
        throw std::invalid_argument("restricted_outer_accumulate: weight count differs from column count");
    }
    // Rows of `columns` become contiguous columns here.
    const Eigen::MatrixXd rows = columns.transpose();
    const Eigen::MatrixXd weighted_rows = weights.asDiagonal() * rows;
    SparseSymMatrix out(pattern);
    out.for_each_slot([&](Index i, Index j, double& v) {
        v = weighted_rows.col(static_cast<Eigen::Index>(i)).dot(rows.col(static_cast<Eigen::Index>(j)));
    });
    return out;
}

/// Pattern-restricted symmetrized product of a (n x m) and b (m x n).
inline SparseSymMatrix restricted_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                          const SparsityPattern& pattern) {
    const auto n = static_cast<Eigen::Index>(pattern.dim());
    if (a.rows() != n || b.cols() != n || a.cols() != b.rows()) {
        throw std::invalid_argument("restricted_product: dimension mismatch");
    }
    SparseSymMatrix out(pattern);
    out.for_each_slot([&](Index i, Index j, double& v) {
        const auto ie = static_cast<Eigen::Index>(i);
        const auto je = static_cast<Eigen::Index>(j);
        v = 0.5 * (a.row(ie).dot(b.col(je)) + a.row(je).dot(b.col(ie)));
    });
    return out;
}

/// Doublings of the Cholesky jitter, starting from 1e-10, before giving up.
inline constexpr int kMaxJitterRetries = 40;

struct IncompleteCholesky {
    SparseColumns factor;
    double jitter = 0.0;  ///< diagonal shift that was needed, 0 on first success
};

namespace detail {

// Zero-fill factorization of scale*(P + jitter*I) in natural order. Returns
// false on a non-positive pivot.
inline bool zero_fill_cholesky(const SparseSymMatrix& p, double scale, double jitter, SparseColumns& l) {
    const auto& pat = p.pattern();
    const std::size_t n = pat.dim();
    const std::size_t nsp = pat.nonzeros_per_column();
    l = SparseColumns(pat);

    // Row j's entries in columns k < j are found through column j's pattern
    // (the pattern is symmetric).
    for (Index j = 0; j < n; ++j) {
        double diag = scale * (p(j, j) + jitter);
        for (std::size_t pk = 0; pk < nsp; ++pk) {
            const Index k = pat.row_at(j, pk);
            if (k >= j) continue;
            const double ljk = l(j, k);
            diag -= ljk * ljk;
        }
        if (!(diag > 0.0) || !std::isfinite(diag)) return false;
        const double ljj = std::sqrt(diag);
        const std::size_t pos_jj = *pat.position(j, j);
        l.at_position(j, pos_jj) = ljj;

        for (std::size_t pi = 0; pi < nsp; ++pi) {
            const Index i = pat.row_at(j, pi);
            if (i <= j) continue;
            double s = scale * p(i, j);
            for (std::size_t pk = 0; pk < nsp; ++pk) {
                const Index k = pat.row_at(j, pk);
                if (k >= j) continue;
                auto pos_ik = pat.position(i, k);
                if (!pos_ik) continue;
                s -= l.at_position(k, *pos_ik) * l(j, k);
            }
            l.at_position(j, pi) = s / ljj;
        }
    }
    return true;
}

}  // namespace detail

/// Zero-fill incomplete Cholesky factor L of scale*P, with L L^T ~ scale*P.
///
/// The recurrence runs only over pattern entries in natural index order;
/// fill outside the pattern is dropped. On a non-positive pivot the
/// factorization is retried with scale*(P + eps*I), eps doubling from 1e-10,
/// up to kMaxJitterRetries retries.
inline IncompleteCholesky incomplete_cholesky(const SparseSymMatrix& p, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("incomplete_cholesky: scale must be positive");
    IncompleteCholesky out;
    if (detail::zero_fill_cholesky(p, scale, 0.0, out.factor)) return out;
    double eps = 1e-10;
    for (int attempt = 0; attempt < kMaxJitterRetries; ++attempt, eps *= 2.0) {
        if (detail::zero_fill_cholesky(p, scale, eps, out.factor)) {
            out.jitter = eps;
            return out;
        }
    }
    throw NumericalError("incomplete_cholesky: non-positive pivot persists after jitter retries");
}

/// Dense Cholesky with the same jitter schedule; returns the lower factor of scale*A.
inline Eigen::MatrixXd dense_cholesky(const Eigen::MatrixXd& a, double scale, double* jitter_used = nullptr) {
    const auto n = a.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(scale * a);
    double eps = 0.0;
    for (int attempt = 0; llt.info() != Eigen::Success; ++attempt) {
        if (attempt == kMaxJitterRetries) throw NumericalError("dense_cholesky: matrix not positive definite after jitter retries");
        eps = attempt == 0 ? 1e-10 : eps * 2.0;
        llt.compute(scale * (a + eps * Eigen::MatrixXd::Identity(n, n)));
    }
    if (jitter_used) *jitter_used = eps;
    return llt.matrixL();
}

inline double min_eigenvalue(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("min_eigenvalue: eigensolver did not converge");
    return es.eigenvalues().minCoeff();
}

/// Smallest eigenvalue of the full symmetric matrix represented by P (zeros off-pattern).
inline double min_eigenvalue(const SparseSymMatrix& p) { return min_eigenvalue(p.to_dense()); }

}  // namespace sparsekf
