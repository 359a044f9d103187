#pragma once

// Reference computations used only by tests. None of these share code paths
// with the library routines they check.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Textbook dense Cholesky (row-oriented, no pivoting); returns lower factor.
inline Eigen::MatrixXd cholesky(const Eigen::MatrixXd& a) {
    const auto n = a.rows();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("oracle::cholesky: not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

/// Cyclic Jacobi eigenvalue iteration; returns the smallest eigenvalue.
inline double jacobi_min_eigenvalue(Eigen::MatrixXd a) {
    const auto n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    double m = a(0, 0);
    for (Eigen::Index i = 1; i < n; ++i) m = std::min(m, a(i, i));
    return m;
}

/// Weighted outer-product sum computed as a plain triple loop.
inline Eigen::MatrixXd outer_sum(const Eigen::MatrixXd& cols, const Eigen::VectorXd& w) {
    const auto n = cols.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < cols.cols(); ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) out(i, j) += w[k] * cols(i, k) * cols(j, k);
    return out;
}

/// Zero every entry whose cyclic distance exceeds h.
inline Eigen::MatrixXd band_mask(Eigen::MatrixXd a, long h) {
    const long n = a.rows();
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            const long d = std::min(std::labs(i - j), n - std::labs(i - j));
            if (d > h) a(i, j) = 0.0;
        }
    return a;
}

/// Scalar Kalman filter for x(k) = a x(k-1) + w, y = x + v.
struct ScalarKalman {
    double a, q, r;
    double x, p;

    void cycle(double y) {
        const double xb = a * x;
        const double pb = a * a * p + q;
        const double k = pb / (pb + r);
        x = xb + k * (y - xb);
        p = (1.0 - k) * pb;
    }
};

/// Lorenz-96 tendency written straight from the 1-based formula.
inline std::vector<double> lorenz96_tendency(const std::vector<double>& x, double forcing) {
    const long n = static_cast<long>(x.size());
    auto at = [&](long i1) { return x[static_cast<std::size_t>(((i1 - 1) % n + n) % n)]; };
    std::vector<double> r(x.size());
    for (long i = 1; i <= n; ++i) r[static_cast<std::size_t>(i - 1)] = (at(i + 1) - at(i - 2)) * at(i - 1) - at(i) + forcing;
    return r;
}

inline Eigen::MatrixXd random_spd(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd b(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) b(i, j) = g(rng);
    return b * b.transpose() + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
}

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
}

}  // namespace oracle
