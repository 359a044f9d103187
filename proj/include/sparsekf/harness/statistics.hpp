#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sparsekf {

/// Boxplot-style summary of a sample.
struct Statistics {
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation, N-1 denominator
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double lower_whisker = 0.0;  ///< smallest value >= q1 - 1.5 iqr
    double upper_whisker = 0.0;  ///< largest value <= q3 + 1.5 iqr
    double min = 0.0;
    double max = 0.0;
};

/// Quantile by linear interpolation between order statistics of a sorted sample.
inline double sorted_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("sorted_quantile: empty sample");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline Statistics summarize(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    Statistics s;
    s.count = sorted.size();
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    s.median = sorted_quantile(sorted, 0.5);
    s.q1 = sorted_quantile(sorted, 0.25);
    s.q3 = sorted_quantile(sorted, 0.75);
    s.iqr = s.q3 - s.q1;
    s.min = sorted.front();
    s.max = sorted.back();
    const double lo_fence = s.q1 - 1.5 * s.iqr;
    const double hi_fence = s.q3 + 1.5 * s.iqr;
    s.lower_whisker = *std::lower_bound(sorted.begin(), sorted.end(), lo_fence);
    s.upper_whisker = *(std::upper_bound(sorted.begin(), sorted.end(), hi_fence) - 1);
    return s;
}

/// Root-mean-square error over all entries and all times of two trajectories.
inline double rmse(std::span<const Eigen::VectorXd> analysis, std::span<const Eigen::VectorXd> truth) {
    if (analysis.size() != truth.size() || analysis.empty()) {
        throw std::invalid_argument("rmse: trajectories differ in length or are empty");
    }
    double sum = 0.0;
    std::size_t entries = 0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        if (analysis[k].size() != truth[k].size()) throw std::invalid_argument("rmse: state dimension mismatch");
        sum += (analysis[k] - truth[k]).squaredNorm();
        entries += static_cast<std::size_t>(truth[k].size());
    }
    return std::sqrt(sum / static_cast<double>(entries));
}

}  // namespace sparsekf
