#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sparsekf {

using Index = std::size_t;

/// Banded sparsity pattern on a cyclic index space.
///
/// Entry (i, j) is admissible when the cyclic distance
/// min(|i-j|, n-|i-j|) does not exceed the half bandwidth. Every column
/// holds the same number of admissible rows, listed in offset order
/// j+lo, ..., j+hi (mod n). When the band covers every cyclic distance
/// the pattern is full and the offset range is trimmed so that no row
/// appears twice in a column.
class SparsityPattern {
public:
    SparsityPattern() = default;

    static SparsityPattern banded(std::size_t n, std::size_t half_bandwidth) {
        if (n == 0) {
            throw std::invalid_argument("SparsityPattern: dimension must be positive");
        }
        SparsityPattern p;
        p.n_ = n;
        const auto h = static_cast<long>(half_bandwidth);
        const auto n_l = static_cast<long>(n);
        p.half_bandwidth_ = half_bandwidth;
        p.hi_ = std::min(h, n_l / 2);
        p.lo_ = -std::min(h, (n_l - 1) / 2);
        return p;
    }

    static SparsityPattern full(std::size_t n) { return banded(n, n); }

    /// Pattern with `nonzeros` entries per column; `nonzeros` must be odd.
    static SparsityPattern with_nonzeros(std::size_t n, std::size_t nonzeros) {
        if (nonzeros == 0 || nonzeros % 2 == 0) {
            throw std::invalid_argument("SparsityPattern: nonzeros per column must be odd");
        }
        if (nonzeros > n) {
            throw std::invalid_argument("SparsityPattern: nonzeros per column exceeds dimension");
        }
        return banded(n, (nonzeros - 1) / 2);
    }

    std::size_t dim() const { return n_; }
    std::size_t half_bandwidth() const { return half_bandwidth_; }
    long lower_offset() const { return lo_; }
    long upper_offset() const { return hi_; }
    std::size_t nonzeros_per_column() const { return static_cast<std::size_t>(hi_ - lo_ + 1); }
    bool is_full() const { return nonzeros_per_column() == n_; }

    /// Cyclic distance between two indices.
    std::size_t distance(Index i, Index j) const {
        const std::size_t d = i > j ? i - j : j - i;
        return std::min(d, n_ - d);
    }

    /// Signed offset of row i relative to column j, in [lo, hi], if admissible.
    std::optional<long> offset(Index i, Index j) const {
        const auto n_l = static_cast<long>(n_);
        long o = (static_cast<long>(i) - static_cast<long>(j)) % n_l;
        if (o < 0) o += n_l;
        if (o <= hi_) return o;
        o -= n_l;
        if (o >= lo_) return o;
        return std::nullopt;
    }

    bool contains(Index i, Index j) const { return offset(i, j).has_value(); }

    /// Position of row i inside column j's entry list.
    std::optional<std::size_t> position(Index i, Index j) const {
        auto o = offset(i, j);
        if (!o) return std::nullopt;
        return static_cast<std::size_t>(*o - lo_);
    }

    /// Row index stored at position `pos` of column j.
    Index row_at(Index j, std::size_t pos) const {
        const auto n_l = static_cast<long>(n_);
        long r = (static_cast<long>(j) + lo_ + static_cast<long>(pos)) % n_l;
        if (r < 0) r += n_l;
        return static_cast<Index>(r);
    }

    /// Rows admissible in column j, in offset order.
    std::vector<Index> column(Index j) const {
        std::vector<Index> rows(nonzeros_per_column());
        for (std::size_t p = 0; p < rows.size(); ++p) rows[p] = row_at(j, p);
        return rows;
    }

    friend bool operator==(const SparsityPattern& a, const SparsityPattern& b) {
        return a.n_ == b.n_ && a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

private:
    std::size_t n_ = 0;
    std::size_t half_bandwidth_ = 0;
    long lo_ = 0;
    long hi_ = 0;
};

}  // namespace sparsekf
