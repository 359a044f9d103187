#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sparsekf/core/pattern.hpp"

namespace sparsekf {

enum class FilterKind { sparse_ukf, progressive_ekf, enkf, dense_ukf };

inline constexpr std::array<std::pair<std::string_view, FilterKind>, 4> kFilterNames{{
    {"sukf", FilterKind::sparse_ukf},
    {"pekf", FilterKind::progressive_ekf},
    {"enkf", FilterKind::enkf},
    {"ukf", FilterKind::dense_ukf},
}};

inline std::string_view filter_name(FilterKind kind) {
    for (const auto& [name, k] : kFilterNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

inline FilterKind parse_filter(std::string_view name) {
    for (const auto& [n, k] : kFilterNames) {
        if (n == name) return k;
    }
    throw std::invalid_argument("unknown filter '" + std::string(name) + "' (expected sukf, pekf, enkf or ukf)");
}

/// Every parameter of a twin experiment. Field names double as config-file keys.
struct ExperimentConfig {
    // model
    std::size_t n = 40;
    double forcing = 8.0;
    double dt = 0.025;
    // experiment size
    std::size_t steps = 2000;      ///< assimilation cycles per replicate (N_t)
    std::size_t replicates = 100;  ///< independent runs (N)
    // observations
    std::size_t obs_stride = 2;    ///< observe every obs_stride-th state entry
    std::size_t obs_interval = 1;  ///< observe every obs_interval-th cycle
    double obs_variance = 1.0;     ///< R = obs_variance * I
    // initial conditions
    double init_range = 1.0;       ///< truth x(0) ~ U[-init_range, init_range]^n
    double init_variance = 0.2;    ///< P(0) = init_variance * I
    // filter
    FilterKind filter = FilterKind::sparse_ukf;
    std::size_t nsp = 7;           ///< nonzeros per covariance column (odd)
    int np = 1;                    ///< progressive EKF inner-loop sub-steps
    double delta = 1e-4;           ///< progressive EKF finite-difference step
    double kappa = 0.0;
    double q = 0.0;                ///< model error covariance Q = q * I
    std::size_t ensemble = 10;
    double radius = 4.0;           ///< EnKF localization radius
    double inflation = 1.08;       ///< EnKF variance inflation
    std::uint64_t seed = 20240601;

    void validate() const {
        auto fail = [](const std::string& what) { throw std::invalid_argument("invalid config: " + what); };
        if (n < 4) fail("n must be at least 4");
        if (!(dt > 0.0)) fail("dt must be positive");
        if (steps == 0) fail("steps must be positive");
        if (replicates == 0) fail("replicates must be positive");
        if (obs_stride == 0 || obs_stride > n) fail("obs_stride must be in [1, n]");
        if (obs_interval == 0) fail("obs_interval must be positive");
        if (!(obs_variance >= 0.0)) fail("obs_variance must be non-negative");
        if (!(init_range >= 0.0)) fail("init_range must be non-negative");
        if (!(init_variance > 0.0)) fail("init_variance must be positive");
        if (filter == FilterKind::sparse_ukf || filter == FilterKind::progressive_ekf) {
            if (nsp == 0 || nsp % 2 == 0 || nsp > n) fail("nsp must be odd and at most n");
        }
        if (np < 1) fail("np must be at least 1");
        if (!(delta > 0.0)) fail("delta must be positive");
        if (!(static_cast<double>(n) + kappa > 0.0)) fail("n + kappa must be positive");
        if (!(q >= 0.0)) fail("q must be non-negative");
        if (ensemble < 2) fail("ensemble must be at least 2");
        if (!(radius > 0.0)) fail("radius must be positive");
        if (!(inflation > 0.0)) fail("inflation must be positive");
    }

    SparsityPattern pattern() const { return SparsityPattern::with_nonzeros(n, nsp); }

    /// Filter-specific size parameter for reports, e.g. "nsp=11;np=2".
    std::string param_label() const {
        switch (filter) {
            case FilterKind::sparse_ukf: return "nsp=" + std::to_string(nsp);
            case FilterKind::progressive_ekf: return "nsp=" + std::to_string(nsp) + ";np=" + std::to_string(np);
            case FilterKind::enkf: return "ens=" + std::to_string(ensemble);
            case FilterKind::dense_ukf: return "dense";
        }
        return {};
    }

    /// Closed-form scalar model outputs per assimilation cycle.
    std::uint64_t expected_evaluations() const {
        switch (filter) {
            case FilterKind::sparse_ukf: return n + 2 * n * nsp;
            case FilterKind::progressive_ekf: return static_cast<std::uint64_t>(np) * (n + n * nsp);
            case FilterKind::enkf: return ensemble * n;
            case FilterKind::dense_ukf: return n * (2 * n + 1);
        }
        return 0;
    }
};

}  // namespace sparsekf
