#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include "sparsekf/harness/experiment.hpp"

namespace sparsekf {

/// Six significant digits, the precision of every number in the CSV outputs.
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline constexpr const char* kReplicateHeader = "filter,param,replicate,rmse,eval_per_cycle,gamma_activations";
inline constexpr const char* kSummaryHeader = "filter,param,median,mean,std,q1,q3,n_replicates,n_failed";

inline void write_replicate_rows(std::ostream& os, const RunSummary& s) {
    const auto name = filter_name(s.config.filter);
    const auto param = s.config.param_label();
    for (const auto& r : s.replicates) {
        os << name << ',' << param << ',' << r.replicate << ',' << format_number(r.rmse) << ','
           << format_number(r.eval_per_cycle) << ',' << r.gamma_activations << '\n';
    }
}

inline void write_summary_row(std::ostream& os, const RunSummary& s) {
    os << filter_name(s.config.filter) << ',' << s.config.param_label() << ',' << format_number(s.rmse.median) << ','
       << format_number(s.rmse.mean) << ',' << format_number(s.rmse.std) << ',' << format_number(s.rmse.q1) << ','
       << format_number(s.rmse.q3) << ',' << s.replicates.size() << ',' << s.failed << '\n';
}

inline void write_replicates_csv(std::ostream& os, std::span<const RunSummary> runs) {
    os << kReplicateHeader << '\n';
    for (const auto& s : runs) write_replicate_rows(os, s);
}

inline void write_summary_csv(std::ostream& os, std::span<const RunSummary> runs) {
    os << kSummaryHeader << '\n';
    for (const auto& s : runs) write_summary_row(os, s);
}

}  // namespace sparsekf
