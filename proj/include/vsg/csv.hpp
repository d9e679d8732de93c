#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "vsg/metrics.hpp"
#include "vsg/trace.hpp"

namespace vsg::csv {

inline constexpr const char* kTraceHeader = "t,p_m,p_e,q_e,omega,delta_f_hz,delta,j,d_p,k_t,domega_dt,guard_flags";

/// Nine significant digits, locale independent.
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline void write_trace(std::ostream& out, const Trace& trace) {
    out << kTraceHeader << '\n';
    for (const auto& r : trace.rows) {
        out << num(r.t) << ',' << num(r.p_m) << ',' << num(r.p_e) << ',' << num(r.q_e) << ',' << num(r.omega) << ','
            << num(r.delta_f_hz) << ',' << num(r.delta) << ',' << num(r.j) << ',' << num(r.d_p) << ',' << num(r.k_t)
            << ',' << num(r.domega_dt) << ',' << r.guard_flags << '\n';
    }
}

inline constexpr const char* kMetricsHeader =
    "strategy,overshoot_pct,settling_time_s,max_freq_dev_hz,j_peak,j_peak_ratio,d_p_peak_ratio,k_t_min,k_t_max,"
    "freq_violation";

inline void write_metrics_row(std::ostream& out, const std::string& name, const Metrics& m) {
    out << name << ',' << num(m.overshoot_pct) << ','
        << (m.settling_time_s ? num(*m.settling_time_s) : std::string("not_settled")) << ','
        << num(m.max_freq_dev_hz) << ',' << num(m.j_peak) << ',' << num(m.j_peak_ratio) << ','
        << num(m.d_p_peak_ratio) << ',' << num(m.k_t_min) << ',' << num(m.k_t_max) << ','
        << (m.freq_violation ? "true" : "false") << '\n';
}

inline void write_metrics(std::ostream& out, const std::string& name, const Metrics& m) {
    out << kMetricsHeader << '\n';
    write_metrics_row(out, name, m);
}

inline void write_comparison_metrics(std::ostream& out, const ComparisonReport& report) {
    out << kMetricsHeader << '\n';
    for (const auto& [name, m] : report.rows) write_metrics_row(out, name, m);
}

inline void write_orderings(std::ostream& out, const ComparisonReport& report) {
    out << "metric,lhs,relation,rhs,lhs_value,rhs_value\n";
    for (const auto& o : report.orderings)
        out << o.metric << ',' << o.lhs << ',' << o.relation << ',' << o.rhs << ',' << num(o.lhs_value) << ','
            << num(o.rhs_value) << '\n';
}

/// Time-aligned power, frequency and parameter trajectories of several runs:
/// t, then <name>_p_e, <name>_delta_f_hz, <name>_j, <name>_d_p, <name>_k_t per run.
/// All traces must share the time grid.
inline void write_trajectories(std::ostream& out, const std::vector<NamedTrace>& traces) {
    out << 't';
    for (const auto& nt : traces)
        out << ',' << nt.name << "_p_e," << nt.name << "_delta_f_hz," << nt.name << "_j," << nt.name << "_d_p,"
            << nt.name << "_k_t";
    out << '\n';
    if (traces.empty()) return;
    const auto& base = traces.front().trace->rows;
    for (std::size_t i = 0; i < base.size(); ++i) {
        out << num(base[i].t);
        for (const auto& nt : traces) {
            const TraceRow& r = nt.trace->rows.at(i);
            out << ',' << num(r.p_e) << ',' << num(r.delta_f_hz) << ',' << num(r.j) << ',' << num(r.d_p) << ','
                << num(r.k_t);
        }
        out << '\n';
    }
}

}  // namespace vsg::csv
