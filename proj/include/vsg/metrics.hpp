#pragma once

// Transient-quality indices for a power step: overshoot, settling time,
// peak frequency deviation and parameter excursions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vsg/trace.hpp"

namespace vsg {

/// Observation window for one step: rows with step_time < t <= window_end.
struct StepWindow {
    double step_time = 0.0;
    double p_initial = 0.0;
    double p_final = 0.0;
    double window_end = std::numeric_limits<double>::infinity();
};

namespace detail {

inline double time_tolerance(const Trace& trace) { return trace.dt > 0.0 ? 1e-9 * trace.dt : 1e-12; }

}  // namespace detail

/// Peak excursion of p_e past p_final, in percent of the commanded step.
inline double overshoot(const Trace& trace, const StepWindow& w) {
    const double step = w.p_final - w.p_initial;
    if (step == 0.0) throw std::invalid_argument("overshoot: p_final equals p_initial");
    const double tol = detail::time_tolerance(trace);
    const double sign = step > 0.0 ? 1.0 : -1.0;
    double worst = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& r : trace.rows) {
        if (r.t <= w.step_time + tol || r.t > w.window_end + tol) continue;
        worst = std::max(worst, sign * (r.p_e - w.p_final));
        any = true;
    }
    if (!any) throw std::invalid_argument("overshoot: no samples after the step");
    return 100.0 * std::max(0.0, worst) / std::abs(step);
}

inline double overshoot(const Trace& trace, double step_time, double p_initial, double p_final) {
    return overshoot(trace, StepWindow{step_time, p_initial, p_final});
}

/// Time from the step after which |p_e - p_final| stays within band_pct % of
/// the step for the rest of the window; nullopt when the last sample is still
/// outside the band.
inline std::optional<double> settling_time(const Trace& trace, const StepWindow& w, double band_pct = 2.0) {
    const double band = band_pct / 100.0 * std::abs(w.p_final - w.p_initial);
    const double tol = detail::time_tolerance(trace);
    double settled_from = 0.0;
    bool inside = false;
    for (const auto& r : trace.rows) {
        if (r.t < w.step_time - tol || r.t > w.window_end + tol) continue;
        if (std::abs(r.p_e - w.p_final) > band) {
            inside = false;
        } else if (!inside) {
            inside = true;
            settled_from = r.t;
        }
    }
    if (!inside) return std::nullopt;
    return std::max(0.0, settled_from - w.step_time);
}

inline std::optional<double> settling_time(const Trace& trace, double step_time, double p_initial, double p_final,
                                           double band_pct = 2.0) {
    return settling_time(trace, StepWindow{step_time, p_initial, p_final}, band_pct);
}

inline double max_freq_deviation(const Trace& trace) {
    double m = 0.0;
    for (const auto& r : trace.rows) m = std::max(m, std::abs(r.omega - trace.omega_0) / (2.0 * std::numbers::pi));
    return m;
}

struct Metrics {
    double overshoot_pct = 0.0;
    std::optional<double> settling_time_s;  // nullopt: not settled
    double max_freq_dev_hz = 0.0;
    double j_peak = 0.0;
    double j_peak_ratio = 0.0;
    double d_p_peak_ratio = 0.0;
    double k_t_min = 0.0;
    double k_t_max = 0.0;
    bool freq_violation = false;
};

struct MetricsOptions {
    double j0 = 0.0025;
    double d_p0 = 0.3;
    double delta_f_max = 0.5;
    double band_pct = 2.0;
};

/// All indices for one trace. Without a step (p_final == p_initial) the
/// step-response indices are reported as zero.
inline Metrics compute_metrics(const Trace& trace, const StepWindow& w, const MetricsOptions& opt) {
    Metrics m;
    if (w.p_final != w.p_initial) {
        m.overshoot_pct = overshoot(trace, w);
        m.settling_time_s = settling_time(trace, w, opt.band_pct);
    } else {
        m.settling_time_s = 0.0;
    }
    m.max_freq_dev_hz = max_freq_deviation(trace);
    double d_p_peak = 0.0;
    m.k_t_min = std::numeric_limits<double>::infinity();
    m.k_t_max = -std::numeric_limits<double>::infinity();
    for (const auto& r : trace.rows) {
        m.j_peak = std::max(m.j_peak, r.j);
        d_p_peak = std::max(d_p_peak, r.d_p);
        m.k_t_min = std::min(m.k_t_min, r.k_t);
        m.k_t_max = std::max(m.k_t_max, r.k_t);
    }
    if (trace.rows.empty()) m.k_t_min = m.k_t_max = 0.0;
    m.j_peak_ratio = opt.j0 > 0.0 ? m.j_peak / opt.j0 : 0.0;
    m.d_p_peak_ratio = opt.d_p0 > 0.0 ? d_p_peak / opt.d_p0 : 0.0;
    m.freq_violation = m.max_freq_dev_hz > opt.delta_f_max;
    return m;
}

struct NamedTrace {
    std::string name;
    const Trace* trace = nullptr;
};

struct Ordering {
    std::string metric;
    std::string lhs;
    std::string rhs;
    double lhs_value = 0.0;
    double rhs_value = 0.0;
    char relation = '=';  // '<', '=', '>'
};

struct ComparisonReport {
    std::vector<std::pair<std::string, Metrics>> rows;
    std::vector<Ordering> orderings;

    const Metrics& at(const std::string& name) const {
        for (const auto& [n, m] : rows)
            if (n == name) return m;
        throw std::out_of_range("no metrics for strategy '" + name + "'");
    }
};

namespace detail {

inline bool same_scenario(const Trace& a, const Trace& b) {
    if (a.rows.size() != b.rows.size() || a.dt != b.dt || a.omega_0 != b.omega_0) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        if (a.rows[i].t != b.rows[i].t || a.rows[i].p_m != b.rows[i].p_m) return false;
    return true;
}

inline char relation(double a, double b) { return a < b ? '<' : (a > b ? '>' : '='); }

}  // namespace detail

/// Metrics per trace plus pairwise orderings on overshoot, settling time,
/// peak frequency deviation and peak inertia ratio. Not-settled traces order
/// above every settled one.
inline ComparisonReport compare(const std::vector<NamedTrace>& traces, const StepWindow& w,
                                const MetricsOptions& opt) {
    ComparisonReport report;
    for (const auto& nt : traces) {
        if (nt.trace == nullptr) throw std::invalid_argument("compare: null trace for '" + nt.name + "'");
        if (!detail::same_scenario(*traces.front().trace, *nt.trace))
            throw std::invalid_argument("compare: trace '" + nt.name + "' does not share the scenario of '" +
                                        traces.front().name + "'");
        report.rows.emplace_back(nt.name, compute_metrics(*nt.trace, w, opt));
    }
    auto settle = [](const Metrics& m) { return m.settling_time_s.value_or(std::numeric_limits<double>::infinity()); };
    for (std::size_t a = 0; a < report.rows.size(); ++a) {
        for (std::size_t b = a + 1; b < report.rows.size(); ++b) {
            const auto& [na, ma] = report.rows[a];
            const auto& [nb, mb] = report.rows[b];
            auto add = [&](const char* metric, double va, double vb) {
                report.orderings.push_back({metric, na, nb, va, vb, detail::relation(va, vb)});
            };
            add("overshoot_pct", ma.overshoot_pct, mb.overshoot_pct);
            add("settling_time_s", settle(ma), settle(mb));
            add("max_freq_dev_hz", ma.max_freq_dev_hz, mb.max_freq_dev_hz);
            add("j_peak_ratio", ma.j_peak_ratio, mb.j_peak_ratio);
        }
    }
    return report;
}

}  // namespace vsg
