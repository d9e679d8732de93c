#pragma once

// Linear analysis of the active-power loop
//
//   J w0 s^2 + (Dp w0 + H Kt) s + H = 0
//
// where H is the synchronizing coefficient and Kt the output-speed feedback
// gain acting on dPe/dt.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vsg/trace.hpp"

namespace vsg {

struct LoopParams {
    double j = 0.0;         // kg m^2
    double d_p = 0.0;
    double k_t = 0.0;       // s
    double h_pdelta = 0.0;  // W/rad
    double omega_0 = 100.0 * std::numbers::pi;
};

struct ModePair {
    std::complex<double> s1;
    std::complex<double> s2;
    double omega_n = 0.0;
    double zeta = 0.0;
};

enum class RootCase {
    ComplexPair,   // B < 0
    NegativeReal,  // 0 <= B < A^2
    Unstable,      // B >= A^2, or A <= 0
};

inline const char* to_string(RootCase c) {
    switch (c) {
        case RootCase::ComplexPair: return "complex_pair";
        case RootCase::NegativeReal: return "negative_real";
        case RootCase::Unstable: return "unstable";
    }
    return "?";
}

struct StabilityReport {
    double a = 0.0;            // Dp w0 + H Kt
    double b = 0.0;            // A^2 - 4 J w0 H
    double a2_minus_b = 0.0;   // 4 J w0 H
    double k_t_min = 0.0;      // -Dp w0 / H
    double k_t_margin = 0.0;   // Kt - Kt_min
    bool stable = false;
    RootCase root_case = RootCase::Unstable;
};

inline double open_loop_zeta(double j, double d_p, double h_pdelta, double omega_0) {
    return 0.5 * d_p * std::sqrt(omega_0 / j) * std::sqrt(1.0 / h_pdelta);
}

inline double damping_coefficient(const LoopParams& p) { return p.d_p * p.omega_0 + p.h_pdelta * p.k_t; }

/// Roots use the cancellation-free form: the larger-magnitude real root
/// comes from the quadratic formula, the other from Vieta's product.
inline ModePair closed_loop_modes(const LoopParams& p) {
    const double a2 = p.j * p.omega_0;
    const double a1 = damping_coefficient(p);
    const double a0 = p.h_pdelta;
    const double disc = a1 * a1 - 4.0 * a2 * a0;

    ModePair m;
    m.omega_n = std::sqrt(a0 / a2);
    m.zeta = a1 / (2.0 * std::sqrt(a0 * a2));
    if (disc < 0.0) {
        const double re = -a1 / (2.0 * a2);
        const double im = std::sqrt(-disc) / (2.0 * a2);
        m.s1 = {re, im};
        m.s2 = {re, -im};
    } else {
        const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
        if (q == 0.0) {
            m.s1 = m.s2 = 0.0;
        } else {
            m.s1 = q / a2;
            m.s2 = a0 / q;
        }
    }
    return m;
}

inline double kt_for_zeta(double zeta_target, double j, double d_p, double h_pdelta, double omega_0) {
    return (2.0 * zeta_target * std::sqrt(h_pdelta * j * omega_0) - d_p * omega_0) / h_pdelta;
}

inline StabilityReport stability_check(const LoopParams& p) {
    StabilityReport r;
    r.a = damping_coefficient(p);
    r.a2_minus_b = 4.0 * p.j * p.omega_0 * p.h_pdelta;
    r.b = r.a * r.a - r.a2_minus_b;
    r.k_t_min = -p.d_p * p.omega_0 / p.h_pdelta;
    r.k_t_margin = p.k_t - r.k_t_min;
    r.stable = r.a > 0.0 && p.j > 0.0;
    if (!r.stable || r.b >= r.a * r.a)
        r.root_case = RootCase::Unstable;
    else if (r.b < 0.0)
        r.root_case = RootCase::ComplexPair;
    else
        r.root_case = RootCase::NegativeReal;
    return r;
}

/// Closed-form response of P_e to a step of `delta_p` in P_m applied at t = 0,
/// sampled every `dt` up to `t_end`. Rows carry p_m, p_e, omega (from
/// dP_e/dt = H (omega - omega_0)) and the fixed loop parameters.
inline Trace analytic_step_response(const LoopParams& p, double delta_p, double t_end, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("analytic_step_response: dt must be > 0");
    const StabilityReport report = stability_check(p);
    if (!report.stable)
        throw std::invalid_argument("analytic_step_response: loop is unstable (A = " + std::to_string(report.a) + ")");

    const double a2 = p.j * p.omega_0;
    const double wn = std::sqrt(p.h_pdelta / a2);
    const double zeta = report.a / (2.0 * std::sqrt(p.h_pdelta * a2));
    const bool critical = std::abs(report.b) < 1e-12 * report.a * report.a;

    // Unit-step response y(t) and its derivative.
    auto unit = [&](double t) -> std::pair<double, double> {
        if (critical) {
            const double ex = std::exp(-wn * t);
            return {1.0 - ex * (1.0 + wn * t), wn * wn * t * ex};
        }
        if (report.b < 0.0) {
            const double root = std::sqrt(1.0 - zeta * zeta);
            const double wd = wn * root;
            const double ex = std::exp(-zeta * wn * t);
            return {1.0 - ex * (std::cos(wd * t) + zeta / root * std::sin(wd * t)),
                    wn / root * ex * std::sin(wd * t)};
        }
        const double root = std::sqrt(zeta * zeta - 1.0);
        const double s1 = -wn * (zeta - root);
        const double s2 = -wn * (zeta + root);
        const double e1 = std::exp(s1 * t);
        const double e2 = std::exp(s2 * t);
        return {1.0 + (s2 * e1 - s1 * e2) / (s1 - s2), s1 * s2 * (e1 - e2) / (s1 - s2)};
    };

    Trace trace;
    trace.omega_0 = p.omega_0;
    trace.dt = dt;
    const auto n = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
    trace.rows.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * dt;
        const auto [y, dy] = unit(t);
        TraceRow row;
        row.t = t;
        row.p_m = delta_p;
        row.p_e = delta_p * y;
        row.omega = p.omega_0 + delta_p * dy / p.h_pdelta;
        row.delta_f_hz = (row.omega - p.omega_0) / (2.0 * std::numbers::pi);
        row.delta = row.p_e / p.h_pdelta;
        row.j = p.j;
        row.d_p = p.d_p;
        row.k_t = p.k_t;
        trace.rows.push_back(row);
    }
    return trace;
}

}  // namespace vsg
