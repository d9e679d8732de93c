#pragma once

// Electrical model of the VSG-to-grid connection: a constant internal EMF
// behind a series r + jX path to a stiff grid. All voltages are RMS phase
// quantities, so the power expressions below give three-phase power.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vsg/error.hpp"

namespace vsg {

struct GridParams {
    double u_g = 70.7107;                        // grid phase voltage, V rms
    double e = 70.7107;                          // internal EMF, V rms (held constant)
    double l_filter = 7e-3;                      // inverter-side inductance, H
    double l_line = 2e-3;                        // grid-side inductance, H
    double r_line = 0.6;                         // grid-side resistance, ohm
    double omega_0 = 100.0 * std::numbers::pi;   // nominal angular frequency, rad/s
};

struct Impedance {
    double r = 0.0;      // ohm
    double x = 0.0;      // ohm, at omega_0
    double z_mag = 0.0;  // ohm
    double alpha = 0.0;  // rad, atan(x / r)
};

struct PowerFlow {
    double p_e = 0.0;  // W
    double q_e = 0.0;  // var
};

inline void validate(const GridParams& g) {
    auto positive = [](double v, const char* field) {
        if (!std::isfinite(v) || !(v > 0.0)) throw ConfigError(field, "must be > 0");
    };
    auto non_negative = [](double v, const char* field) {
        if (!std::isfinite(v) || v < 0.0) throw ConfigError(field, "must be >= 0");
    };
    positive(g.u_g, "grid.u_g");
    positive(g.e, "grid.e");
    positive(g.omega_0, "grid.omega_0");
    non_negative(g.l_filter, "grid.l_filter");
    non_negative(g.l_line, "grid.l_line");
    non_negative(g.r_line, "grid.r_line");
    if (g.l_filter + g.l_line + g.r_line <= 0.0)
        throw ConfigError("grid.r_line", "degenerate impedance: r_line, l_filter and l_line are all zero");
}

/// Series impedance seen by the converter. The filter capacitor is not part
/// of the lumped path.
inline Impedance aggregate_impedance(const GridParams& g) {
    validate(g);
    Impedance imp;
    imp.r = g.r_line;
    imp.x = g.omega_0 * (g.l_filter + g.l_line);
    imp.z_mag = std::hypot(imp.r, imp.x);
    if (!(imp.z_mag > 0.0)) throw ConfigError("grid.r_line", "degenerate impedance: |Z| = 0");
    imp.alpha = std::atan2(imp.x, imp.r);
    return imp;
}

/// Exact active/reactive power delivered to the grid at power angle `delta`.
inline PowerFlow power_output(const Impedance& imp, double e, double u_g, double delta) {
    const double k = 3.0 * u_g / imp.z_mag;
    return {k * (e * std::cos(imp.alpha - delta) - u_g * std::cos(imp.alpha)),
            k * (e * std::sin(imp.alpha - delta) - u_g * std::sin(imp.alpha))};
}

/// Inductive-line, small-angle approximation of power_output.
inline PowerFlow power_output_simplified(const Impedance& imp, double e, double u_g, double delta) {
    return {3.0 * e * u_g / imp.z_mag * delta, 3.0 * (e * u_g - u_g * u_g) / imp.z_mag};
}

/// H_p_delta = 3 E U_g / |Z|, the constant power-angle gain used by the
/// small-signal loop.
inline double synchronizing_coefficient(const Impedance& imp, double e, double u_g) {
    return 3.0 * e * u_g / imp.z_mag;
}

/// Slope dP_e/d(delta) of the exact power curve at `delta`. Equals the
/// constant coefficient only for a lossless line at delta = 0.
inline double local_synchronizing_coefficient(const Impedance& imp, double e, double u_g, double delta) {
    return 3.0 * e * u_g / imp.z_mag * std::sin(imp.alpha - delta);
}

/// Stable-branch power angle at which power_output(...).p_e == p.
/// Throws std::domain_error when p lies outside the transferable range.
inline double equilibrium_angle(const Impedance& imp, double e, double u_g, double p) {
    const double k = 3.0 * e * u_g / imp.z_mag;
    const double c = (p + 3.0 * u_g * u_g / imp.z_mag * std::cos(imp.alpha)) / k;
    if (!(c >= -1.0 && c <= 1.0))
        throw std::domain_error("power " + std::to_string(p) + " W has no steady-state operating point");
    return imp.alpha - std::acos(c);
}

}  // namespace vsg
