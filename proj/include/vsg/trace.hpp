#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

namespace vsg {

/// Bits recorded in a trace row whenever a controller guard or clamp engaged.
enum GuardFlag : std::uint32_t {
    kGuardNone = 0,
    kGuardDpeDtEpsilon = 1u << 0,   // |dPe/dt| below epsilon in the frequency-limit Kt law
    kGuardKtStabilityClamp = 1u << 1,  // Kt raised to the stability lower bound
    kGuardJClampUpper = 1u << 2,    // inertia clamped to its upper limit
    kGuardJClampLower = 1u << 3,    // inertia clamped to its lower limit
    kGuardFrequencyLimit = 1u << 4, // frequency-limit branch active
};

struct TraceRow {
    double t = 0.0;          // s
    double p_m = 0.0;        // W
    double p_e = 0.0;        // W
    double q_e = 0.0;        // var
    double omega = 0.0;      // rad/s
    double delta_f_hz = 0.0; // (omega - omega_0) / 2 pi
    double delta = 0.0;      // rad
    double j = 0.0;          // kg m^2
    double d_p = 0.0;
    double k_t = 0.0;        // s
    double domega_dt = 0.0;  // rad/s^2
    std::uint32_t guard_flags = kGuardNone;
};

/// Uniformly sampled time series.
struct Trace {
    double omega_0 = 100.0 * std::numbers::pi;
    double dt = 0.0;
    std::vector<TraceRow> rows;
};

}  // namespace vsg
