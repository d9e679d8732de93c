#pragma once

// Fixed-step integration of the VSG swing dynamics
//
//   d(delta)/dt = omega - omega_0
//   d(omega)/dt = (Pm - Pe - Kt dPe/dt - Dp w0 (omega - omega_0)) / (J w0)
//
// with Pe from the power-angle relation and dPe/dt = H (omega - omega_0).
// The controller is sampled once per step and held over it.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vsg/controllers.hpp"
#include "vsg/error.hpp"
#include "vsg/grid_model.hpp"
#include "vsg/trace.hpp"

namespace vsg {

enum class PowerModel {
    Full,        // exact power-angle relation
    SmallAngle,  // linearized, Pe = H delta
};

struct Plant {
    Impedance imp;
    double e = 0.0;
    double u_g = 0.0;
    double omega_0 = 100.0 * std::numbers::pi;
    PowerModel model = PowerModel::Full;

    static Plant from(const GridParams& g, PowerModel model = PowerModel::Full) {
        return {aggregate_impedance(g), g.e, g.u_g, g.omega_0, model};
    }

    double h_pdelta() const { return synchronizing_coefficient(imp, e, u_g); }

    PowerFlow power(double delta) const {
        return model == PowerModel::Full ? power_output(imp, e, u_g, delta)
                                         : power_output_simplified(imp, e, u_g, delta);
    }

    double equilibrium(double p_m) const {
        if (model == PowerModel::SmallAngle) return p_m / h_pdelta();
        return equilibrium_angle(imp, e, u_g, p_m);
    }
};

struct VsgState {
    double t = 0.0;
    double delta = 0.0;
    double omega = 0.0;
    double p_m = 0.0;
    double p_e = 0.0;
    double j = 0.0;
    double d_p = 0.0;
    double k_t = 0.0;
    double dpe_dt = 0.0;
    double domega_dt = 0.0;
};

struct PowerStep {
    double time = 0.0;  // s
    double p_m = 0.0;   // W
};

struct Scenario {
    double duration = 12.0;
    double dt = 2e-4;
    double p_m0 = 157.0;
    double q_ref = 0.0;  // informational
    std::vector<PowerStep> events{{6.0, 600.0}};
    GridParams grid;
    VsgConfig vsg;
    std::string strategy = "proposed";
    PowerModel power_model = PowerModel::Full;

    /// Input power in effect at time t (events apply from their own instant).
    double p_m_at(double t) const {
        const double tol = 1e-9 * dt;
        double p = p_m0;
        for (const auto& ev : events) {
            if (ev.time <= t + tol) p = ev.p_m;
            else break;
        }
        return p;
    }

    std::size_t step_count() const { return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)); }
};

inline void validate(const Scenario& s) {
    validate(s.grid);
    validate(s.vsg);
    if (!std::isfinite(s.dt) || !(s.dt > 0.0)) throw ConfigError("scenario.dt", "must be > 0");
    if (!std::isfinite(s.duration) || !(s.duration > 0.0)) throw ConfigError("scenario.duration", "must be > 0");
    if (!std::isfinite(s.p_m0)) throw ConfigError("scenario.p_m0", "must be finite");
    double last = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        const auto& ev = s.events[i];
        const std::string field = "scenario.events[" + std::to_string(i) + "]";
        if (!std::isfinite(ev.time) || ev.time < 0.0) throw ConfigError(field + ".time", "must be >= 0");
        if (!std::isfinite(ev.p_m)) throw ConfigError(field + ".p_m", "must be finite");
        if (!(ev.time > last)) throw ConfigError(field + ".time", "events must be strictly increasing in time");
        last = ev.time;
    }
    if (!s.events.empty() && s.duration < s.events.back().time)
        throw ConfigError("scenario.duration", "must be >= the last event time");
}

/// Power derivative with constant EMF: H (omega - omega_0).
inline double dpe_dt_analytic(const VsgState& state, const Impedance& imp, double e, double u_g, double omega_0) {
    return synchronizing_coefficient(imp, e, u_g) * (state.omega - omega_0);
}

struct StateDerivative {
    double d_delta = 0.0;  // rad/s
    double d_omega = 0.0;  // rad/s^2
};

inline StateDerivative derivative(const Plant& plant, double delta, double omega, double p_m,
                                  const ControlOutputs& ctl) {
    const double dw = omega - plant.omega_0;
    const double p_e = plant.power(delta).p_e;
    const double dpe_dt = plant.h_pdelta() * dw;
    return {dw, (p_m - p_e - ctl.k_t * dpe_dt - ctl.d_p * plant.omega_0 * dw) / (ctl.j * plant.omega_0)};
}

inline StateDerivative derivative(const VsgState& state, double p_m, const ControlOutputs& ctl, const Plant& plant) {
    return derivative(plant, state.delta, state.omega, p_m, ctl);
}

/// Classical four-stage Runge-Kutta step for a two-state system `f(x0, x1)`.
template <typename F>
std::pair<double, double> rk4_step(F&& f, double x0, double x1, double h) {
    const auto k1 = f(x0, x1);
    const auto k2 = f(x0 + 0.5 * h * k1.first, x1 + 0.5 * h * k1.second);
    const auto k3 = f(x0 + 0.5 * h * k2.first, x1 + 0.5 * h * k2.second);
    const auto k4 = f(x0 + h * k3.first, x1 + h * k3.second);
    return {x0 + h / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first),
            x1 + h / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second)};
}

/// Refreshes the derived fields (p_e, dpe_dt, domega_dt) from delta, omega
/// and the live controller outputs.
inline void refresh(VsgState& s, const Plant& plant) {
    s.p_e = plant.power(s.delta).p_e;
    s.dpe_dt = plant.h_pdelta() * (s.omega - plant.omega_0);
    s.domega_dt = derivative(plant, s.delta, s.omega, s.p_m, {s.j, s.d_p, s.k_t, kGuardNone}).d_omega;
}

/// Advances (delta, omega) by one step of length dt with `ctl` held.
inline VsgState step(const VsgState& s, const Plant& plant, const ControlOutputs& ctl, double dt) {
    auto f = [&](double delta, double omega) {
        const StateDerivative d = derivative(plant, delta, omega, s.p_m, ctl);
        return std::pair{d.d_delta, d.d_omega};
    };
    const auto [delta, omega] = rk4_step(f, s.delta, s.omega, dt);
    VsgState next = s;
    next.t = s.t + dt;
    next.delta = delta;
    next.omega = omega;
    next.j = ctl.j;
    next.d_p = ctl.d_p;
    next.k_t = ctl.k_t;
    refresh(next, plant);
    return next;
}

struct IntegrationFailure {
    std::size_t step_index = 0;
    double t = 0.0;
    std::string message;
};

struct RunResult {
    Trace trace;
    std::optional<IntegrationFailure> failure;
};

inline TraceRow make_row(const VsgState& s, const Plant& plant, std::uint32_t flags) {
    TraceRow r;
    r.t = s.t;
    r.p_m = s.p_m;
    r.p_e = s.p_e;
    r.q_e = plant.power(s.delta).q_e;
    r.omega = s.omega;
    r.delta_f_hz = (s.omega - plant.omega_0) / (2.0 * std::numbers::pi);
    r.delta = s.delta;
    r.j = s.j;
    r.d_p = s.d_p;
    r.k_t = s.k_t;
    r.domega_dt = s.domega_dt;
    r.guard_flags = flags;
    return r;
}

/// Runs `strategy` over the scenario starting from the steady state at p_m0.
///
/// Row k holds the state at t_k = k dt together with the controller outputs
/// sampled at t_k, which then act over [t_k, t_k+1]. The acceleration the
/// controller sees is the model derivative under the previous outputs.
inline RunResult simulate(const Scenario& sc, Strategy& strategy) {
    validate(sc);
    const Plant plant = Plant::from(sc.grid, sc.power_model);

    VsgState s;
    try {
        s.delta = plant.equilibrium(sc.p_m0);
    } catch (const std::domain_error& e) {
        throw ConfigError("scenario.p_m0", e.what());
    }
    s.omega = plant.omega_0;
    const ControlOutputs initial = strategy.nominal();
    s.j = initial.j;
    s.d_p = initial.d_p;
    s.k_t = initial.k_t;
    s.p_m = sc.p_m0;
    refresh(s, plant);

    RunResult result;
    result.trace.omega_0 = plant.omega_0;
    result.trace.dt = sc.dt;
    const std::size_t n = sc.step_count();
    result.trace.rows.reserve(n + 1);

    for (std::size_t k = 0; k <= n; ++k) {
        s.t = static_cast<double>(k) * sc.dt;
        s.p_m = sc.p_m_at(s.t);
        refresh(s, plant);  // acceleration under the held outputs and the current Pm

        const ControlInputs in{s.omega - plant.omega_0, s.domega_dt, s.p_m, s.p_e, s.dpe_dt};
        const ControlOutputs ctl = strategy.update(in, sc.dt);
        if (!(ctl.j > 0.0) || !std::isfinite(ctl.k_t) || !std::isfinite(ctl.d_p)) {
            result.failure = IntegrationFailure{k, s.t, "controller produced invalid outputs"};
            return result;
        }
        s.j = ctl.j;
        s.d_p = ctl.d_p;
        s.k_t = ctl.k_t;
        refresh(s, plant);
        result.trace.rows.push_back(make_row(s, plant, ctl.guard_flags));

        if (k == n) break;
        VsgState next = step(s, plant, ctl, sc.dt);
        if (!std::isfinite(next.delta) || !std::isfinite(next.omega) || !(next.omega > 0.0)) {
            result.failure = IntegrationFailure{k, s.t, "non-finite or non-positive state after step " +
                                                             std::to_string(k)};
            return result;
        }
        s = next;
    }
    return result;
}

inline RunResult simulate(const Scenario& sc) {
    const Plant plant = Plant::from(sc.grid, sc.power_model);
    auto strategy = make_strategy(sc.strategy, sc.vsg, {plant.h_pdelta(), plant.omega_0});
    return simulate(sc, *strategy);
}

}  // namespace vsg
