#pragma once

// Parameter schedules for the VSG active-power loop. Every strategy maps the
// sampled loop quantities to the three live tunables (J, Dp, Kt); the
// simulator holds the result constant over one control period.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "vsg/error.hpp"
#include "vsg/smallsignal.hpp"
#include "vsg/trace.hpp"

namespace vsg {

struct VsgConfig {
    double j0 = 0.0025;             // kg m^2
    double j_min = 0.001;
    double j_max = 0.006;
    double d_p0 = 0.3;
    double delta_f_max = 0.5;       // Hz
    double t_threshold = 0.3;       // rad/s^2
    double zeta_nominal = 1.1;
    double zeta_boost = 1.3;
    double dpedt_epsilon = 1e-6;    // W/s

    // Baseline schedules.
    double j_big = 0.019;
    double j_small = 0.002;
    double k_dp = 3.0;              // per Hz above dp_threshold_hz
    double dp_threshold_hz = 0.2;
    double k_dp_joint = 1.08;       // per Hz

    double k1() const { return (j_max - j0) * std::exp(delta_f_max); }
    double k2() const { return (j0 - j_min) * std::exp(delta_f_max); }
};

inline void validate(const VsgConfig& c) {
    auto finite = [](double v, const char* field) {
        if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
    };
    for (auto [v, f] : std::array<std::pair<double, const char*>, 14>{{
             {c.j0, "vsg.j0"}, {c.j_min, "vsg.j_min"}, {c.j_max, "vsg.j_max"}, {c.d_p0, "vsg.d_p0"},
             {c.delta_f_max, "vsg.delta_f_max"}, {c.t_threshold, "vsg.t_threshold"},
             {c.zeta_nominal, "vsg.zeta_nominal"}, {c.zeta_boost, "vsg.zeta_boost"},
             {c.dpedt_epsilon, "vsg.dpedt_epsilon"}, {c.j_big, "controller.j_big"},
             {c.j_small, "controller.j_small"}, {c.k_dp, "controller.k_dp"},
             {c.dp_threshold_hz, "controller.dp_threshold_hz"}, {c.k_dp_joint, "controller.k_dp_joint"}}})
        finite(v, f);
    if (!(c.j_min > 0.0)) throw ConfigError("vsg.j_min", "must be > 0");
    if (!(c.j0 > 0.0)) throw ConfigError("vsg.j0", "must be > 0");
    if (c.j0 < c.j_min) throw ConfigError("vsg.j0", "must be >= vsg.j_min");
    if (c.j_max < c.j0) throw ConfigError("vsg.j_max", "must be >= vsg.j0");
    if (c.d_p0 < 0.0) throw ConfigError("vsg.d_p0", "must be >= 0");
    if (!(c.delta_f_max > 0.0)) throw ConfigError("vsg.delta_f_max", "must be > 0");
    if (c.t_threshold < 0.0) throw ConfigError("vsg.t_threshold", "must be >= 0");
    if (c.zeta_nominal < 1.0) throw ConfigError("vsg.zeta_nominal", "must be >= 1");
    if (c.zeta_boost < c.zeta_nominal) throw ConfigError("vsg.zeta_boost", "must be >= vsg.zeta_nominal");
    if (!(c.dpedt_epsilon > 0.0)) throw ConfigError("vsg.dpedt_epsilon", "must be > 0");
    if (!(c.j_big > 0.0)) throw ConfigError("controller.j_big", "must be > 0");
    if (!(c.j_small > 0.0)) throw ConfigError("controller.j_small", "must be > 0");
    if (c.k_dp < 0.0) throw ConfigError("controller.k_dp", "must be >= 0");
    if (c.dp_threshold_hz < 0.0) throw ConfigError("controller.dp_threshold_hz", "must be >= 0");
    if (c.k_dp_joint < 0.0) throw ConfigError("controller.k_dp_joint", "must be >= 0");
}

/// Plant constants a controller needs to turn a damping target into Kt.
struct LoopContext {
    double h_pdelta = 0.0;  // W/rad
    double omega_0 = 100.0 * std::numbers::pi;
};

struct ControlInputs {
    double delta_omega = 0.0;  // omega - omega_0, rad/s
    double domega_dt = 0.0;    // rad/s^2
    double p_m = 0.0;          // W
    double p_e = 0.0;          // W
    double dpe_dt = 0.0;       // W/s
};

struct ControlOutputs {
    double j = 0.0;
    double d_p = 0.0;
    double k_t = 0.0;
    std::uint32_t guard_flags = kGuardNone;
};

/// A scheduled value together with the guards that shaped it.
struct Guarded {
    double value = 0.0;
    std::uint32_t flags = kGuardNone;
};

inline double frequency_band(const VsgConfig& cfg) { return 2.0 * std::numbers::pi * cfg.delta_f_max; }

/// Inertia schedule: raise J while the frequency deviation grows, lower it
/// while the deviation recovers, both only when |domega/dt| exceeds T.
/// The exponential law is clamped to [j0, j_max] and [j_min, j0].
inline Guarded j_adaptive_term(const ControlInputs& in, const VsgConfig& cfg) {
    const double product = in.delta_omega * in.domega_dt;
    const bool fast = std::abs(in.domega_dt) > cfg.t_threshold;
    const double decay = std::exp(-std::abs(in.delta_omega) / (2.0 * std::numbers::pi));
    if (fast && product > 0.0) {
        const double raw = cfg.j0 + cfg.k1() * decay;
        if (raw > cfg.j_max) return {cfg.j_max, kGuardJClampUpper};
        return {std::max(raw, cfg.j0), kGuardNone};
    }
    if (fast && product < 0.0) {
        const double raw = cfg.j0 - cfg.k2() * decay;
        if (raw < cfg.j_min) return {cfg.j_min, kGuardJClampLower};
        return {std::min(raw, cfg.j0), kGuardNone};
    }
    return {cfg.j0, kGuardNone};
}

/// Kt that zeroes domega/dt once the frequency is outside the allowed band.
/// The dPe/dt divisor is kept at least `dpedt_epsilon` in magnitude and the
/// result is held above the stability bound -Dp0 w0 / H.
inline Guarded kt_frequency_limit(const ControlInputs& in, const VsgConfig& cfg, const LoopContext& ctx) {
    constexpr double kMargin = 1e-6;
    std::uint32_t flags = kGuardNone;
    double divisor = in.dpe_dt;
    if (std::abs(divisor) < cfg.dpedt_epsilon) {
        divisor = (divisor < 0.0 ? -1.0 : 1.0) * cfg.dpedt_epsilon;
        flags |= kGuardDpeDtEpsilon;
    }
    const double numerator = in.p_m - in.p_e - ctx.omega_0 * cfg.d_p0 * in.delta_omega;
    double k_t = numerator / divisor;
    const double floor = -cfg.d_p0 * ctx.omega_0 / ctx.h_pdelta + kMargin;
    if (!(k_t >= floor)) {
        k_t = floor;
        flags |= kGuardKtStabilityClamp;
    }
    return {k_t, flags};
}

/// One sample of the inertia + speed-feedback adaptive law. Dp is never
/// moved. Inside the band, J follows j_adaptive_term and Kt is designed for
/// zeta_boost (fast transient) or zeta_nominal (calm); at or beyond the band
/// edge J returns to j0 and Kt comes from kt_frequency_limit.
inline ControlOutputs proposed_update(const ControlInputs& in, const VsgConfig& cfg, const LoopContext& ctx) {
    ControlOutputs out;
    out.d_p = cfg.d_p0;
    if (std::abs(in.delta_omega) < frequency_band(cfg)) {
        const Guarded j = j_adaptive_term(in, cfg);
        const double zeta = std::abs(in.domega_dt) > cfg.t_threshold ? cfg.zeta_boost : cfg.zeta_nominal;
        out.j = j.value;
        out.k_t = kt_for_zeta(zeta, j.value, cfg.d_p0, ctx.h_pdelta, ctx.omega_0);
        out.guard_flags = j.flags;
    } else {
        const Guarded k_t = kt_frequency_limit(in, cfg, ctx);
        out.j = cfg.j0;
        out.k_t = k_t.value;
        out.guard_flags = k_t.flags | kGuardFrequencyLimit;
    }
    return out;
}

struct GuardEvent {
    std::size_t sample = 0;
    std::uint32_t flags = kGuardNone;
};

/// Common interface the simulator drives once per control period.
class Strategy {
public:
    virtual ~Strategy() = default;

    virtual std::string_view name() const = 0;

    /// Outputs assumed before the first sample (steady state).
    virtual ControlOutputs nominal() const = 0;

    ControlOutputs update(const ControlInputs& in, double dt) {
        ControlOutputs out = compute(in, dt);
        if (out.guard_flags != kGuardNone) events_.push_back({samples_, out.guard_flags});
        ++samples_;
        return out;
    }

    const std::vector<GuardEvent>& events() const { return events_; }
    std::size_t samples() const { return samples_; }

protected:
    virtual ControlOutputs compute(const ControlInputs& in, double dt) = 0;

private:
    std::vector<GuardEvent> events_;
    std::size_t samples_ = 0;
};

/// Fixed J, Dp and Kt. Used for analysis runs; the `constant` baseline is
/// this with Kt = 0.
class FixedStrategy final : public Strategy {
public:
    FixedStrategy(double j, double d_p, double k_t, std::string name = "fixed")
        : outputs_{j, d_p, k_t, kGuardNone}, name_(std::move(name)) {}

    std::string_view name() const override { return name_; }
    ControlOutputs nominal() const override { return outputs_; }

protected:
    ControlOutputs compute(const ControlInputs&, double) override { return outputs_; }

private:
    ControlOutputs outputs_;
    std::string name_;
};

/// Alternating inertia: j_big while the deviation grows, j_small while it
/// recovers, j0 when |domega/dt| <= T.
inline double alternating_inertia(const ControlInputs& in, const VsgConfig& cfg) {
    if (std::abs(in.domega_dt) <= cfg.t_threshold) return cfg.j0;
    const double product = in.delta_omega * in.domega_dt;
    if (product > 0.0) return cfg.j_big;
    if (product < 0.0) return cfg.j_small;
    return cfg.j0;
}

class JAdaptiveStrategy final : public Strategy {
public:
    explicit JAdaptiveStrategy(const VsgConfig& cfg) : cfg_(cfg) {}
    std::string_view name() const override { return "j_adaptive"; }
    ControlOutputs nominal() const override { return {cfg_.j0, cfg_.d_p0, 0.0, kGuardNone}; }

protected:
    ControlOutputs compute(const ControlInputs& in, double) override {
        return {alternating_inertia(in, cfg_), cfg_.d_p0, 0.0, kGuardNone};
    }

private:
    VsgConfig cfg_;
};

// Damping raised only while |df| exceeds dp_threshold_hz.
class DpAdaptiveStrategy final : public Strategy {
public:
    explicit DpAdaptiveStrategy(const VsgConfig& cfg) : cfg_(cfg) {}
    std::string_view name() const override { return "dp_adaptive"; }
    ControlOutputs nominal() const override { return {cfg_.j0, cfg_.d_p0, 0.0, kGuardNone}; }

protected:
    ControlOutputs compute(const ControlInputs& in, double) override {
        const double df = std::abs(in.delta_omega) / (2.0 * std::numbers::pi);
        return {cfg_.j0, cfg_.d_p0 + cfg_.k_dp * std::max(0.0, df - cfg_.dp_threshold_hz), 0.0, kGuardNone};
    }

private:
    VsgConfig cfg_;
};

class JDpAdaptiveStrategy final : public Strategy {
public:
    explicit JDpAdaptiveStrategy(const VsgConfig& cfg) : cfg_(cfg) {}
    std::string_view name() const override { return "jdp_adaptive"; }
    ControlOutputs nominal() const override { return {cfg_.j0, cfg_.d_p0, 0.0, kGuardNone}; }

protected:
    ControlOutputs compute(const ControlInputs& in, double) override {
        const double df = std::abs(in.delta_omega) / (2.0 * std::numbers::pi);
        return {alternating_inertia(in, cfg_), cfg_.d_p0 + cfg_.k_dp_joint * df, 0.0,
                kGuardNone};
    }

private:
    VsgConfig cfg_;
};

class ProposedStrategy final : public Strategy {
public:
    ProposedStrategy(const VsgConfig& cfg, const LoopContext& ctx) : cfg_(cfg), ctx_(ctx) {}
    std::string_view name() const override { return "proposed"; }
    ControlOutputs nominal() const override {
        return {cfg_.j0, cfg_.d_p0, kt_for_zeta(cfg_.zeta_nominal, cfg_.j0, cfg_.d_p0, ctx_.h_pdelta, ctx_.omega_0),
                kGuardNone};
    }

    bool in_limit_branch() const { return limit_branch_; }

protected:
    ControlOutputs compute(const ControlInputs& in, double) override {
        ControlOutputs out = proposed_update(in, cfg_, ctx_);
        limit_branch_ = (out.guard_flags & kGuardFrequencyLimit) != 0;
        return out;
    }

private:
    VsgConfig cfg_;
    LoopContext ctx_;
    bool limit_branch_ = false;
};

inline constexpr std::array<std::string_view, 5> kStrategyNames = {"constant", "j_adaptive", "dp_adaptive",
                                                                    "jdp_adaptive", "proposed"};

inline std::string strategy_name_list() {
    std::string s;
    for (auto n : kStrategyNames) {
        if (!s.empty()) s += ", ";
        s += n;
    }
    return s;
}

inline std::unique_ptr<Strategy> make_strategy(std::string_view name, const VsgConfig& cfg, const LoopContext& ctx) {
    if (name == "constant") return std::make_unique<FixedStrategy>(cfg.j0, cfg.d_p0, 0.0, "constant");
    if (name == "j_adaptive") return std::make_unique<JAdaptiveStrategy>(cfg);
    if (name == "dp_adaptive") return std::make_unique<DpAdaptiveStrategy>(cfg);
    if (name == "jdp_adaptive") return std::make_unique<JDpAdaptiveStrategy>(cfg);
    if (name == "proposed") return std::make_unique<ProposedStrategy>(cfg, ctx);
    throw ConfigError("strategy", "unknown strategy '" + std::string(name) + "'; valid names: " + strategy_name_list());
}

}  // namespace vsg
