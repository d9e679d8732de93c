// Acceptance checks. One line per criterion; nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vsg/cli.hpp"
#include "vsg/vsg.hpp"

namespace {

using namespace vsg;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Scenario small_step() {
    Scenario sc;
    sc.p_m0 = 157.0;
    sc.events = {{0.5, 170.0}};
    sc.duration = 1.5;
    return sc;
}

// 1. Nonlinear run against the closed-form step response, fixed J, Dp, Kt = 0.
Outcome criterion1() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    const Scenario sc = small_step();
    const Plant plant = Plant::from(sc.grid);
    FixedStrategy fixed(sc.vsg.j0, sc.vsg.d_p0, 0.0);
    const RunResult run = simulate(sc, fixed);
    o.require(!run.failure, "integration failed");
    if (run.failure) return o;

    // Linearize about the pre-step operating point.
    const double h_local = local_synchronizing_coefficient(plant.imp, plant.e, plant.u_g, plant.equilibrium(157.0));
    const LoopParams lp{sc.vsg.j0, sc.vsg.d_p0, 0.0, h_local, plant.omega_0};
    const Trace ref = analytic_step_response(lp, 13.0, 1.0, sc.dt);

    const double os_sim = overshoot(run.trace, 0.5, 157.0, 170.0);
    const double os_ref = overshoot(ref, 0.0, 0.0, 13.0);
    const auto ts_sim = settling_time(run.trace, 0.5, 157.0, 170.0);
    const auto ts_ref = settling_time(ref, 0.0, 0.0, 13.0);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    o.require(rel(os_sim, os_ref) <= 0.05, "overshoot mismatch");
    o.require(ts_sim && ts_ref && rel(*ts_sim, *ts_ref) <= 0.05, "settling mismatch");
    o.require(secs < 5.0, "runtime " + fmt("%.2f s", secs));
    o.note("overshoot " + fmt("%.4f", os_sim) + "% vs " + fmt("%.4f", os_ref) + "%");
    if (ts_sim && ts_ref) o.note("settling " + fmt("%.4f", *ts_sim) + " s vs " + fmt("%.4f", *ts_ref) + " s");
    return o;
}

// 2. Kt designed from the damping target.
Outcome criterion2() {
    Outcome o;
    Scenario sc;
    const Plant plant = Plant::from(sc.grid);
    const double h = plant.h_pdelta();

    const double kt11 = kt_for_zeta(1.1, sc.vsg.j0, sc.vsg.d_p0, h, plant.omega_0);
    FixedStrategy designed(sc.vsg.j0, sc.vsg.d_p0, kt11);
    const RunResult big = simulate(sc, designed);
    o.require(!big.failure, "canonical run failed");
    if (!big.failure) {
        const double os = overshoot(big.trace, 6.0, 157.0, 600.0);
        o.require(os <= 1.0, "zeta 1.1 overshoot above 1%");
        o.note("zeta 1.1 overshoot " + fmt("%.4g", os) + "%");
    }

    const double kt05 = kt_for_zeta(0.5, sc.vsg.j0, sc.vsg.d_p0, h, plant.omega_0);
    FixedStrategy under(sc.vsg.j0, sc.vsg.d_p0, kt05);
    const RunResult small = simulate(small_step(), under);
    o.require(!small.failure, "small-step run failed");
    if (!small.failure) {
        const double os = overshoot(small.trace, 0.5, 157.0, 170.0);
        const double expect = 100.0 * oracle::second_order_overshoot(0.5);
        o.require(rel(os, expect) <= 0.10, "zeta 0.5 overshoot off closed form");
        o.note("zeta 0.5 overshoot " + fmt("%.3f", os) + "% vs " + fmt("%.3f", expect) + "%");
    }
    return o;
}

// 3. Proposed strategy on the canonical scenario.
Outcome criterion3() {
    Outcome o;
    const Scenario sc;
    const RunResult r = simulate(sc);
    o.require(!r.failure, "run failed");
    if (r.failure) return o;
    const double df = max_freq_deviation(r.trace);
    const double os = overshoot(r.trace, 6.0, 157.0, 600.0);
    double j_peak = 0.0;
    for (const auto& row : r.trace.rows) j_peak = std::max(j_peak, row.j);
    o.require(df <= 0.5, "max |df| above 0.5 Hz");
    o.require(os <= 2.0, "overshoot above 2%");
    o.require(j_peak <= 0.006, "j above j_max");
    o.note("max|df| " + fmt("%.4f", df) + " Hz, overshoot " + fmt("%.3g", os) + "%, j_peak " + fmt("%.5f", j_peak));
    return o;
}

// 4. Orderings between strategies on the canonical scenario.
Outcome criterion4() {
    Outcome o;
    const Scenario base;
    std::vector<RunResult> runs;
    const std::vector<std::string> names{"constant", "j_adaptive", "proposed"};
    for (const auto& n : names) {
        Scenario sc = base;
        sc.strategy = n;
        runs.push_back(simulate(sc));
        if (runs.back().failure) {
            o.require(false, n + " run failed");
            return o;
        }
    }
    std::vector<NamedTrace> traces;
    for (std::size_t i = 0; i < names.size(); ++i) traces.push_back({names[i], &runs[i].trace});
    const ComparisonReport rep = compare(traces, primary_step(base), metrics_options(base));
    const Metrics& c = rep.at("constant");
    const Metrics& j = rep.at("j_adaptive");
    const Metrics& p = rep.at("proposed");

    auto strictly = [&](double larger, double smaller, const std::string& what) {
        o.require(larger - smaller >= 0.1 * std::abs(larger), what);
    };
    strictly(c.overshoot_pct, j.overshoot_pct, "overshoot constant > j_adaptive");
    strictly(j.overshoot_pct, p.overshoot_pct, "overshoot j_adaptive > proposed");
    strictly(c.max_freq_dev_hz, p.max_freq_dev_hz, "max|df| constant > proposed");
    strictly(j.j_peak_ratio, p.j_peak_ratio, "j_peak_ratio j_adaptive > proposed");
    o.note("overshoot " + fmt("%.3f", c.overshoot_pct) + " > " + fmt("%.3f", j.overshoot_pct) + " > " +
           fmt("%.2g", p.overshoot_pct) + " %");
    o.note("max|df| " + fmt("%.3f", c.max_freq_dev_hz) + " > " + fmt("%.3f", p.max_freq_dev_hz) + " Hz");
    o.note("j ratio " + fmt("%.2f", j.j_peak_ratio) + " > " + fmt("%.2f", p.j_peak_ratio));
    return o;
}

// 5. Stability boundary sweep and root agreement.
Outcome criterion5() {
    Outcome o;
    // Large step so that slowly growing modes near the bound still leave
    // 5 Hz within 2 s; stable runs get a longer tail to show decay.
    Scenario sc;
    sc.events = {{0.5, 600.0}};
    sc.duration = 6.5;
    const Plant plant = Plant::from(sc.grid);
    const double h = plant.h_pdelta();
    const double kt_min = -sc.vsg.d_p0 * plant.omega_0 / h;

    int points = 0, agree = 0;
    for (int k = -11; k <= 10; ++k) {
        const double k_t = kt_min + (k + 0.5) * 1e-3;
        const LoopParams lp{sc.vsg.j0, sc.vsg.d_p0, k_t, h, plant.omega_0};
        const bool predicted = stability_check(lp).stable;

        FixedStrategy fixed(sc.vsg.j0, sc.vsg.d_p0, k_t);
        const RunResult r = simulate(sc, fixed);
        bool diverged = r.failure.has_value();
        double peak = 0.0;
        for (const auto& row : r.trace.rows) {
            if (row.t <= 2.5 && std::abs(row.delta_f_hz) > 5.0) diverged = true;
            peak = std::max(peak, std::abs(row.delta_f_hz));
        }
        const bool converged = !diverged && std::abs(r.trace.rows.back().delta_f_hz) < 0.05 * peak;
        const bool ok = predicted ? converged : diverged;
        ++points;
        if (ok) ++agree;
        else o.require(false, "disagreement at k_t = " + fmt("%.6f", k_t));

        const ModePair m = closed_loop_modes(lp);
        const auto [r1, r2] = oracle::quadratic_roots(lp.j * lp.omega_0, lp.d_p * lp.omega_0 + h * k_t, h);
        const double e1 = std::min(std::abs(m.s1 - r1), std::abs(m.s1 - r2)) / std::abs(m.s1);
        const double e2 = std::min(std::abs(m.s2 - r1), std::abs(m.s2 - r2)) / std::abs(m.s2);
        if (std::max(e1, e2) > 1e-9) o.require(false, "roots off oracle at k_t = " + fmt("%.6f", k_t));
    }
    o.require(points >= 21, "too few grid points");
    o.note(std::to_string(agree) + "/" + std::to_string(points) + " grid points agree");
    return o;
}

// Reference case table for the adaptive law, written from the law itself.
struct Expected {
    double j;
    double zeta;  // 0 when Kt comes from the frequency-limit expression
};

Expected expected_law(double dw, double dwdt, const VsgConfig& c) {
    if (std::abs(dw) >= 2.0 * kPi * c.delta_f_max) return {c.j0, 0.0};
    const bool fast = std::abs(dwdt) > c.t_threshold;
    const double zeta = fast ? c.zeta_boost : c.zeta_nominal;
    const double e = std::exp(-std::abs(dw) / (2.0 * kPi));
    const double gain = std::exp(c.delta_f_max);
    if (fast && dw * dwdt > 0.0) return {std::clamp(c.j0 + (c.j_max - c.j0) * gain * e, c.j0, c.j_max), zeta};
    if (fast && dw * dwdt < 0.0) return {std::clamp(c.j0 - (c.j0 - c.j_min) * gain * e, c.j_min, c.j0), zeta};
    return {c.j0, zeta};
}

// 6. Adaptive law case structure and clamps.
Outcome criterion6() {
    Outcome o;
    const VsgConfig cfg;
    const Plant plant = Plant::from(GridParams{});
    const LoopContext ctx{plant.h_pdelta(), plant.omega_0};
    auto kt_ref = [&](double zeta, double j) {
        return (2.0 * zeta * std::sqrt(ctx.h_pdelta * j * ctx.omega_0) - cfg.d_p0 * ctx.omega_0) / ctx.h_pdelta;
    };

    int cases = 0;
    for (double sdw : {-1.0, 0.0, 1.0})
        for (double sdd : {-1.0, 0.0, 1.0})
            for (bool above : {false, true}) {
                const double dw = sdw * 0.8;  // inside the band
                const double dd = sdd * (above ? 5.0 : 0.1);
                const ControlInputs in{dw, dd, 600.0, 400.0, ctx.h_pdelta * dw};
                const ControlOutputs out = proposed_update(in, cfg, ctx);
                const Expected e = expected_law(dw, dd, cfg);
                const bool ok = std::abs(out.j - e.j) <= 1e-15 && std::abs(out.k_t - kt_ref(e.zeta, e.j)) <= 1e-12 &&
                                out.d_p == cfg.d_p0;
                if (!ok) o.require(false, "case dw " + fmt("%+g", sdw) + " dwdt " + fmt("%+g", dd));
                ++cases;
            }

    // Outside the band: J back at j0, Kt zeroes the acceleration.
    for (double dw : {2.0 * kPi * cfg.delta_f_max, kPi * 1.3, -kPi * 1.2}) {
        const ControlInputs in{dw, 3.0, 600.0, 400.0, ctx.h_pdelta * dw};
        const ControlOutputs out = proposed_update(in, cfg, ctx);
        const double k_expect = std::max((600.0 - 400.0 - ctx.omega_0 * cfg.d_p0 * dw) / (ctx.h_pdelta * dw),
                                         -cfg.d_p0 * ctx.omega_0 / ctx.h_pdelta + 1e-6);
        if (out.j != cfg.j0 || std::abs(out.k_t - k_expect) > 1e-12 * std::max(1.0, std::abs(k_expect)))
            o.require(false, "limit branch at dw " + fmt("%g", dw));
        ++cases;
    }

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dwd(-5.0, 5.0), ddd(-50.0, 50.0), pd(-2000.0, 2000.0);
    int clamped_bad = 0;
    for (int i = 0; i < 10000; ++i) {
        const double dw = dwd(rng);
        const ControlInputs in{dw, ddd(rng), pd(rng), pd(rng), ctx.h_pdelta * dw};
        const ControlOutputs out = proposed_update(in, cfg, ctx);
        if (!(out.j >= cfg.j_min && out.j <= cfg.j_max) || !std::isfinite(out.k_t)) ++clamped_bad;
    }
    o.require(clamped_bad == 0, std::to_string(clamped_bad) + " random samples outside [j_min, j_max]");
    o.note(std::to_string(cases) + " table cases, 10000 random samples");
    return o;
}

// 7. Convergence order of the fixed-step integrator on the linearized plant.
Outcome criterion7() {
    Outcome o;
    Scenario sc;
    sc.power_model = PowerModel::SmallAngle;
    sc.p_m0 = 0.0;
    sc.events = {{0.0, 100.0}};
    sc.duration = 0.2;
    const Plant plant = Plant::from(sc.grid, sc.power_model);
    const double k_t = 0.004;
    const oracle::LinearLoop loop{sc.vsg.j0, sc.vsg.d_p0, k_t, plant.h_pdelta(), plant.omega_0};

    std::vector<double> errors;
    for (double dt : {4e-4, 2e-4, 1e-4}) {
        sc.dt = dt;
        FixedStrategy fixed(sc.vsg.j0, sc.vsg.d_p0, k_t);
        const RunResult r = simulate(sc, fixed);
        double err = 0.0;
        for (const auto& row : r.trace.rows) {
            const auto x = loop.step_state(100.0, row.t);
            err = std::max(err, std::abs(row.delta - x[0]) * plant.h_pdelta());
        }
        errors.push_back(err);
    }
    const double q1 = std::log2(errors[0] / errors[1]);
    const double q2 = std::log2(errors[1] / errors[2]);
    o.require(q1 >= 3.5 && q2 >= 3.5, "observed order below 3.5");
    o.note("max error " + fmt("%.3e", errors[0]) + ", " + fmt("%.3e", errors[1]) + ", " + fmt("%.3e", errors[2]) +
           " W; order " + fmt("%.2f", q1) + ", " + fmt("%.2f", q2));
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// 8. Two compare invocations give byte-identical files.
Outcome criterion8() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "vsg_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::string> names(kStrategyNames.begin(), kStrategyNames.end());
    std::ostringstream sink;
    for (const char* sub : {"a", "b"}) {
        cli::RunManifest m;
        m.config = fs::path(VSG_CONFIG_DIR) / "canonical.toml";
        m.strategies = names;
        m.out_dir = root / sub;
        if (cli::cmd_compare(m, sink, sink) != cli::kExitOk) {
            o.require(false, "compare failed: " + sink.str());
            return o;
        }
    }
    std::size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
        if (!entry.is_regular_file()) continue;
        const fs::path relp = fs::relative(entry.path(), root / "a");
        if (slurp(entry.path()) != slurp(root / "b" / relp)) o.require(false, relp.string() + " differs");
        ++files;
    }
    o.require(files >= 13, "expected 13 output files, found " + std::to_string(files));
    o.note(std::to_string(files) + " files compared");
    fs::remove_all(root);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
        {"small-signal equivalence", criterion1}, {"damping design", criterion2},
        {"proposed bounds", criterion3},          {"strategy orderings", criterion4},
        {"stability boundary", criterion5},       {"adaptive law cases", criterion6},
        {"integrator order", criterion7},         {"determinism", criterion8}};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        std::printf("[%s] criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str());
        if (!o.pass) ++failed;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
