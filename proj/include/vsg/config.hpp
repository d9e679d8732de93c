#pragma once

// Scenario files: TOML with [grid], [vsg], [controller] and [scenario]
// sections. Missing keys keep their defaults; unknown keys are rejected.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include <toml.hpp>

#include "vsg/error.hpp"
#include "vsg/metrics.hpp"
#include "vsg/simulator.hpp"

namespace vsg {

namespace detail {

inline void reject_unknown(const toml::table& tbl, std::string_view section,
                           std::initializer_list<std::string_view> known) {
    for (const auto& [key, node] : tbl) {
        bool ok = false;
        for (auto k : known) ok = ok || key.str() == k;
        if (!ok) throw ConfigError(std::string(section) + "." + std::string(key.str()), "unknown key");
    }
}

inline const toml::table* section(const toml::table& root, std::string_view name) {
    const toml::node* node = root.get(name);
    if (node == nullptr) return nullptr;
    if (!node->is_table()) throw ConfigError(std::string(name), "must be a table");
    return node->as_table();
}

inline void read_number(const toml::table* tbl, std::string_view section, std::string_view key, double& out) {
    if (tbl == nullptr) return;
    const toml::node* node = tbl->get(key);
    if (node == nullptr) return;
    if (auto v = node->value<double>()) {
        out = *v;
        return;
    }
    throw ConfigError(std::string(section) + "." + std::string(key), "expected a number");
}

inline void read_string(const toml::table* tbl, std::string_view section, std::string_view key, std::string& out) {
    if (tbl == nullptr) return;
    const toml::node* node = tbl->get(key);
    if (node == nullptr) return;
    if (auto v = node->value<std::string>()) {
        out = *v;
        return;
    }
    throw ConfigError(std::string(section) + "." + std::string(key), "expected a string");
}

}  // namespace detail

/// Parses and validates a scenario. `source` names the input in diagnostics.
inline Scenario parse_scenario(std::string_view text, std::string_view source = "config") {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& err) {
        std::ostringstream msg;
        msg << source << ":" << err.source().begin.line << ":" << err.source().begin.column << ": "
            << err.description();
        throw ConfigError("", msg.str());
    }

    detail::reject_unknown(root, "", {"grid", "vsg", "controller", "scenario"});
    Scenario sc;

    const toml::table* grid = detail::section(root, "grid");
    if (grid != nullptr) {
        detail::reject_unknown(*grid, "grid", {"u_g", "e", "l_filter", "l_line", "r_line", "omega_0", "c_filter"});
        detail::read_number(grid, "grid", "u_g", sc.grid.u_g);
        detail::read_number(grid, "grid", "e", sc.grid.e);
        detail::read_number(grid, "grid", "l_filter", sc.grid.l_filter);
        detail::read_number(grid, "grid", "l_line", sc.grid.l_line);
        detail::read_number(grid, "grid", "r_line", sc.grid.r_line);
        detail::read_number(grid, "grid", "omega_0", sc.grid.omega_0);
        double c_filter = 0.0;  // accepted for completeness; not part of the series path
        detail::read_number(grid, "grid", "c_filter", c_filter);
        if (c_filter < 0.0) throw ConfigError("grid.c_filter", "must be >= 0");
    }

    const toml::table* vsg = detail::section(root, "vsg");
    if (vsg != nullptr) {
        detail::reject_unknown(*vsg, "vsg",
                               {"j0", "j_min", "j_max", "d_p0", "delta_f_max", "t_threshold", "zeta_nominal",
                                "zeta_boost", "dpedt_epsilon"});
        detail::read_number(vsg, "vsg", "j0", sc.vsg.j0);
        detail::read_number(vsg, "vsg", "j_min", sc.vsg.j_min);
        detail::read_number(vsg, "vsg", "j_max", sc.vsg.j_max);
        detail::read_number(vsg, "vsg", "d_p0", sc.vsg.d_p0);
        detail::read_number(vsg, "vsg", "delta_f_max", sc.vsg.delta_f_max);
        detail::read_number(vsg, "vsg", "t_threshold", sc.vsg.t_threshold);
        detail::read_number(vsg, "vsg", "zeta_nominal", sc.vsg.zeta_nominal);
        detail::read_number(vsg, "vsg", "zeta_boost", sc.vsg.zeta_boost);
        detail::read_number(vsg, "vsg", "dpedt_epsilon", sc.vsg.dpedt_epsilon);
    }

    const toml::table* ctl = detail::section(root, "controller");
    if (ctl != nullptr) {
        detail::reject_unknown(*ctl, "controller",
                               {"strategy", "j_big", "j_small", "k_dp", "dp_threshold_hz", "k_dp_joint"});
        detail::read_string(ctl, "controller", "strategy", sc.strategy);
        detail::read_number(ctl, "controller", "j_big", sc.vsg.j_big);
        detail::read_number(ctl, "controller", "j_small", sc.vsg.j_small);
        detail::read_number(ctl, "controller", "k_dp", sc.vsg.k_dp);
        detail::read_number(ctl, "controller", "dp_threshold_hz", sc.vsg.dp_threshold_hz);
        detail::read_number(ctl, "controller", "k_dp_joint", sc.vsg.k_dp_joint);
    }

    const toml::table* scen = detail::section(root, "scenario");
    if (scen != nullptr) {
        detail::reject_unknown(*scen, "scenario", {"duration", "dt", "p_m0", "q_ref", "events", "power_model"});
        detail::read_number(scen, "scenario", "duration", sc.duration);
        detail::read_number(scen, "scenario", "dt", sc.dt);
        detail::read_number(scen, "scenario", "p_m0", sc.p_m0);
        detail::read_number(scen, "scenario", "q_ref", sc.q_ref);

        std::string model = "full";
        detail::read_string(scen, "scenario", "power_model", model);
        if (model == "full") sc.power_model = PowerModel::Full;
        else if (model == "small_angle") sc.power_model = PowerModel::SmallAngle;
        else throw ConfigError("scenario.power_model", "expected \"full\" or \"small_angle\"");

        if (const toml::node* ev = scen->get("events")) {
            const toml::array* arr = ev->as_array();
            if (arr == nullptr) throw ConfigError("scenario.events", "expected an array of {time, p_m} tables");
            sc.events.clear();
            for (std::size_t i = 0; i < arr->size(); ++i) {
                const std::string field = "scenario.events[" + std::to_string(i) + "]";
                const toml::table* item = arr->get(i)->as_table();
                if (item == nullptr) throw ConfigError(field, "expected a {time, p_m} table");
                detail::reject_unknown(*item, field, {"time", "p_m"});
                if (!item->contains("time")) throw ConfigError(field + ".time", "missing");
                if (!item->contains("p_m")) throw ConfigError(field + ".p_m", "missing");
                PowerStep step;
                detail::read_number(item, field, "time", step.time);
                detail::read_number(item, field, "p_m", step.p_m);
                sc.events.push_back(step);
            }
        }
    }

    validate(sc);
    if (sc.strategy.empty()) throw ConfigError("controller.strategy", "must not be empty");
    return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", path.string() + ": file not found");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

/// The first power step of a scenario, observed until the next step or the
/// end of the run.
inline StepWindow primary_step(const Scenario& sc) {
    StepWindow w;
    w.p_initial = sc.p_m0;
    w.window_end = sc.duration;
    if (sc.events.empty()) {
        w.p_final = sc.p_m0;
        return w;
    }
    w.step_time = sc.events.front().time;
    w.p_final = sc.events.front().p_m;
    if (sc.events.size() > 1) w.window_end = sc.events[1].time;
    return w;
}

inline MetricsOptions metrics_options(const Scenario& sc, double band_pct = 2.0) {
    return {sc.vsg.j0, sc.vsg.d_p0, sc.vsg.delta_f_max, band_pct};
}

}  // namespace vsg
