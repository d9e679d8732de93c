#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vsg/cli.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Virtual synchronous generator active-power loop simulator"};
    app.require_subcommand(1);

    vsg::cli::RunManifest run_m;
    std::string run_strategy;
    double run_dt = 0.0;
    auto* run = app.add_subcommand("run", "Simulate one strategy and write trace.csv and metrics.csv");
    run->add_option("--config", run_m.config, "Scenario file (TOML)")->required();
    run->add_option("--strategy", run_strategy, "constant | j_adaptive | dp_adaptive | jdp_adaptive | proposed")
        ->required();
    run->add_option("--out", run_m.out_dir, "Output directory")->required();
    auto* dt_opt = run->add_option("--dt", run_dt, "Override the integration step, s");

    vsg::cli::RunManifest cmp_m;
    std::string cmp_strategies = "constant,j_adaptive,dp_adaptive,jdp_adaptive,proposed";
    auto* compare = app.add_subcommand("compare", "Run several strategies on one scenario and compare them");
    compare->add_option("--config", cmp_m.config, "Scenario file (TOML)")->required();
    compare->add_option("--strategies", cmp_strategies, "Comma-separated strategy names")->capture_default_str();
    compare->add_option("--out", cmp_m.out_dir, "Output directory")->required();

    std::string analyze_config;
    std::string analyze_format = "text";
    auto* analyze = app.add_subcommand("analyze", "Print the small-signal report for a scenario");
    analyze->add_option("--config", analyze_config, "Scenario file (TOML)")->required();
    analyze->add_option("--format", analyze_format, "text | csv")
        ->check(CLI::IsMember({"text", "csv"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : vsg::cli::kExitConfig;
    }

    if (*run) {
        run_m.strategies = {run_strategy};
        if (*dt_opt) run_m.dt = run_dt;
        return vsg::cli::cmd_run(run_m, std::cout, std::cerr);
    }
    if (*compare) {
        cmp_m.strategies = split_list(cmp_strategies);
        return vsg::cli::cmd_compare(cmp_m, std::cout, std::cerr);
    }
    const auto fmt = analyze_format == "csv" ? vsg::cli::ReportFormat::Csv : vsg::cli::ReportFormat::Text;
    return vsg::cli::cmd_analyze(analyze_config, fmt, std::cout, std::cerr);
}
