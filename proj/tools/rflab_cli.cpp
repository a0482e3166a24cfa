#include "rflab/commands.hpp"
#include "rflab/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

struct Options {
    std::string config;
    std::string out = "run";
    std::optional<int> grid;
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
};

rflab::Overrides overrides(const Options& o)
{
    rflab::Overrides ov;
    ov.grid = o.grid;
    ov.dt = o.dt;
    ov.seed = o.seed;
    ov.jobs = o.jobs;
    return ov;
}

rflab::Json config_or_empty(const Options& o)
{
    if (o.config.empty())
        return rflab::Json::object();
    return rflab::load_config(o.config);
}

int run_simulate(const Options& o)
{
    if (o.config.empty())
        throw rflab::ConfigError("--config", "simulate needs a scenario file");
    const auto sc = rflab::scenario_from_config(rflab::load_config(o.config), overrides(o));
    const auto res = rflab::simulate(sc, std::filesystem::path(o.out));
    const auto& tr = res.trajectory;
    std::printf("%s: %s at t = %s after %zu steps (%s)\n", sc.name.c_str(), rflab::to_string(tr.stop_reason).c_str(),
                rflab::format_number(tr.series.back().t).c_str(), tr.series.size() - 1, o.out.c_str());
    if (res.exit_code != 0)
        std::fprintf(stderr, "numeric_failure: %s\n", tr.message.c_str());
    return res.exit_code;
}

int run_example(const Options& o)
{
    const auto cfg = config_or_empty(o);
    const auto settings = rflab::example_settings_from_config(cfg, overrides(o));
    const auto rows = rflab::analyze_example(settings, o.jobs);
    rflab::write_example(settings, rows, o.out, settings.effective);
    for (const auto& r : rows)
        std::printf("G = %-8s |Rm|_2 = %-12s closed form = %-12s bound = %s\n", rflab::format_number(r.G).c_str(),
                    rflab::format_number(r.rm2_numeric).c_str(), rflab::format_number(r.rm2_closed_form).c_str(),
                    rflab::format_number(r.rm2_upper_bound).c_str());
    return 0;
}

int run_iso(const Options& o)
{
    const auto cfg = config_or_empty(o);
    const auto settings = rflab::iso_settings_from_config(cfg, overrides(o));
    const auto rows = rflab::scan_iso(settings, o.jobs);
    rflab::write_iso(settings, rows, o.out, settings.effective);
    for (const auto& r : rows)
        std::printf("G = %-8s sup Q = %-12s doubled = %s\n", rflab::format_number(r.G).c_str(),
                    rflab::format_number(r.scan.sup).c_str(), rflab::format_number(r.sup_doubled).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ricci flow and local Ricci flow on rotationally symmetric metrics"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "Scenario file (sectioned key = value, or JSON)");
    app.add_option("--out", o.out, "Output directory")->capture_default_str();
    app.add_option("--grid", o.grid, "Override the number of grid intervals")->check(CLI::PositiveNumber);
    app.add_option("--dt", o.dt, "Use a fixed time step")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "Seed for the randomized checks");
    app.add_option("--jobs", o.jobs, "Worker threads for parameter sweeps")->check(CLI::PositiveNumber)->capture_default_str();
    app.fallthrough();

    auto* sim = app.add_subcommand("simulate", "Run a flow scenario and its monitors");
    auto* ex = app.add_subcommand("analyze-example", "Curvature norms of the neck band for a list of G");
    auto* iso = app.add_subcommand("scan-iso", "Isoperimetric quotient scan over the neck band");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed())
            return run_simulate(o);
        if (ex->parsed())
            return run_example(o);
        if (iso->parsed())
            return run_iso(o);
    } catch (const rflab::NumericFailure& e) {
        std::fprintf(stderr, "numeric_failure: %s\n", e.what());
        return 2;
    } catch (const rflab::ParameterError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
