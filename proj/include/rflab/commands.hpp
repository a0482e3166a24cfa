#pragma once

#include "rflab/flow.hpp"
#include "rflab/io.hpp"
#include "rflab/norms.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rflab {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<int> grid;
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
};

/// Builds a profile from a [profile] section: builder = round_sphere | cylinder | dumbbell | file.
/// With `resolved`, stores the section's keys with defaults filled in.
ProfileMetric build_profile(const Json& section, std::optional<int> grid = std::nullopt, Json* resolved = nullptr);

struct MonitorSettings {
    std::vector<std::string> enabled; // any of ak, pinch, perelman, energy, extension
    double mu = 2.0;
    double alpha = 1.0;
    double eps_r = 1.0;
    double s0 = 0.0;
    double eta = 1.0;         // A0 = sobolev_from_iso(d, deane_iso_constant(d, eta, iso_eps))
    double iso_eps = 0.0;
    double growth_constant = 100.0;
};

struct Scenario {
    std::string name;
    ProfileMetric initial;
    FlowConfig flow;
    MonitorSettings monitors;
    std::uint64_t seed = 0;
    int grid = 0;
    Json effective; // resolved config (defaults and overrides applied), hashed into the manifest
};

/// Validates a parsed config (sectioned or JSON) and applies overrides.
/// Throws ConfigError naming the offending field.
Scenario scenario_from_config(const Json& config, const Overrides& overrides = {});

struct SimulationResult {
    Trajectory trajectory;
    Json monitors;
    int exit_code = 0; // 0 for reached_t_end, pinch or cap; 2 for numeric_failure
};

/// Runs the flow and the configured monitors. With an output directory,
/// writes series.csv, snapshots/, monitors.json and manifest.json.
SimulationResult simulate(const Scenario& scenario, const std::optional<std::filesystem::path>& out_dir);

Json monitor_reports(const Trajectory& trajectory, const MonitorSettings& settings, std::uint64_t seed);

// --- neck example analysis -------------------------------------------------

/// |Rm|_2 over the band |s| <= c of psi = sqrt(G^2 + s^2), q = 3, from the closed-form integral.
double band_rm2_closed_form(double G, double c);
/// The upper bound sqrt(4 * 6 * 2^{3/2} alpha(3) [1 - G^4 / (G + c)^4]).
double band_rm2_upper_bound(double G, double c);

struct ExampleSettings {
    std::vector<double> G{0.2, 0.1, 0.05, 0.025, 0.001};
    double c = 1.0;
    std::vector<double> p{2.5, 3.0, 4.0};
    int M = 256000;
    double cluster = 0.9999;
    Json effective; // resolved [example] section when read from a config
};

struct ExampleRow {
    double G = 0.0;
    double rm2_numeric = 0.0;
    double rm2_closed_form = 0.0;
    double rm2_upper_bound = 0.0;
    std::vector<double> ric_p;
    double gap_ratio = 0.0; // rm2_numeric / varpi(4, 1)
};

ExampleSettings example_settings_from_config(const Json& config, const Overrides& overrides = {});
std::vector<ExampleRow> analyze_example(const ExampleSettings& settings, int jobs = 1);
/// Writes example.csv, example.json and manifest.json.
void write_example(const ExampleSettings& settings, const std::vector<ExampleRow>& rows,
                   const std::filesystem::path& out_dir, const Json& effective);

// --- isoperimetric scan ----------------------------------------------------

struct IsoSettings {
    std::vector<double> G{0.2, 0.1, 0.05, 0.025};
    double c = 1.0;
    int resolution = 200; // b = c k / resolution, k = 1..resolution
    int M = 8000;
    double cluster = 0.99999;
    Json effective; // resolved [iso] section when read from a config
};

struct IsoRow {
    double G = 0.0;
    IsoScan scan;
    double sup_doubled = 0.0;  // sup with twice the b resolution
    bool monotone_in_b = false;
};

IsoSettings iso_settings_from_config(const Json& config, const Overrides& overrides = {});
std::vector<IsoRow> scan_iso(const IsoSettings& settings, int jobs = 1);
/// Writes iso.csv, iso.json and manifest.json.
void write_iso(const IsoSettings& settings, const std::vector<IsoRow>& rows, const std::filesystem::path& out_dir,
               const Json& effective);

/// FNV-1a 64-bit hash of the compact JSON dump, as 16 hex digits.
std::string config_hash(const Json& effective);

} // namespace rflab
