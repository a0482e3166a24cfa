#include "rflab/commands.hpp"

#include "rflab/errors.hpp"
#include "rflab/monitors.hpp"
#include "rflab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>
#include <thread>

namespace rflab {

namespace {

/// Typed access to one config section; remembers which keys were read so
/// that misspelt keys are reported instead of silently ignored.
class Section {
public:
    Section(const Json& root, std::string name) : name_(std::move(name))
    {
        if (root.contains(name_)) {
            if (!root.at(name_).is_object())
                throw ConfigError(name_, "expected a section");
            node_ = &root.at(name_);
        }
    }

    bool present() const { return node_ != nullptr; }
    bool has(const std::string& key) const { return node_ && node_->contains(key); }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt)
    {
        const Json* v = lookup(key, fallback.has_value());
        if (!v)
            return record(key, *fallback);
        if (!v->is_number())
            throw ConfigError(field(key), "expected a number");
        const double d = v->get<double>();
        if (!std::isfinite(d))
            throw ConfigError(field(key), "expected a finite number");
        return record(key, d);
    }

    long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt)
    {
        const Json* v = lookup(key, fallback.has_value());
        if (!v)
            return record(key, *fallback);
        if (v->is_number_integer())
            return record(key, v->get<long long>());
        if (v->is_number_float()) {
            const double d = v->get<double>();
            if (d == std::floor(d) && std::abs(d) < 9.0e15)
                return record(key, static_cast<long long>(d));
        }
        throw ConfigError(field(key), "expected an integer");
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt)
    {
        const Json* v = lookup(key, fallback.has_value());
        if (!v)
            return record(key, *fallback);
        if (!v->is_string())
            throw ConfigError(field(key), "expected a string");
        return record(key, v->get<std::string>());
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt)
    {
        const Json* v = lookup(key, fallback.has_value());
        if (!v)
            return record(key, *fallback);
        std::vector<double> out;
        if (v->is_number())
            return record(key, std::vector<double>{v->get<double>()});
        if (!v->is_array())
            throw ConfigError(field(key), "expected a list of numbers");
        for (const auto& item : *v) {
            if (!item.is_number())
                throw ConfigError(field(key), "expected a list of numbers");
            out.push_back(item.get<double>());
        }
        return record(key, out);
    }

    std::vector<std::string> texts(const std::string& key, std::optional<std::vector<std::string>> fallback)
    {
        const Json* v = lookup(key, fallback.has_value());
        if (!v)
            return record(key, *fallback);
        if (v->is_string()) {
            const std::string s = v->get<std::string>();
            if (s.empty() || s == "none")
                return record(key, std::vector<std::string>{});
            return record(key, std::vector<std::string>{s});
        }
        if (!v->is_array())
            throw ConfigError(field(key), "expected a list of names");
        std::vector<std::string> out;
        for (const auto& item : *v) {
            if (!item.is_string())
                throw ConfigError(field(key), "expected a list of names");
            out.push_back(item.get<std::string>());
        }
        return record(key, out);
    }

    /// Every key read so far with its resolved value (defaults included).
    Json& resolved() { return resolved_; }

    void finish() const
    {
        if (!node_)
            return;
        for (const auto& item : node_->items())
            if (!used_.count(item.key()))
                throw ConfigError(field(item.key()), "unknown key");
    }

    std::string field(const std::string& key) const { return name_ + "." + key; }

private:
    template <class T>
    T record(const std::string& key, T value)
    {
        resolved_[key] = value;
        return value;
    }

    const Json* lookup(const std::string& key, bool optional)
    {
        used_.insert(key);
        if (node_ && node_->contains(key))
            return &node_->at(key);
        if (!optional)
            throw ConfigError(field(key), "missing required key");
        return nullptr;
    }

    std::string name_;
    const Json* node_ = nullptr;
    std::set<std::string> used_;
    Json resolved_ = Json::object();
};

void check_sections(const Json& root, const std::set<std::string>& allowed)
{
    if (!root.is_object())
        throw ConfigError("config", "top level must be an object of sections");
    for (const auto& item : root.items())
        if (!allowed.count(item.key()))
            throw ConfigError(item.key(), "unknown section");
}

template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn fn)
{
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers)
                    fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

Json item_json(const HypothesisItem& h)
{
    Json j;
    j["pass"] = h.pass;
    j["applicable"] = h.applicable;
    j["measured"] = h.measured;
    j["bound"] = h.bound;
    j["margin"] = h.margin;
    return j;
}

Json ak_json(const AkReport& r)
{
    Json j;
    j["q"] = r.q;
    j["mu"] = r.mu;
    j["tangential_curvature_positive"] = item_json(r.tangential);
    j["scalar_curvature_positive"] = item_json(r.scalar);
    j["pinching_bounded"] = item_json(r.pinching);
    j["radius_ratio"] = item_json(r.ratio);
    j["necks"] = r.necks;
    j["bumps"] = r.bumps;
    j["all_pass"] = r.all_pass();
    return j;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

void write_manifest(const std::filesystem::path& out_dir, const std::string& command, const Json& effective,
                    Json extra)
{
    Json m;
    m["command"] = command;
    m["library_version"] = kLibraryVersion;
    m["config_hash"] = config_hash(effective);
    for (auto& item : extra.items())
        m[item.key()] = item.value();
    m["config"] = effective;
    save_json(out_dir / "manifest.json", m);
}

} // namespace

std::string config_hash(const Json& effective)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : effective.dump()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ProfileMetric build_profile(const Json& section, std::optional<int> grid, Json* resolved)
{
    Json root;
    root["profile"] = section;
    Section s(root, "profile");
    const std::string builder = s.text("builder");
    ProfileMetric p;
    try {
        if (builder == "round_sphere") {
            const int q = static_cast<int>(s.integer("q", 3));
            const double rho = s.number("rho", 1.0);
            const int M = grid.value_or(static_cast<int>(s.integer("M", 400)));
            p = build_round_sphere(rho, q, M);
        } else if (builder == "cylinder") {
            const int q = static_cast<int>(s.integer("q", 3));
            const double rho = s.number("rho", 1.0);
            const double length = s.number("length", 2.0 * std::numbers::pi);
            const int M = grid.value_or(static_cast<int>(s.integer("M", 200)));
            p = build_cylinder(rho, q, length, M);
        } else if (builder == "dumbbell") {
            DumbbellShape sh;
            sh.G = s.number("G");
            sh.c = s.number("c");
            sh.q = static_cast<int>(s.integer("q", 3));
            sh.kappa = s.number("kappa", 1.0);
            sh.blend_width = s.number("blend_width", -1.0);
            sh.cluster = s.number("cluster", 0.9);
            sh.M = grid.value_or(static_cast<int>(s.integer("M", 800)));
            p = build_dumbbell(sh);
        } else if (builder == "file") {
            p = load_profile(s.text("path")).profile;
        } else {
            throw ConfigError(s.field("builder"), "unknown builder '" + builder + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const ParameterError& e) {
        throw ConfigError("profile", e.what());
    } catch (const ConstructionError& e) {
        throw ConfigError("profile", e.what());
    }
    s.finish();
    if (grid && builder != "file")
        s.resolved()["M"] = *grid;
    if (resolved)
        *resolved = s.resolved();
    return p;
}

Scenario scenario_from_config(const Json& config, const Overrides& overrides)
{
    check_sections(config, {"scenario", "profile", "cutoff", "dt", "stop", "monitors"});
    Scenario sc;
    Section scen(config, "scenario");
    sc.name = scen.text("name", "scenario");
    const std::string mode = scen.text("mode", "ricci");
    try {
        sc.flow.mode = flow_mode_from_string(mode);
    } catch (const ParameterError& e) {
        throw ConfigError(scen.field("mode"), e.what());
    }
    sc.flow.t_end = scen.number("t_end");
    const long long stride = scen.integer("snapshot_stride", 1);
    if (stride < 1)
        throw ConfigError(scen.field("snapshot_stride"), "must be >= 1");
    sc.flow.snapshot_stride = static_cast<std::size_t>(stride);
    const long long seed = scen.integer("seed", 0);
    if (seed < 0)
        throw ConfigError(scen.field("seed"), "must be >= 0");
    sc.seed = overrides.seed.value_or(static_cast<std::uint64_t>(seed));
    scen.finish();

    if (!config.contains("profile"))
        throw ConfigError("profile", "missing required section");
    Json profile_resolved;
    sc.initial = build_profile(config.at("profile"), overrides.grid, &profile_resolved);
    sc.grid = static_cast<int>(sc.initial.size()) - (sc.initial.closed() ? 1 : 0);

    Section cut(config, "cutoff");
    if (cut.present()) {
        try {
            if (cut.has("value")) {
                sc.flow.cutoff = unit_cutoff(sc.initial, cut.number("value"));
            } else {
                const double center = cut.number("center", 0.0);
                const double r_in = cut.number("r_in");
                const double r_out = cut.number("r_out");
                sc.flow.cutoff = build_cutoff(sc.initial, center, r_in, r_out);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("cutoff", e.what());
        }
        cut.finish();
    }

    Section dt(config, "dt");
    const std::string policy = overrides.dt ? std::string("fixed") : dt.text("policy", "adaptive");
    sc.flow.dt.cfl = dt.number("cfl", 0.5);
    if (policy == "adaptive") {
        sc.flow.dt.adaptive = true;
    } else if (policy == "fixed") {
        sc.flow.dt.adaptive = false;
        sc.flow.dt.fixed_dt = overrides.dt ? *overrides.dt : dt.number("dt");
    } else {
        throw ConfigError(dt.field("policy"), "expected 'adaptive' or 'fixed'");
    }
    if (overrides.dt)
        dt.number("dt", 0.0);
    dt.finish();

    Section stop(config, "stop");
    sc.flow.pinch_fraction = stop.number("pinch_fraction", 1e-3);
    if (stop.has("curvature_cap"))
        sc.flow.curvature_cap = stop.number("curvature_cap");
    stop.finish();

    Section mon(config, "monitors");
    sc.monitors.enabled = mon.texts("list", std::vector<std::string>{});
    static const std::set<std::string> known{"ak", "pinch", "perelman", "energy", "extension"};
    for (const auto& m : sc.monitors.enabled)
        if (!known.count(m))
            throw ConfigError(mon.field("list"), "unknown monitor '" + m + "'");
    sc.monitors.mu = mon.number("mu", 2.0);
    sc.monitors.alpha = mon.number("alpha", 1.0);
    sc.monitors.eps_r = mon.number("eps_r", 1.0);
    sc.monitors.s0 = mon.number("s0", 0.0);
    sc.monitors.eta = mon.number("eta", 1.0);
    sc.monitors.iso_eps = mon.number("iso_eps", 0.0);
    sc.monitors.growth_constant = mon.number("growth_constant", 100.0);
    mon.finish();

    try {
        sc.flow.validate(sc.initial);
    } catch (const ParameterError& e) {
        throw ConfigError("scenario", e.what());
    }
    if (!sc.flow.dt.adaptive) {
        const double limit = cfl_limit(sc.initial, sc.flow.dt.cfl);
        if (sc.flow.dt.fixed_dt > limit)
            throw ConfigError("dt.dt", "fixed dt " + format_number(sc.flow.dt.fixed_dt) + " exceeds the CFL limit " +
                                           format_number(limit));
    }

    scen.resolved()["seed"] = sc.seed;
    sc.effective = Json::object();
    sc.effective["scenario"] = scen.resolved();
    sc.effective["profile"] = profile_resolved;
    if (cut.present())
        sc.effective["cutoff"] = cut.resolved();
    dt.resolved()["policy"] = policy;
    if (overrides.dt)
        dt.resolved()["dt"] = *overrides.dt;
    sc.effective["dt"] = dt.resolved();
    sc.effective["stop"] = stop.resolved();
    sc.effective["monitors"] = mon.resolved();
    return sc;
}

Json monitor_reports(const Trajectory& tr, const MonitorSettings& settings, std::uint64_t seed)
{
    Json out = Json::object();
    const auto& p0 = tr.snapshots.front().profile;
    for (const auto& name : settings.enabled) {
        if (name == "ak") {
            const auto rep = ak_hypotheses(p0, settings.mu);
            Json j = ak_json(rep);
            // Robustness: random psi perturbations below 1e-6 must not flip any condition.
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> noise(-1e-7, 1e-7);
            bool stable = true;
            for (int trial = 0; trial < 8; ++trial) {
                ProfileMetric p = p0;
                const std::size_t lo = p.closed() ? 1 : 0;
                const std::size_t hi = p.closed() ? p.size() - 1 : p.size();
                for (std::size_t i = lo; i < hi; ++i)
                    p.psi[i] += noise(rng) * p.psi[i];
                const auto r2 = ak_hypotheses(p, settings.mu);
                stable = stable && r2.tangential.pass == rep.tangential.pass && r2.scalar.pass == rep.scalar.pass &&
                         r2.pinching.pass == rep.pinching.pass && r2.ratio.pass == rep.ratio.pass;
            }
            j["stable_under_perturbation"] = stable;
            out["ak"] = std::move(j);
        } else if (name == "pinch") {
            const auto r = pinch_monitor(tr, settings.mu);
            Json j;
            j["pinched"] = r.pinched;
            j["has_neck"] = r.has_neck;
            j["singular_time"] = r.singular_time;
            j["resolution"] = r.resolution;
            j["r_min0"] = r.r_min0;
            j["threshold"] = r.threshold;
            j["weak_threshold"] = r.weak_threshold;
            j["assertion_checked"] = r.assertion_checked;
            j["below_threshold"] = r.below_threshold;
            j["below_weak_threshold"] = r.below_weak_threshold;
            j["volume_at_stop"] = r.volume_at_stop;
            j["volume_positive"] = r.volume_at_stop > 0.0;
            j["hypotheses_at_t0"] = ak_json(r.hypotheses);
            j["caveat"] = r.caveat;
            out["pinch"] = std::move(j);
        } else if (name == "perelman") {
            const auto r = perelman_monitor(tr, settings.alpha, settings.eps_r, settings.s0);
            Json j;
            j["alpha"] = r.alpha;
            j["eps_r"] = r.eps_r;
            j["s0"] = r.s0;
            j["max_curvature_margin"] = r.max_curvature_margin;
            j["min_volume_ratio"] = r.min_volume_ratio;
            Json samples = Json::array();
            for (const auto& s : r.samples)
                samples.push_back({{"t", s.t}, {"curvature_margin", s.curvature_margin}, {"volume_ratio", s.volume_ratio}});
            j["samples"] = std::move(samples);
            out["perelman"] = std::move(j);
        } else if (name == "energy") {
            if (tr.mode != FlowMode::LocalRicci)
                throw ConfigError("monitors.list", "the energy monitor needs mode = local_ricci");
            const int d = p0.dim();
            const double A0 = sobolev_from_iso(d, deane_iso_constant(d, settings.eta, settings.iso_eps));
            const auto r = lrf_energy_monitor(tr, A0, settings.growth_constant);
            Json j;
            j["grad_chi_inf"] = r.grad_chi_inf;
            j["growth_rate"] = r.growth_rate;
            j["growth_constant"] = r.growth_constant;
            j["growth_within"] = r.growth_within;
            j["e2_exponent"] = optional_json(r.e2_exponent);
            j["A0"] = r.A0;
            j["rm_norm0"] = r.rm_norm0;
            j["gate"] = r.gate;
            j["gate_holds"] = r.gate_holds;
            j["energy_first"] = r.energy.front();
            j["energy_last"] = r.energy.back();
            out["energy"] = std::move(j);
        } else if (name == "extension") {
            const auto r = extension_tracker(tr);
            Json j;
            j["sup_chi2_rm_inf"] = r.sup_chi2_rm_inf;
            j["sup_rm_inf"] = r.sup_rm_inf;
            Json samples = Json::array();
            for (const auto& s : r.samples)
                samples.push_back({{"t", s.t},
                                   {"chi2_rm_inf", s.chi2_rm_inf},
                                   {"grad_chi2_rm_p4", s.grad_chi2_rm_p4},
                                   {"grad_chi2_rm_p8", s.grad_chi2_rm_p8},
                                   {"hess_chi_p4", s.hess_chi_p4},
                                   {"hess_chi_p8", s.hess_chi_p8}});
            j["samples"] = std::move(samples);
            out["extension"] = std::move(j);
        }
    }
    return out;
}

SimulationResult simulate(const Scenario& sc, const std::optional<std::filesystem::path>& out_dir)
{
    SimulationResult res;
    res.trajectory = run_flow(sc.initial, sc.flow);
    const auto& tr = res.trajectory;
    res.monitors = Json::object();
    res.monitors["stop_reason"] = to_string(tr.stop_reason);
    res.monitors["message"] = tr.message;
    res.monitors["t_final"] = tr.series.back().t;
    res.monitors["steps"] = tr.series.size() - 1;
    res.monitors["psi_min0"] = tr.psi_min0;
    res.monitors["curvature_cap"] = tr.curvature_cap;
    res.monitors["reports"] = monitor_reports(tr, sc.monitors, sc.seed);
    res.exit_code = tr.stop_reason == StopReason::NumericFailure ? 2 : 0;

    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        CsvWriter csv({"t", "dt", "psi_min", "rm_max", "chi2_rm_max", "volume", "energy", "energy2"});
        for (const auto& r : tr.series)
            csv.add_row(std::vector<double>{r.t, r.dt, r.psi_min, r.rm_max, r.chi2_rm_max, r.volume, r.energy, r.energy2});
        csv.save(*out_dir / "series.csv");
        Json outputs = Json::array({"series.csv", "monitors.json"});
        for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshots/snapshot_%05zu.txt", k);
            save_profile(*out_dir / name, tr.snapshots[k].profile, tr.snapshots[k].t);
            outputs.push_back(name);
        }
        save_json(*out_dir / "monitors.json", res.monitors);
        Json extra;
        extra["scenario"] = sc.name;
        extra["grid"] = sc.grid;
        extra["nodes"] = sc.initial.size();
        extra["seed"] = sc.seed;
        extra["stop_reason"] = to_string(tr.stop_reason);
        extra["outputs"] = outputs;
        write_manifest(*out_dir, "simulate", sc.effective, extra);
    }
    return res;
}

// --- neck example ----------------------------------------------------------

double band_rm2_closed_form(double G, double c)
{
    if (!(G > 0.0) || !(c > 0.0))
        throw ParameterError("band_rm2_closed_form: G and c must be positive");
    const double u = c / G;
    const double I = u * (2.0 * u * u + 3.0) / (3.0 * std::pow(1.0 + u * u, 1.5));
    return std::sqrt(24.0 * 2.0 * sphere_area(3) * I);
}

double band_rm2_upper_bound(double G, double c)
{
    if (!(G > 0.0) || !(c > 0.0))
        throw ParameterError("band_rm2_upper_bound: G and c must be positive");
    const double r = G / (G + c);
    return std::sqrt(4.0 * 6.0 * std::pow(2.0, 1.5) * sphere_area(3) * (1.0 - std::pow(r, 4)));
}

ExampleSettings example_settings_from_config(const Json& config, const Overrides& overrides)
{
    check_sections(config, {"example"});
    ExampleSettings s;
    Section ex(config, "example");
    s.G = ex.numbers("G", s.G);
    s.c = ex.number("c", s.c);
    s.p = ex.numbers("p", s.p);
    s.M = overrides.grid.value_or(static_cast<int>(ex.integer("M", s.M)));
    s.cluster = ex.number("cluster", s.cluster);
    ex.finish();
    ex.resolved()["M"] = s.M;
    s.effective["example"] = ex.resolved();
    if (s.G.empty())
        throw ConfigError("example.G", "needs at least one value");
    for (double g : s.G)
        if (!(g > 0.0 && g < s.c))
            throw ConfigError("example.G", "values must satisfy 0 < G < c");
    for (double p : s.p)
        if (!(p >= 1.0))
            throw ConfigError("example.p", "values must be >= 1");
    return s;
}

std::vector<ExampleRow> analyze_example(const ExampleSettings& settings, int jobs)
{
    std::vector<ExampleRow> rows(settings.G.size());
    const double gap = varpi(4, 1.0);
    parallel_for(rows.size(), jobs, [&](std::size_t k) {
        const double G = settings.G[k];
        DumbbellShape sh;
        sh.G = G;
        sh.c = settings.c;
        sh.q = 3;
        sh.kappa = 1.0;
        sh.M = settings.M;
        sh.cluster = settings.cluster;
        const auto p = build_dumbbell(sh);
        const auto cs = evaluate_curvature(p);
        const auto ric = ricci_norm(cs);
        const Band band = Band::around(0.0, settings.c);
        ExampleRow row;
        row.G = G;
        row.rm2_numeric = lp_norm(cs.rm_norm, 2.0, p, band);
        row.rm2_closed_form = band_rm2_closed_form(G, settings.c);
        row.rm2_upper_bound = band_rm2_upper_bound(G, settings.c);
        for (double pp : settings.p)
            row.ric_p.push_back(lp_norm(ric, pp, p, band));
        row.gap_ratio = row.rm2_numeric / gap;
        rows[k] = std::move(row);
    });
    return rows;
}

void write_example(const ExampleSettings& settings, const std::vector<ExampleRow>& rows,
                   const std::filesystem::path& out_dir, const Json& effective)
{
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> header{"G", "rm2_numeric", "rm2_closed_form", "rm2_rel_error", "rm2_upper_bound"};
    for (double p : settings.p)
        header.push_back("ric_p" + format_number(p));
    header.push_back("gap_ratio");
    CsvWriter csv(header);
    for (const auto& r : rows) {
        std::vector<double> v{r.G, r.rm2_numeric, r.rm2_closed_form,
                              std::abs(r.rm2_numeric - r.rm2_closed_form) / r.rm2_closed_form, r.rm2_upper_bound};
        v.insert(v.end(), r.ric_p.begin(), r.ric_p.end());
        v.push_back(r.gap_ratio);
        csv.add_row(v);
    }
    csv.save(out_dir / "example.csv");

    // Trend of |Ric|_p as G decreases, in the order of the sorted G values.
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rows[a].G > rows[b].G; });
    Json summary;
    summary["c"] = settings.c;
    summary["M"] = settings.M;
    summary["varpi_4_1"] = varpi(4, 1.0);
    Json trend = Json::object();
    for (std::size_t k = 0; k < settings.p.size(); ++k) {
        bool increasing = true;
        for (std::size_t i = 1; i < order.size(); ++i)
            increasing = increasing && rows[order[i]].ric_p[k] > rows[order[i - 1]].ric_p[k];
        trend["p" + format_number(settings.p[k])] = increasing;
    }
    summary["ric_p_increasing_as_G_decreases"] = trend;
    double max_gap = 0.0;
    bool bound_holds = true;
    for (const auto& r : rows) {
        max_gap = std::max(max_gap, r.gap_ratio);
        bound_holds = bound_holds && r.rm2_numeric <= r.rm2_upper_bound;
    }
    summary["max_gap_ratio"] = max_gap;
    summary["upper_bound_holds"] = bound_holds;
    save_json(out_dir / "example.json", summary);
    write_manifest(out_dir, "analyze-example", effective,
                   Json{{"grid", settings.M}, {"outputs", Json::array({"example.csv", "example.json"})}});
}

// --- isoperimetric scan ----------------------------------------------------

IsoSettings iso_settings_from_config(const Json& config, const Overrides& overrides)
{
    check_sections(config, {"iso"});
    IsoSettings s;
    Section iso(config, "iso");
    s.G = iso.numbers("G", s.G);
    s.c = iso.number("c", s.c);
    s.resolution = static_cast<int>(iso.integer("resolution", s.resolution));
    s.M = overrides.grid.value_or(static_cast<int>(iso.integer("M", s.M)));
    s.cluster = iso.number("cluster", s.cluster);
    iso.finish();
    iso.resolved()["M"] = s.M;
    s.effective["iso"] = iso.resolved();
    if (s.G.empty())
        throw ConfigError("iso.G", "needs at least one value");
    for (double g : s.G)
        if (!(g > 0.0 && g < s.c))
            throw ConfigError("iso.G", "values must satisfy 0 < G < c");
    if (s.resolution < 1)
        throw ConfigError("iso.resolution", "must be >= 1");
    return s;
}

std::vector<IsoRow> scan_iso(const IsoSettings& settings, int jobs)
{
    std::vector<IsoRow> rows(settings.G.size());
    parallel_for(rows.size(), jobs, [&](std::size_t k) {
        DumbbellShape sh;
        sh.G = settings.G[k];
        sh.c = settings.c;
        sh.q = 3;
        sh.kappa = 1.0;
        sh.M = settings.M;
        sh.cluster = settings.cluster;
        const auto p = build_dumbbell(sh);
        auto grid = [&](int n) {
            std::vector<double> b;
            for (int i = 1; i <= n; ++i)
                b.push_back(settings.c * i / n);
            return b;
        };
        IsoRow row;
        row.G = settings.G[k];
        row.scan = iso_quotient_scan(p, grid(settings.resolution), 0.0);
        row.sup_doubled = iso_quotient_scan(p, grid(2 * settings.resolution), 0.0).sup;
        row.monotone_in_b = std::is_sorted(row.scan.quotient.begin(), row.scan.quotient.end());
        rows[k] = std::move(row);
    });
    return rows;
}

void write_iso(const IsoSettings& settings, const std::vector<IsoRow>& rows, const std::filesystem::path& out_dir,
               const Json& effective)
{
    std::filesystem::create_directories(out_dir);
    CsvWriter csv({"G", "b", "volume", "boundary", "quotient"});
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.scan.b.size(); ++i)
            csv.add_row(std::vector<double>{r.G, r.scan.b[i], r.scan.volume[i], r.scan.boundary[i], r.scan.quotient[i]});
    csv.save(out_dir / "iso.csv");

    Json summary;
    summary["c"] = settings.c;
    summary["resolution"] = settings.resolution;
    Json per = Json::array();
    double sup = 0.0, sup2 = 0.0;
    bool finite = true;
    for (const auto& r : rows) {
        for (double q : r.scan.quotient)
            finite = finite && std::isfinite(q);
        per.push_back({{"G", r.G},
                       {"sup", r.scan.sup},
                       {"argsup_b", r.scan.b[r.scan.argsup]},
                       {"sup_doubled_resolution", r.sup_doubled},
                       {"monotone_in_b", r.monotone_in_b}});
        sup = std::max(sup, r.scan.sup);
        sup2 = std::max(sup2, r.sup_doubled);
    }
    summary["per_G"] = per;
    summary["sup"] = sup;
    summary["sup_doubled_resolution"] = sup2;
    summary["resolution_change"] = std::abs(sup2 - sup) / sup;
    summary["stable_2pct"] = std::abs(sup2 - sup) <= 0.02 * sup;
    summary["all_finite"] = finite;
    save_json(out_dir / "iso.json", summary);
    write_manifest(out_dir, "scan-iso", effective,
                   Json{{"grid", settings.M}, {"outputs", Json::array({"iso.csv", "iso.json"})}});
}

} // namespace rflab
