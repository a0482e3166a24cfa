// Acceptance checks. Prints one PASS/FAIL line per criterion; exits non-zero if any fails.

#include "oracles/oracles.hpp"

#include "rflab/commands.hpp"
#include "rflab/curvature.hpp"
#include "rflab/errors.hpp"
#include "rflab/flow.hpp"
#include "rflab/monitors.hpp"
#include "rflab/norms.hpp"
#include "rflab/numerics.hpp"
#include "rflab/tensor_lipschitz.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace rflab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Timer {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

FlowConfig fixed_config(double dt, double t_end)
{
    FlowConfig c;
    c.dt.adaptive = false;
    c.dt.fixed_dt = dt;
    c.t_end = t_end;
    c.snapshot_stride = 1;
    return c;
}

ProfileMetric ak_dumbbell(int M)
{
    DumbbellShape sh;
    sh.G = 0.3;
    sh.c = 0.6;
    sh.kappa = 0.8;
    sh.cluster = 0.0;
    sh.M = M;
    return build_dumbbell(sh);
}

// 1 ---------------------------------------------------------------------------
Outcome shrinking_sphere()
{
    const double t_end = 0.1;
    const double exact = std::pow(oracles::exact_sphere_shrink(1.0, 3, t_end), 2);
    std::vector<double> err;
    double runtime = 0.0;
    for (int M : {100, 200, 400}) {
        FlowConfig c;
        c.t_end = t_end;
        c.snapshot_stride = 1000000;
        Timer timer;
        const auto tr = run_flow(build_round_sphere(1.0, 3, M), c);
        runtime = timer.seconds();
        if (tr.stop_reason != StopReason::ReachedTEnd)
            return {false, "M=" + std::to_string(M) + " stopped with " + to_string(tr.stop_reason)};
        const auto& p = tr.snapshots.back().profile;
        double rmax = 0.0;
        for (double v : p.psi)
            rmax = std::max(rmax, v);
        err.push_back(std::abs(rmax * rmax - exact) / exact);
    }
    const double order = numerics::observed_order(err[1], err[2]);
    const bool pass = err[2] < 1e-4 && order >= 1.9 && runtime < 10.0;
    return {pass, "rel err " + fmt(err[2]) + " at M=400, order " + fmt(order, 3) + ", runtime " + fmt(runtime, 3) +
                      " s"};
}

// 2 ---------------------------------------------------------------------------
Outcome band_curvature_order()
{
    std::ostringstream detail;
    bool pass = true;
    for (double G : {0.1, 0.2}) {
        std::vector<double> err;
        for (int M : {800, 1600, 3200}) {
            DumbbellShape sh;
            sh.G = G;
            sh.c = 1.0;
            sh.kappa = 1.0;
            sh.M = M;
            const auto p = build_dumbbell(sh);
            const auto cs = sectional_curvatures(p);
            const auto s = centered_arclength(p);
            double e = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (std::abs(s[i]) > 1.0 + 1e-12)
                    continue;
                const double r = G * G + s[i] * s[i];
                e = std::max(e, std::abs(cs.K_N[i] + G * G / (r * r)));
            }
            err.push_back(e);
        }
        const double order = numerics::observed_order(err[1], err[2]);
        pass = pass && order >= 1.9;
        detail << "G=" << G << " order " << fmt(order, 3) << " (err " << fmt(err[2], 3) << ") ";
    }
    return {pass, detail.str()};
}

// 3 ---------------------------------------------------------------------------
Outcome band_energy()
{
    Timer timer;
    ExampleSettings settings;
    const auto rows = analyze_example(settings, 1);
    double max_rel = 0.0, gap_small = 0.0;
    const double a3 = oracles::sphere_volume(3);
    for (const auto& r : rows) {
        const double oracle = 24.0 * 2.0 * a3 * oracles::band_kn_integral_exact(r.G, settings.c);
        max_rel = std::max(max_rel, std::abs(r.rm2_numeric * r.rm2_numeric - oracle) / oracle);
        if (r.G == 1e-3)
            gap_small = r.rm2_numeric / varpi(4, 1.0);
    }
    const double runtime = timer.seconds();

    bool inequality = true;
    int cells = 0;
    for (double c : {0.3, 0.6, 1.0, 1.5, 2.0})
        for (double frac : {0.02, 0.1, 0.3, 0.6, 0.9}) {
            const double G = frac * c;
            DumbbellShape sh;
            sh.G = G;
            sh.c = c;
            sh.kappa = 1.0;
            sh.M = 16000;
            sh.cluster = 0.999;
            const auto p = build_dumbbell(sh);
            const auto cs = evaluate_curvature(p);
            const double rm2sq = std::pow(lp_norm(cs.rm_norm, 2.0, p, Band::around(0.0, c)), 2);
            const double bound = 4.0 * 6.0 * std::pow(2.0, 1.5) * a3 * (1.0 - std::pow(G / (G + c), 4));
            inequality = inequality && rm2sq <= bound;
            ++cells;
        }
    const bool pass = max_rel < 1e-6 && inequality && gap_small > 100.0 && runtime < 5.0;
    return {pass, "max rel err of |Rm|_2^2 " + fmt(max_rel, 3) + ", bound holds on " + std::to_string(cells) +
                      " cells: " + (inequality ? "yes" : "no") + ", gap ratio at G=1e-3 " + fmt(gap_small, 5) +
                      ", runtime " + fmt(runtime, 3) + " s"};
}

// 4 ---------------------------------------------------------------------------
Outcome varpi_constant()
{
    const double expected = 7.0 / 8.0 * std::numbers::pi / (64.0 * std::sqrt(3.0));
    const double got = varpi(4, 1.0);
    const double err = std::abs(got - expected);
    return {err <= 1e-12, "varpi(4,1) = " + fmt(got, 17) + ", |diff| " + fmt(err, 3)};
}

// 5 ---------------------------------------------------------------------------
Outcome ricci_divergence()
{
    ExampleSettings settings;
    settings.G = {0.2, 0.1, 0.05, 0.025};
    const auto rows = analyze_example(settings, 1);
    bool pass = true;
    std::ostringstream detail;
    for (std::size_t k = 0; k < settings.p.size(); ++k) {
        detail << "p=" << settings.p[k] << ":";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            detail << " " << fmt(rows[i].ric_p[k], 4);
            if (i > 0)
                pass = pass && rows[i].ric_p[k] > rows[i - 1].ric_p[k];
        }
        detail << "; ";
    }
    return {pass, detail.str()};
}

// 6 ---------------------------------------------------------------------------
Outcome iso_bounded()
{
    IsoSettings settings;
    const auto rows = scan_iso(settings, 1);
    double sup = 0.0;
    for (const auto& r : rows)
        sup = std::max(sup, r.scan.sup);
    const double a = rows[rows.size() - 2].scan.sup, b = rows.back().scan.sup;
    const double change = std::abs(b - a) / a;
    return {change < 0.05, "sup Q " + fmt(sup, 6) + ", change across G=0.05 -> 0.025 " + fmt(change, 3)};
}

// 7 ---------------------------------------------------------------------------
Outcome neck_pinch()
{
    const auto p = ak_dumbbell(800);
    const auto ak = ak_hypotheses(p, 2.0);
    FlowConfig c;
    c.t_end = 0.045;
    c.snapshot_stride = 1000000;
    c.pinch_fraction = 1e-3;
    Timer timer;
    const auto tr = run_flow(p, c);
    const double runtime = timer.seconds();
    const double t = tr.series.back().t;
    const double psi_min = tr.series.back().psi_min;
    const bool pass = ak.all_pass() && tr.stop_reason == StopReason::PinchDetected && psi_min < 1e-3 * 0.3 &&
                      t < 0.045 && t < 0.3 && runtime < 120.0;
    return {pass, std::string("hypotheses ") + (ak.all_pass() ? "hold" : "fail") + ", " + to_string(tr.stop_reason) +
                      " at t=" + fmt(t, 6) + " with psi_min " + fmt(psi_min, 3) + ", runtime " + fmt(runtime, 3) +
                      " s"};
}

// 8 ---------------------------------------------------------------------------
Outcome lrf_locality()
{
    const auto p = ak_dumbbell(400);
    FlowConfig c;
    c.mode = FlowMode::LocalRicci;
    c.cutoff = build_cutoff(p, 1.6, 0.3, 0.6);
    c.t_end = 0.04;
    c.snapshot_stride = 1;
    c.curvature_cap = 1e4;
    const auto tr = run_flow(p, c);

    bool identical = true;
    std::size_t frozen = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (c.cutoff->chi[i] != 0.0)
            continue;
        ++frozen;
        for (const auto& snap : tr.snapshots)
            identical = identical && snap.profile.phi[i] == p.phi[i] && snap.profile.psi[i] == p.psi[i];
    }
    double sup = 0.0;
    for (const auto& row : tr.series)
        sup = std::max(sup, row.chi2_rm_max);

    FlowConfig full = c;
    full.cutoff = unit_cutoff(p, 1.0);
    full.snapshot_stride = 1000000;
    const auto tr1 = run_flow(p, full);

    const bool pass = identical && frozen > 0 && tr.stop_reason == StopReason::ReachedTEnd && sup < 1e4 &&
                      tr1.stop_reason == StopReason::CurvatureCap;
    return {pass, std::to_string(frozen) + " frozen nodes " + (identical ? "bit-identical" : "CHANGED") + ", " +
                      to_string(tr.stop_reason) + " with sup |chi^2 Rm| " + fmt(sup, 4) + "; chi=1 run: " +
                      to_string(tr1.stop_reason) + " at t=" + fmt(tr1.series.back().t, 4)};
}

// 9 ---------------------------------------------------------------------------
std::vector<double> residual_study(const std::function<ProfileMetric(int)>& build, bool local, int M0, int levels,
                                   double t0, double shrink)
{
    const double dt_fine = 0.9 * shrink * cfl_limit(build(M0 << (levels - 1)), 0.5);
    std::vector<double> res;
    for (int k = 0; k < levels; ++k) {
        const auto p = build(M0 << k);
        const double dt = dt_fine * (1 << (levels - 1 - k));
        const long n0 = std::lround(t0 / dt);
        auto c = fixed_config(dt, dt * static_cast<double>(n0 + 2));
        if (local) {
            c.mode = FlowMode::LocalRicci;
            c.cutoff = build_cutoff(p, 0.0, 0.5, 1.0);
        }
        const auto tr = run_flow(p, c);
        if (tr.snapshots.size() < static_cast<std::size_t>(n0 + 3))
            throw NumericFailure("residual study run stopped early: " + tr.message);
        res.push_back(curvature_evolution_residual(tr, static_cast<std::size_t>(n0), 3).max_residual);
    }
    return res;
}

Outcome residual_order()
{
    // Windows start after the stiff start-up transient of the semi-discrete system.
    // The sphere stops at M = 80: beyond that, rounding in K_T next to the poles
    // (relative size eps / h^4) divided by dt dominates the residual.
    const auto sphere = residual_study([](int M) { return build_round_sphere(1.0, 3, M); }, false, 20, 3, 0.05, 0.6);
    const auto bell = residual_study(ak_dumbbell, true, 100, 4, 0.005, 1.0);
    double min_order = 1e9;
    std::ostringstream detail;
    detail << "sphere orders";
    for (std::size_t k = 1; k < sphere.size(); ++k) {
        const double o = numerics::observed_order(sphere[k - 1], sphere[k]);
        min_order = std::min(min_order, o);
        detail << " " << fmt(o, 3);
    }
    detail << "; dumbbell LRF orders";
    for (std::size_t k = 1; k < bell.size(); ++k) {
        const double o = numerics::observed_order(bell[k - 1], bell[k]);
        min_order = std::min(min_order, o);
        detail << " " << fmt(o, 3);
    }
    return {min_order >= 1.8, detail.str()};
}

// 10 --------------------------------------------------------------------------
CoordinateMetricField random_field(std::mt19937_64& rng, int dim)
{
    CoordinateMetricField f;
    f.dim = dim;
    f.axes = {{0.0, 0.5, 1.0}, {0.0, 1.0}};
    for (std::size_t k = 0; k < 6; ++k)
        f.g.push_back(oracles::random_spd(dim, rng));
    return f;
}

Outcome tensor_lipschitz_suite()
{
    std::mt19937_64 rng(20240611);
    int pseudo_fail = 0, scale_fail = 0, vol_fail = 0;
    double max_scale_err = 0.0, max_recon = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = random_field(rng, 3), b = random_field(rng, 3), c = random_field(rng, 3);
        const double ab = tl_distance(a, b), ba = tl_distance(b, a), bc = tl_distance(b, c), ac = tl_distance(a, c);
        if (tl_distance(a, a) > 1e-12 || std::abs(ab - ba) > 1e-12 * (1.0 + ab) || ab < 0.0 ||
            ac > ab + bc + 1e-12)
            ++pseudo_fail;

        std::uniform_real_distribution<double> cd(-2.0, 2.0);
        const double cc = cd(rng);
        auto scaled = a;
        for (auto& m : scaled.g)
            m *= std::exp(2.0 * cc);
        const double e = std::abs(tl_distance(a, scaled) - 2.0 * std::abs(cc));
        max_scale_err = std::max(max_scale_err, e);
        if (e > 1e-10)
            ++scale_fail;

        // mesh of random triangles inside the box (2-simplices in a 2-D slice of the field axes)
        CoordinateMetricField a2 = random_field(rng, 2), b2 = random_field(rng, 2);
        SimplexMesh mesh;
        mesh.m = 2;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int v = 0; v < 9; ++v)
            mesh.vertices.push_back({0.5 * u(rng) + 0.25 * (v % 3), u(rng)});
        mesh.elements = {{0, 1, 3}, {1, 4, 3}, {1, 2, 4}, {2, 5, 4}, {3, 4, 6}, {4, 7, 6}};
        if (!volume_ratio_check(a2, b2, mesh).pass)
            ++vol_fail;

        const auto g = oracles::random_spd(4, rng, 0.5, 2.0);
        max_recon = std::max(max_recon, matrix_closeness(g).reconstruction_error);
    }

    // Isoperimetric ratio on a profile and its flowed version.
    const auto p1 = ak_dumbbell(200);
    FlowConfig c;
    c.t_end = 0.005;
    c.snapshot_stride = 1000000;
    const auto p2 = run_flow(p1, c).snapshots.back().profile;
    std::vector<std::size_t> ends;
    for (std::size_t j = 110; j < 199; j += 8)
        ends.push_back(j);
    const auto iso = iso_ratio_check(p1, p2, 100, ends);

    const bool pass = pseudo_fail == 0 && scale_fail == 0 && vol_fail == 0 && max_recon <= 1e-8 && iso.pass;
    return {pass, "pseudometric failures " + std::to_string(pseudo_fail) + ", scaling max err " +
                      fmt(max_scale_err, 3) + ", volume-ratio failures " + std::to_string(vol_fail) +
                      ", reconstruction err " + fmt(max_recon, 3) + ", iso |log ratio| " +
                      fmt(iso.max_abs_log_ratio, 3) + " <= " + fmt(iso.bound, 3)};
}

// 11 --------------------------------------------------------------------------
Outcome gronwall_suite()
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int env_fail = 0, fit_fail = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // f' = b f + g - slack with g, slack >= 0 solved on a fine grid, then subsampled.
        const double b = 2.0 * U(rng), f0 = 2.0 * U(rng) - 1.0, g0 = U(rng), g1 = 3.0 * U(rng), w = 6.0 * U(rng);
        const double s0 = U(rng), s1 = U(rng);
        auto g = [&](double t) { return g0 + g1 * std::sin(w * t) * std::sin(w * t); };
        auto slack = [&](double t) { return s0 * (1.0 + std::cos(3.0 * t + s1)); };
        const int n = 201, sub = 50;
        const double T = 1.0, h = T / ((n - 1) * sub);
        std::vector<double> ts(n), fs(n), gs(n);
        double f = f0;
        for (int i = 0; i < n; ++i) {
            const double t = i * T / (n - 1);
            ts[i] = t;
            fs[i] = f;
            gs[i] = g(t);
            if (i + 1 == n)
                break;
            for (int k = 0; k < sub; ++k) {
                const double tk = t + k * h;
                auto rhs = [&](double tt, double ff) { return b * ff + g(tt) - slack(tt); };
                const double k1 = rhs(tk, f), k2 = rhs(tk + h / 2, f + h / 2 * k1), k3 = rhs(tk + h / 2, f + h / 2 * k2),
                             k4 = rhs(tk + h, f + h * k3);
                f += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            }
        }
        if (!gronwall_envelope(ts, fs, gs, b).holds)
            ++env_fail;

        const auto fit = integro_gronwall_fit(5.0 * U(rng), 3.0 * U(rng), 4.0 * U(rng), 2.0);
        if (!fit.dominates || !fit.comparison_holds)
            ++fit_fail;
    }
    return {env_fail == 0 && fit_fail == 0, "envelope failures " + std::to_string(env_fail) +
                                                "/100, integro fit failures " + std::to_string(fit_fail) + "/100"};
}

// 12 --------------------------------------------------------------------------
Outcome energy_monitor()
{
    const auto p = ak_dumbbell(400);
    FlowConfig frozen;
    frozen.mode = FlowMode::LocalRicci;
    frozen.cutoff = unit_cutoff(p, 0.0);
    frozen.t_end = 0.01;
    frozen.dt.adaptive = false;
    frozen.dt.fixed_dt = 1e-4;
    frozen.snapshot_stride = 10;
    const auto tr0 = run_flow(p, frozen);
    double drift = 0.0;
    for (const auto& r : tr0.series)
        drift = std::max(drift, std::abs(r.energy - tr0.series.front().energy) / tr0.series.front().energy);

    FlowConfig c;
    c.mode = FlowMode::LocalRicci;
    c.cutoff = build_cutoff(p, 1.6, 0.3, 0.6);
    c.t_end = 0.04;
    c.snapshot_stride = 100;
    const auto tr = run_flow(p, c);
    const int d = 4;
    const double A0 = sobolev_from_iso(d, deane_iso_constant(d, 1.0, 0.0));
    const auto rep = lrf_energy_monitor(tr, A0);
    const double gate = 2.0 / (d * d * A0 * A0);
    const auto cs = evaluate_curvature(p);
    const double rm0 = lp_norm(cs.rm_norm, d / 2.0, p, Band::all());
    const bool gate_ok = std::abs(rep.gate - gate) <= 1e-14 * gate && std::abs(rep.rm_norm0 - rm0) <= 1e-9 * rm0 &&
                         rep.gate_holds == (rm0 <= gate);
    const bool pass = drift <= 1e-12 && std::isfinite(rep.growth_rate) && gate_ok;
    return {pass, "chi=0 drift " + fmt(drift, 3) + ", log E slope " + fmt(rep.growth_rate, 4) + ", |Rm|_2(0) " +
                      fmt(rm0, 5) + " vs gate " + fmt(gate, 5) + " -> " + (rep.gate_holds ? "holds" : "fails") +
                      (gate_ok ? " (evaluated correctly)" : " (MISEVALUATED)")};
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "shrinking sphere", shrinking_sphere},
        {2, "band curvature closed form", band_curvature_order},
        {3, "band energy and gap ratio", band_energy},
        {4, "energy-gap constant", varpi_constant},
        {5, "Ricci L^p divergence", ricci_divergence},
        {6, "isoperimetric quotient bounded", iso_bounded},
        {7, "neck pinch", neck_pinch},
        {8, "local flow locality", lrf_locality},
        {9, "evolution residual order", residual_order},
        {10, "tensor Lipschitz suite", tensor_lipschitz_suite},
        {11, "Gronwall suite", gronwall_suite},
        {12, "energy monitor", energy_monitor},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
