#include "rflab/flow.hpp"

#include "rflab/errors.hpp"
#include "rflab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rflab {

std::string to_string(FlowMode mode) { return mode == FlowMode::Ricci ? "ricci" : "local_ricci"; }

std::string to_string(StopReason reason)
{
    switch (reason) {
    case StopReason::ReachedTEnd:
        return "reached_t_end";
    case StopReason::PinchDetected:
        return "pinch_detected";
    case StopReason::CurvatureCap:
        return "curvature_cap";
    case StopReason::NumericFailure:
        return "numeric_failure";
    }
    return "unknown";
}

FlowMode flow_mode_from_string(const std::string& name)
{
    if (name == "ricci")
        return FlowMode::Ricci;
    if (name == "local_ricci")
        return FlowMode::LocalRicci;
    throw ParameterError("unknown flow mode '" + name + "'");
}

void FlowConfig::validate(const ProfileMetric& profile) const
{
    if (!(dt.cfl > 0.0 && dt.cfl <= 0.5))
        throw ParameterError("flow config: cfl must lie in (0, 1/2]");
    if (!(t_end > 0.0))
        throw ParameterError("flow config: t_end must be positive");
    if (!dt.adaptive && !(dt.fixed_dt > 0.0))
        throw ParameterError("flow config: fixed dt must be positive");
    if (snapshot_stride == 0)
        throw ParameterError("flow config: snapshot stride must be >= 1");
    if (!(pinch_fraction > 0.0 && pinch_fraction < 1.0))
        throw ParameterError("flow config: pinch fraction must lie in (0, 1)");
    if (mode == FlowMode::LocalRicci && !cutoff)
        throw ParameterError("flow config: local_ricci requires a cutoff");
    if (cutoff && cutoff->chi.size() != profile.size())
        throw ParameterError("flow config: cutoff grid differs from the profile grid");
}

std::vector<double> deturck_field(const ProfileMetric& profile, const Stencil& stencil, const ProfileMetric& background)
{
    if (background.size() != profile.size())
        throw ParameterError("deturck_field: background grid differs from the profile grid");
    const auto psi_x = stencil.d1(profile.psi, Parity::Odd);
    const auto phi_x = stencil.d1(profile.phi, Parity::Even);
    const auto bpsi_x = stencil.d1(background.psi, Parity::Odd);
    const auto bphi_x = stencil.d1(background.phi, Parity::Even);
    const double q = profile.q;
    const std::size_t n = profile.size();
    std::vector<double> w(n, 0.0);
    const std::size_t lo = profile.closed() ? 1 : 0;
    const std::size_t hi = profile.closed() ? n - 1 : n;
    for (std::size_t i = lo; i < hi; ++i) {
        const double phi = profile.phi[i], psi = profile.psi[i];
        const double bphi = background.phi[i], bpsi = background.psi[i];
        w[i] = (phi_x[i] / phi - bphi_x[i] / bphi) / (phi * phi) - q * psi_x[i] / (psi * phi * phi) +
               q * bpsi * bpsi_x[i] / (psi * psi * bphi * bphi);
    }
    return w;
}

FlowRates flow_rates(const ProfileMetric& profile, const Stencil& stencil, std::span<const double> chi,
                     const ProfileMetric& background)
{
    const auto curv = ricci_and_scalar(sectional_curvatures(profile, stencil));
    const auto w = deturck_field(profile, stencil, background);
    const auto psi_x = stencil.d1(profile.psi, Parity::Odd);
    const std::size_t n = profile.size();
    std::vector<double> c2(n), flux(n);
    for (std::size_t i = 0; i < n; ++i) {
        c2[i] = chi.empty() ? 1.0 : chi[i] * chi[i];
        flux[i] = profile.phi[i] * c2[i] * w[i];
    }
    const auto flux_x = stencil.d1(flux, Parity::Odd);
    FlowRates r;
    r.psi_t.resize(n);
    r.phi_t.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (c2[i] == 0.0) {
            r.psi_t[i] = 0.0;
            r.phi_t[i] = 0.0;
            continue;
        }
        r.psi_t[i] = c2[i] * (-profile.psi[i] * curv.ric_fiber[i] + w[i] * psi_x[i]);
        r.phi_t[i] = -c2[i] * profile.phi[i] * curv.ric_ss[i] + flux_x[i];
    }
    if (profile.closed()) {
        // Smooth closing needs phi = psi_x at a pole; keep that relation by
        // evolving the pole phi as the x-derivative of the psi rate.
        r.psi_t.front() = 0.0;
        r.psi_t.back() = 0.0;
        const auto closing = stencil.d1(r.psi_t, Parity::Odd);
        r.phi_t.front() = c2.front() == 0.0 ? 0.0 : closing.front();
        r.phi_t.back() = c2.back() == 0.0 ? 0.0 : -closing.back();
    }
    return r;
}

double cfl_limit(const ProfileMetric& profile, double cfl)
{
    const std::size_t n = profile.size();
    double h_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double dx = std::numeric_limits<double>::infinity();
        if (i > 0)
            dx = std::min(dx, profile.x[i] - profile.x[i - 1]);
        if (i + 1 < n)
            dx = std::min(dx, profile.x[i + 1] - profile.x[i]);
        h_min = std::min(h_min, profile.phi[i] * dx);
    }
    return cfl * h_min * h_min / (2.0 * std::max(1, profile.q));
}

namespace {

void check_state(const ProfileMetric& p)
{
    const std::size_t n = p.size();
    const std::size_t first = p.closed() ? 1 : 0;
    const std::size_t last = p.closed() ? n - 1 : n;
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(p.phi[i]) || !(p.phi[i] > 0.0))
            throw NumericFailure("flow: phi became non-positive or non-finite at node " + std::to_string(i));
    for (std::size_t i = first; i < last; ++i)
        if (!std::isfinite(p.psi[i]) || !(p.psi[i] > 0.0))
            throw NumericFailure("flow: psi became non-positive or non-finite at node " + std::to_string(i));
}

FlowRates safe_rates(const ProfileMetric& p, const Stencil& stencil, std::span<const double> chi,
                     const ProfileMetric& background)
{
    try {
        return flow_rates(p, stencil, chi, background);
    } catch (const SingularProfileError& e) {
        throw NumericFailure(e.what());
    }
}

ProfileMetric advance(const ProfileMetric& base, const FlowRates& k, double h)
{
    ProfileMetric out = base;
    for (std::size_t i = 0; i < base.size(); ++i) {
        out.psi[i] = base.psi[i] + h * k.psi_t[i];
        out.phi[i] = base.phi[i] + h * k.phi_t[i];
    }
    return out;
}

} // namespace

ProfileMetric step(const ProfileMetric& profile, std::span<const double> chi, double dt, double cfl,
                   const ProfileMetric* background)
{
    return step(profile, Stencil(profile), chi, dt, cfl, background ? *background : profile);
}

ProfileMetric step(const ProfileMetric& profile, const Stencil& stencil, std::span<const double> chi, double dt,
                   double cfl, const ProfileMetric& bg)
{
    if (!(dt > 0.0))
        throw ParameterError("step: dt must be positive");
    const double limit = cfl_limit(profile, cfl);
    if (dt > limit * (1.0 + 1e-12))
        throw StepRejected("step: dt exceeds the CFL limit " + std::to_string(limit));
    if (!chi.empty() && chi.size() != profile.size())
        throw ParameterError("step: cutoff size differs from the grid");

    const FlowRates k1 = safe_rates(profile, stencil, chi, bg);
    ProfileMetric s2 = advance(profile, k1, 0.5 * dt);
    check_state(s2);
    const FlowRates k2 = safe_rates(s2, stencil, chi, bg);
    ProfileMetric s3 = advance(profile, k2, 0.5 * dt);
    check_state(s3);
    const FlowRates k3 = safe_rates(s3, stencil, chi, bg);
    ProfileMetric s4 = advance(profile, k3, dt);
    check_state(s4);
    const FlowRates k4 = safe_rates(s4, stencil, chi, bg);

    ProfileMetric out = profile;
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        out.psi[i] = profile.psi[i] + w * (k1.psi_t[i] + 2.0 * k2.psi_t[i] + 2.0 * k3.psi_t[i] + k4.psi_t[i]);
        out.phi[i] = profile.phi[i] + w * (k1.phi_t[i] + 2.0 * k2.phi_t[i] + 2.0 * k3.phi_t[i] + k4.phi_t[i]);
    }
    if (profile.closed()) {
        out.psi.front() = 0.0;
        out.psi.back() = 0.0;
    }
    check_state(out);
    return out;
}

double tracked_psi_min(const ProfileMetric& profile, bool necks)
{
    if (necks) {
        const auto rep = neck_bump_analysis(profile);
        if (rep.r_min)
            return *rep.r_min;
    }
    const std::size_t n = profile.size();
    const std::size_t first = profile.closed() ? 1 : 0;
    const std::size_t last = profile.closed() ? n - 1 : n;
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = first; i < last; ++i)
        m = std::min(m, profile.psi[i]);
    return m;
}

namespace {

SeriesRow measure(const ProfileMetric& p, const Stencil& stencil, std::span<const double> chi, double t, double dt,
                  bool necks)
{
    const auto curv = evaluate_curvature(p, stencil);
    const double d = p.dim();
    const std::size_t n = p.size();
    SeriesRow row;
    row.t = t;
    row.dt = dt;
    row.psi_min = tracked_psi_min(p, necks);
    std::vector<double> e(n), e2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rm = curv.rm_norm[i];
        const double c2 = chi[i] * chi[i];
        row.rm_max = std::max(row.rm_max, rm);
        row.chi2_rm_max = std::max(row.chi2_rm_max, c2 * rm);
        e[i] = std::pow(rm, 0.5 * d);
        e2[i] = c2 * std::pow(rm, 0.5 * d + 1.0);
    }
    row.volume = band_volume(p, Band::all());
    row.energy = band_integral(p, e, Band::all());
    row.energy2 = band_integral(p, e2, Band::all());
    return row;
}

} // namespace

Trajectory run_flow(const ProfileMetric& initial, const FlowConfig& config)
{
    config.validate(initial);
    Trajectory tr;
    tr.mode = config.mode;
    if (config.mode == FlowMode::LocalRicci)
        tr.chi = config.cutoff->chi;
    else
        tr.chi.assign(initial.size(), 1.0);

    tr.neck_tracking = !neck_bump_analysis(initial).necks.empty();
    tr.psi_min0 = tracked_psi_min(initial, tr.neck_tracking);
    tr.curvature_cap = config.curvature_cap.value_or(1e8 / (tr.psi_min0 * tr.psi_min0));

    tr.background = initial;
    ProfileMetric state = initial;
    const Stencil stencil(state);
    double t = 0.0;
    tr.series.push_back(measure(state, stencil, tr.chi, t, 0.0, tr.neck_tracking));
    tr.snapshots.push_back({t, state});

    double dt_cap = std::numeric_limits<double>::infinity();
    std::size_t steps = 0;
    bool last_snapshotted = true;
    const double t_tol = 1e-12 * config.t_end;

    while (config.t_end - t > t_tol) {
        double dt = config.dt.adaptive ? cfl_limit(state, config.dt.cfl) : config.dt.fixed_dt;
        dt = std::min({dt, dt_cap, config.t_end - t});
        ProfileMetric next;
        try {
            next = step(state, stencil, tr.chi, dt, config.dt.cfl, tr.background);
        } catch (const StepRejected& e) {
            tr.stop_reason = StopReason::NumericFailure;
            tr.message = e.what();
            break;
        } catch (const NumericFailure& e) {
            if (config.dt.adaptive && 0.5 * dt >= config.min_dt) {
                dt_cap = 0.5 * dt;
                continue;
            }
            tr.stop_reason = StopReason::NumericFailure;
            tr.message = e.what();
            break;
        }
        const double prev_min = tr.series.back().psi_min;
        const double next_min = tracked_psi_min(next, tr.neck_tracking);
        if (config.dt.adaptive && next_min < 0.8 * prev_min && 0.5 * dt >= config.min_dt) {
            dt_cap = 0.5 * dt;
            continue;
        }

        ++steps;
        t = config.dt.adaptive ? t + dt : (config.t_end - t - dt <= t_tol ? config.t_end : steps * config.dt.fixed_dt);
        if (config.t_end - t <= t_tol)
            t = config.t_end;
        state = std::move(next);
        SeriesRow row;
        try {
            row = measure(state, stencil, tr.chi, t, dt, tr.neck_tracking);
        } catch (const SingularProfileError& e) {
            tr.snapshots.push_back({t, state});
            tr.stop_reason = StopReason::NumericFailure;
            tr.message = e.what();
            last_snapshotted = true;
            break;
        }
        tr.series.push_back(row);
        last_snapshotted = steps % config.snapshot_stride == 0;
        if (last_snapshotted)
            tr.snapshots.push_back({t, state});

        if (row.psi_min < config.pinch_fraction * tr.psi_min0) {
            tr.stop_reason = StopReason::PinchDetected;
            break;
        }
        if (row.chi2_rm_max > tr.curvature_cap) {
            tr.stop_reason = StopReason::CurvatureCap;
            break;
        }
    }
    if (!last_snapshotted)
        tr.snapshots.push_back({t, state});
    return tr;
}

ResidualReport curvature_evolution_residual(const Trajectory& trajectory, std::size_t first, std::size_t count)
{
    if (count < 3 || first + count > trajectory.snapshots.size())
        throw ParameterError("curvature_evolution_residual: need at least three snapshots in range");
    const auto& snaps = trajectory.snapshots;
    const double dt = snaps[first + 1].t - snaps[first].t;
    for (std::size_t k = first + 1; k < first + count; ++k) {
        const double gap = snaps[k].t - snaps[k - 1].t;
        if (std::abs(gap - dt) > 1e-9 * dt)
            throw ParameterError("curvature_evolution_residual: snapshots are not uniformly spaced");
    }
    ResidualReport rep;
    rep.dt = dt;
    rep.snapshots_used = count;
    const std::span<const double> chi = trajectory.chi;

    for (std::size_t k = first + 1; k + 1 < first + count; ++k) {
        const ProfileMetric& p = snaps[k].profile;
        const Stencil stencil(p);
        const auto before = sectional_curvatures(snaps[k - 1].profile, stencil);
        const auto after = sectional_curvatures(snaps[k + 1].profile, stencil);
        const auto d = compute_derivatives(p, stencil);
        const FlowRates rate = flow_rates(p, stencil, chi, trajectory.background);

        const auto Psi_x = stencil.d1(rate.psi_t, Parity::Odd);
        const auto Psi_xx = stencil.d2(rate.psi_t, Parity::Odd);
        const auto Phi_x = stencil.d1(rate.phi_t, Parity::Even);

        const std::size_t n = p.size();
        const std::size_t lo = p.closed() ? 1 : 0;
        const std::size_t hi = p.closed() ? n - 1 : n;
        for (std::size_t i = lo; i < hi; ++i) {
            const double psi = p.psi[i], phi = p.phi[i];
            const double Psi = rate.psi_t[i], Phi = rate.phi_t[i];
            const double psi_x = d.psi_x[i], psi_xx = d.psi_xx[i], phi_x = d.phi_x[i];
            const double psi_s = d.psi_s[i], psi_ss = d.psi_ss[i];

            const double psi_s_t = Psi_x[i] / phi - psi_x * Phi / (phi * phi);
            const double inner = psi_xx - psi_x * phi_x / phi;
            const double inner_t = Psi_xx[i] - Psi_x[i] * phi_x / phi - psi_x * Phi_x[i] / phi +
                                   psi_x * phi_x * Phi / (phi * phi);
            const double psi_ss_t = inner_t / (phi * phi) - 2.0 * inner * Phi / (phi * phi * phi);

            const double kn_t = -psi_ss_t / psi + psi_ss * Psi / (psi * psi);
            const double kt_t = -2.0 * psi_s * psi_s_t / (psi * psi) - 2.0 * (1.0 - psi_s * psi_s) * Psi / (psi * psi * psi);

            const double kn_fd = (after.K_N[i] - before.K_N[i]) / (2.0 * dt);
            const double kt_fd = (after.K_T[i] - before.K_T[i]) / (2.0 * dt);
            rep.max_residual_kn = std::max(rep.max_residual_kn, std::abs(kn_fd - kn_t));
            rep.max_residual_kt = std::max(rep.max_residual_kt, std::abs(kt_fd - kt_t));
            rep.rate_scale = std::max({rep.rate_scale, std::abs(kn_t), std::abs(kt_t)});
        }
    }
    rep.max_residual = std::max(rep.max_residual_kn, rep.max_residual_kt);
    return rep;
}

} // namespace rflab
