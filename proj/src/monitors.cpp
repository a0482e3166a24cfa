#include "rflab/monitors.hpp"

#include "rflab/errors.hpp"
#include "rflab/norms.hpp"
#include "rflab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rflab {

double ak_ratio_threshold(double mu, int q)
{
    if (q < 2)
        throw ParameterError("ak_ratio_threshold: q must be >= 2");
    return (2.0 * mu + 2.0 * q) / (q - 1.0);
}

AkReport ak_hypotheses(const ProfileMetric& profile, double mu)
{
    if (!(mu >= 0.0))
        throw ParameterError("ak_hypotheses: mu must be >= 0");
    const auto cs = evaluate_curvature(profile);
    AkReport r;
    r.q = profile.q;
    r.mu = mu;

    double min_kt = std::numeric_limits<double>::infinity();
    double min_r = std::numeric_limits<double>::infinity();
    double max_a = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double rm = cs.rm_norm[i];
        if (rm > 0.0) {
            min_kt = std::min(min_kt, cs.K_T[i] / rm);
            min_r = std::min(min_r, cs.R[i] / rm);
        } else {
            min_kt = std::min(min_kt, 0.0);
            min_r = std::min(min_r, 0.0);
        }
        max_a = std::max(max_a, std::abs(cs.a[i]));
    }
    r.tangential = {min_kt > 0.0, true, min_kt, 0.0, min_kt};
    constexpr double kScalarFloor = 1e-4;
    r.scalar = {min_r > kScalarFloor, true, min_r, kScalarFloor, min_r - kScalarFloor};
    r.pinching = {max_a <= mu, true, max_a, mu, mu - max_a};

    const auto nb = neck_bump_analysis(profile);
    r.necks = nb.necks.size();
    r.bumps = nb.bumps.size();
    const double thr = ak_ratio_threshold(mu, profile.q);
    if (nb.r_min && nb.r_max) {
        const double ratio = (*nb.r_max * *nb.r_max) / (*nb.r_min * *nb.r_min);
        r.ratio = {ratio >= thr, true, ratio, thr, ratio - thr};
    } else {
        r.ratio = {false, false, 0.0, thr, 0.0};
    }
    return r;
}

PinchReport pinch_monitor(const Trajectory& trajectory, double mu)
{
    if (trajectory.snapshots.empty() || trajectory.series.empty())
        throw ParameterError("pinch_monitor: empty trajectory");
    const auto& first = trajectory.snapshots.front().profile;
    PinchReport r;
    r.hypotheses = ak_hypotheses(first, mu);
    r.has_neck = trajectory.neck_tracking;
    r.r_min0 = trajectory.psi_min0;
    r.threshold = r.r_min0 * r.r_min0 / (first.q - 1.0);
    r.weak_threshold = r.r_min0;
    r.pinched = trajectory.stop_reason == StopReason::PinchDetected;
    const auto& last = trajectory.series.back();
    r.volume_at_stop = last.volume;
    for (const auto& row : trajectory.series) {
        r.t.push_back(row.t);
        r.r_min.push_back(row.psi_min);
    }
    if (r.pinched) {
        r.singular_time = last.t;
        r.resolution = last.dt;
        r.below_threshold = r.singular_time < r.threshold;
        r.below_weak_threshold = r.singular_time < r.weak_threshold;
        r.assertion_checked = r.has_neck && r.hypotheses.all_pass();
    }
    if (!r.has_neck)
        r.caveat = "no neck at t = 0: the neck-pinch hypotheses do not apply; psi_min tracks the global interior minimum";
    else if (!r.pinched)
        r.caveat = "run stopped with " + to_string(trajectory.stop_reason) + "; threshold comparison skipped";
    else
        r.caveat = "singular time is the first step with psi_min below the pinch fraction of psi_min(0); it is "
                   "resolution-limited by the last step size";
    return r;
}

PerelmanReport perelman_monitor(const Trajectory& trajectory, double alpha, double eps_r, double s0)
{
    if (!(alpha > 0.0) || !(eps_r > 0.0))
        throw ParameterError("perelman_monitor: alpha and eps_r must be positive");
    PerelmanReport r;
    r.alpha = alpha;
    r.eps_r = eps_r;
    r.s0 = s0;
    r.min_volume_ratio = std::numeric_limits<double>::infinity();
    for (const auto& snap : trajectory.snapshots) {
        if (!(snap.t > 0.0))
            continue;
        const auto& p = snap.profile;
        const auto cs = evaluate_curvature(p);
        const auto s = centered_arclength(p);
        const double scale = alpha / snap.t + 1.0 / (eps_r * eps_r);
        const double d = p.dim();
        const double radius = std::sqrt(snap.t);
        PerelmanSample sample;
        sample.t = snap.t;
        sample.volume_ratio = std::numeric_limits<double>::infinity();
        bool any = false;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (std::abs(s[i] - s0) > eps_r)
                continue;
            any = true;
            sample.curvature_margin = std::max(sample.curvature_margin, cs.rm_norm[i] / scale);
            const double vol = band_volume(p, Band::around(s[i], radius));
            sample.volume_ratio = std::min(sample.volume_ratio, vol / std::pow(snap.t, 0.5 * d));
        }
        if (!any)
            continue;
        r.max_curvature_margin = std::max(r.max_curvature_margin, sample.curvature_margin);
        r.min_volume_ratio = std::min(r.min_volume_ratio, sample.volume_ratio);
        r.samples.push_back(sample);
    }
    if (r.samples.empty())
        r.min_volume_ratio = 0.0;
    return r;
}

GronwallReport gronwall_envelope(std::span<const double> t, std::span<const double> f, std::span<const double> g,
                                 double b)
{
    const std::size_t n = t.size();
    if (n < 2 || f.size() != n || g.size() != n)
        throw ParameterError("gronwall_envelope: need matching samples, at least two");
    if (!(b >= 0.0))
        throw ParameterError("gronwall_envelope: b must be >= 0");
    const double h = t[1] - t[0];
    if (!(h > 0.0))
        throw ParameterError("gronwall_envelope: sample times must increase");
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * h)
            throw ParameterError("gronwall_envelope: sample times must be uniform");
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(g[i] >= 0.0))
            throw ParameterError("gronwall_envelope: g must be >= 0");
        integrand[i] = std::exp(-b * (t[i] - t[0])) * g[i];
    }
    const auto cum = numerics::cumulative_integral(t, integrand);
    GronwallReport r;
    r.envelope.resize(n);
    r.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        r.envelope[i] = (f[0] + cum[i]) * std::exp(b * (t[i] - t[0]));
        const double excess = (f[i] - r.envelope[i]) / std::max(1.0, std::abs(r.envelope[i]));
        r.max_excess = std::max(r.max_excess, excess);
        if (excess > 1e-9 && !r.first_violation)
            r.first_violation = i;
    }
    r.holds = !r.first_violation;
    return r;
}

IntegroFit integro_gronwall_fit(double a, double b, double y0, double T, std::size_t steps)
{
    if (!(a >= 0.0) || !(b >= 0.0))
        throw ParameterError("integro_gronwall_fit: a and b must be >= 0");
    if (!(T > 0.0) || steps < 1)
        throw ParameterError("integro_gronwall_fit: need T > 0 and at least one step");
    IntegroFit r;
    r.a = a;
    r.b = b;
    r.y0 = y0;
    r.k = b + std::sqrt(a) + 1.0;
    r.w = std::max(y0 + 1.0, 1.0 / (r.k - b - a / r.k));

    const double h = T / static_cast<double>(steps);
    auto envelope = [&](double t) { return r.w * std::exp(r.k * t); };
    auto comparison = [&](double t) {
        const double e = std::exp(r.k * t);
        return r.w * r.k * e - a * r.w * (e - 1.0) / r.k - b * r.w * e - 1.0;
    };
    // State (Y, y) with Y' = y, y' = a Y + b y + 1.
    auto rhs = [&](double Y, double y, double& dY, double& dy) {
        dY = y;
        dy = a * Y + b * y + 1.0;
    };
    double Y = 0.0, y = y0;
    r.min_comparison = comparison(0.0);
    r.max_ratio = y / envelope(0.0);
    r.dominates = y < envelope(0.0);
    for (std::size_t k = 1; k <= steps; ++k) {
        double k1Y, k1y, k2Y, k2y, k3Y, k3y, k4Y, k4y;
        rhs(Y, y, k1Y, k1y);
        rhs(Y + 0.5 * h * k1Y, y + 0.5 * h * k1y, k2Y, k2y);
        rhs(Y + 0.5 * h * k2Y, y + 0.5 * h * k2y, k3Y, k3y);
        rhs(Y + h * k3Y, y + h * k3y, k4Y, k4y);
        Y += h / 6.0 * (k1Y + 2.0 * k2Y + 2.0 * k3Y + k4Y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        const double t = k * h;
        r.min_comparison = std::min(r.min_comparison, comparison(t));
        const double env = envelope(t);
        r.max_ratio = std::max(r.max_ratio, y / env);
        if (!(y < env))
            r.dominates = false;
    }
    r.comparison_holds = r.min_comparison > 0.0;
    return r;
}

double grad_inf(const ProfileMetric& profile, std::span<const double> chi)
{
    if (chi.size() != profile.size())
        throw ParameterError("grad_inf: cutoff size differs from the grid");
    const Stencil st(profile);
    const auto chi_x = st.d1(chi, Parity::Even);
    double m = 0.0;
    for (std::size_t i = 0; i < chi_x.size(); ++i)
        m = std::max(m, std::abs(chi_x[i] / profile.phi[i]));
    return m;
}

EnergyReport lrf_energy_monitor(const Trajectory& trajectory, double A0, double growth_constant)
{
    if (trajectory.mode != FlowMode::LocalRicci || trajectory.chi.empty())
        throw ParameterError("lrf_energy_monitor: trajectory has no cutoff");
    if (!(A0 > 0.0))
        throw ParameterError("lrf_energy_monitor: A0 must be positive");
    if (trajectory.series.empty() || trajectory.snapshots.empty())
        throw ParameterError("lrf_energy_monitor: empty trajectory");
    EnergyReport r;
    const auto& p0 = trajectory.snapshots.front().profile;
    const double d = p0.dim();
    for (const auto& row : trajectory.series) {
        r.t.push_back(row.t);
        r.energy.push_back(row.energy);
        r.energy2.push_back(row.energy2);
    }
    r.grad_chi_inf = grad_inf(p0, trajectory.chi);
    r.growth_constant = growth_constant;

    bool positive = true;
    std::vector<double> logE;
    for (double e : r.energy) {
        positive = positive && e > 0.0;
        logE.push_back(positive ? std::log(e) : 0.0);
    }
    if (positive && r.t.size() >= 2 && r.t.back() > r.t.front())
        r.growth_rate = numerics::fit_line(r.t, logE).slope;
    const double g2 = r.grad_chi_inf * r.grad_chi_inf;
    r.growth_within = r.growth_rate <= growth_constant * g2;

    if (g2 > 0.0) {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < r.t.size(); ++i) {
            if (r.t[i] > 0.0 && r.energy2[i] > 0.0) {
                const double base = r.t[i] * g2 + 1.0;
                xs.push_back(std::log(base * base));
                ys.push_back(std::log(r.t[i] * r.energy2[i]));
            }
        }
        if (xs.size() >= 2 && xs.back() > xs.front())
            r.e2_exponent = numerics::fit_line(xs, ys).slope;
    }

    r.A0 = A0;
    r.rm_norm0 = std::pow(r.energy.front(), 2.0 / d);
    r.gate = 2.0 / (d * d * A0 * A0);
    r.gate_holds = r.rm_norm0 <= r.gate;
    return r;
}

std::vector<double> grad_chi2_rm_squared(const ProfileMetric& profile, std::span<const double> chi)
{
    if (chi.size() != profile.size())
        throw ParameterError("grad_chi2_rm_squared: cutoff size differs from the grid");
    const Stencil st(profile);
    const auto cs = evaluate_curvature(profile, st);
    const std::size_t n = profile.size();
    const double q = profile.q;
    std::vector<double> fn(n), ft(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c2 = chi[i] * chi[i];
        fn[i] = c2 * cs.K_N[i];
        ft[i] = c2 * cs.K_T[i];
    }
    const auto fn_x = st.d1(fn, Parity::Even);
    const auto ft_x = st.d1(ft, Parity::Even);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = profile.phi[i];
        const double fns = fn_x[i] / phi, fts = ft_x[i] / phi;
        double v = 4.0 * (q * fns * fns + 0.5 * q * (q - 1.0) * fts * fts);
        if (profile.psi[i] > 0.0) {
            const double c4 = std::pow(chi[i], 4);
            const double ratio = cs.psi_s[i] / profile.psi[i];
            const double diff = cs.K_N[i] - cs.K_T[i];
            v += 8.0 * q * (q - 1.0) * c4 * ratio * ratio * diff * diff;
        }
        out[i] = v;
    }
    return out;
}

std::vector<double> hess_chi_squared(const ProfileMetric& profile, std::span<const double> chi)
{
    if (chi.size() != profile.size())
        throw ParameterError("hess_chi_squared: cutoff size differs from the grid");
    const Stencil st(profile);
    const auto chi_x = st.d1(chi, Parity::Even);
    const auto chi_xx = st.d2(chi, Parity::Even);
    const auto psi_x = st.d1(profile.psi, Parity::Odd);
    const auto phi_x = st.d1(profile.phi, Parity::Even);
    const std::size_t n = profile.size();
    const double q = profile.q;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = profile.phi[i];
        const double chi_s = chi_x[i] / phi;
        const double chi_ss = (chi_xx[i] - chi_x[i] * phi_x[i] / phi) / (phi * phi);
        // At a pole psi_s chi_s / psi tends to chi_ss.
        const double fiber = profile.psi[i] > 0.0 ? (psi_x[i] / phi) * chi_s / profile.psi[i] : chi_ss;
        out[i] = chi_ss * chi_ss + q * fiber * fiber;
    }
    return out;
}

namespace {

double root_lp(const ProfileMetric& p, const std::vector<double>& squared, double exponent)
{
    std::vector<double> root(squared.size());
    for (std::size_t i = 0; i < squared.size(); ++i)
        root[i] = std::sqrt(std::max(0.0, squared[i]));
    return lp_norm(root, exponent, p, Band::all());
}

} // namespace

ExtensionReport extension_tracker(const Trajectory& trajectory)
{
    ExtensionReport r;
    const auto& chi = trajectory.chi;
    for (const auto& snap : trajectory.snapshots) {
        const auto& p = snap.profile;
        const auto cs = evaluate_curvature(p);
        ExtensionSample s;
        s.t = snap.t;
        for (std::size_t i = 0; i < p.size(); ++i)
            s.chi2_rm_inf = std::max(s.chi2_rm_inf, chi[i] * chi[i] * cs.rm_norm[i]);
        const auto g = grad_chi2_rm_squared(p, chi);
        const auto hs = hess_chi_squared(p, chi);
        s.grad_chi2_rm_p4 = root_lp(p, g, 4.0);
        s.grad_chi2_rm_p8 = root_lp(p, g, 8.0);
        s.hess_chi_p4 = root_lp(p, hs, 4.0);
        s.hess_chi_p8 = root_lp(p, hs, 8.0);
        r.samples.push_back(s);
    }
    double sup = 0.0;
    for (const auto& row : trajectory.series) {
        sup = std::max(sup, row.chi2_rm_max);
        r.series_t.push_back(row.t);
        r.series_chi2_rm_inf.push_back(row.chi2_rm_max);
        r.running_sup.push_back(sup);
        r.sup_rm_inf = std::max(r.sup_rm_inf, row.rm_max);
    }
    r.sup_chi2_rm_inf = sup;
    return r;
}

} // namespace rflab
