#include "rflab/norms.hpp"

#include "rflab/curvature.hpp"
#include "rflab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rflab {

double sphere_area(int k)
{
    if (k < 0)
        throw ParameterError("sphere_area: dimension must be >= 0");
    const double h = 0.5 * (k + 1);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double ball_volume(int k)
{
    if (k < 1)
        throw ParameterError("ball_volume: dimension must be >= 1");
    return sphere_area(k - 1) / k;
}

namespace {

// Integrates g dx between centred arclengths lo and hi.
double integrate_between(const ProfileMetric& profile, const std::vector<double>& s, std::span<const double> g,
                         double lo, double hi)
{
    const auto& x = profile.x;
    const std::size_t n = s.size();
    lo = std::max(lo, s.front());
    hi = std::min(hi, s.back());
    if (!(hi > lo))
        return 0.0;
    auto locate = [&](double v, std::size_t& cell, double& theta) {
        auto it = std::upper_bound(s.begin(), s.end(), v);
        std::size_t k = static_cast<std::size_t>(std::distance(s.begin(), it));
        k = std::clamp<std::size_t>(k, 1, n - 1) - 1;
        theta = (v - s[k]) / (s[k + 1] - s[k]);
        if (theta < 1e-10)
            theta = 0.0;
        if (theta > 1.0 - 1e-10) {
            if (k + 2 < n) {
                ++k;
                theta = 0.0;
            } else {
                theta = 1.0;
            }
        }
        cell = k;
    };
    std::size_t klo, khi;
    double tlo, thi;
    locate(lo, klo, tlo);
    locate(hi, khi, thi);
    auto xi = [&](std::size_t k, double t) { return x[k] + t * (x[k + 1] - x[k]); };
    auto gi = [&](std::size_t k, double t) { return g[k] + t * (g[k + 1] - g[k]); };
    if (klo == khi)
        return 0.5 * (xi(khi, thi) - xi(klo, tlo)) * (gi(klo, tlo) + gi(khi, thi));
    double sum = 0.5 * (x[klo + 1] - xi(klo, tlo)) * (gi(klo, tlo) + g[klo + 1]);
    for (std::size_t k = klo + 1; k < khi; ++k)
        sum += 0.5 * (x[k + 1] - x[k]) * (g[k] + g[k + 1]);
    sum += 0.5 * (xi(khi, thi) - x[khi]) * (g[khi] + gi(khi, thi));
    return sum;
}

} // namespace

double band_integral(const ProfileMetric& profile, std::span<const double> f, Band band)
{
    if (f.size() != profile.size())
        throw ParameterError("band_integral: field size differs from the grid");
    if (band.lo > band.hi)
        throw ParameterError("band_integral: band has lo > hi");
    const double area = sphere_area(profile.q);
    const std::size_t n = profile.size();
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = f[i] * area * std::pow(profile.psi[i], profile.q) * profile.phi[i];
    const auto s = centered_arclength(profile);
    double total = integrate_between(profile, s, g, band.lo, band.hi);
    if (band.is_all() && !profile.closed()) {
        const double h = profile.period - (profile.x.back() - profile.x.front());
        total += 0.5 * h * (g.back() + g.front());
    }
    return total;
}

double band_volume(const ProfileMetric& profile, Band band)
{
    const std::vector<double> ones(profile.size(), 1.0);
    return band_integral(profile, ones, band);
}

double lp_norm(std::span<const double> field, double p, const ProfileMetric& profile, Band band)
{
    if (!(p >= 1.0))
        throw ParameterError("lp_norm: p must be >= 1");
    if (field.size() != profile.size())
        throw ParameterError("lp_norm: field size differs from the grid");
    if (std::isinf(p)) {
        const auto s = centered_arclength(profile);
        double m = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] >= band.lo && s[i] <= band.hi)
                m = std::max(m, std::abs(field[i]));
        if (!band.is_all()) {
            for (double edge : {band.lo, band.hi})
                if (edge >= s.front() && edge <= s.back())
                    m = std::max(m, std::abs(field_at(profile, field, edge)));
        }
        return m;
    }
    std::vector<double> powered(field.size());
    for (std::size_t i = 0; i < field.size(); ++i)
        powered[i] = std::pow(std::abs(field[i]), p);
    return std::pow(band_integral(profile, powered, band), 1.0 / p);
}

double field_at(const ProfileMetric& profile, std::span<const double> field, double s_query)
{
    const auto s = centered_arclength(profile);
    if (s_query < s.front() - 1e-12 || s_query > s.back() + 1e-12)
        throw ParameterError("field_at: arclength outside the profile");
    auto it = std::upper_bound(s.begin(), s.end(), s_query);
    std::size_t k = static_cast<std::size_t>(std::distance(s.begin(), it));
    k = std::clamp<std::size_t>(k, 1, s.size() - 1) - 1;
    const double t = std::clamp((s_query - s[k]) / (s[k + 1] - s[k]), 0.0, 1.0);
    if (t == 0.0)
        return field[k];
    if (t == 1.0)
        return field[k + 1];
    return field[k] + t * (field[k + 1] - field[k]);
}

IsoScan iso_quotient_scan(const ProfileMetric& profile, std::span<const double> b_values, std::optional<double> base)
{
    const auto s = centered_arclength(profile);
    IsoScan scan;
    scan.base = base.value_or(s.front());
    if (scan.base < s.front() - 1e-12 || scan.base > s.back() + 1e-12)
        throw ParameterError("iso_quotient_scan: base outside the profile");
    const int q = profile.q;
    const double d = profile.dim();
    const double area = sphere_area(q);
    const double psi_base = field_at(profile, profile.psi, scan.base);
    for (double b : b_values) {
        if (b < scan.base || b > s.back() + 1e-12)
            throw ParameterError("iso_quotient_scan: b outside [base, end of profile]");
        const double psi_b = field_at(profile, profile.psi, b);
        if (!(psi_b > 0.0))
            throw ParameterError("iso_quotient_scan: boundary sphere degenerates (psi(b) = 0)");
        const double vol = band_volume(profile, Band{scan.base, b});
        const double bdry = area * (std::pow(psi_base, q) + std::pow(psi_b, q));
        const double quotient = std::pow(vol, (d - 1.0) / d) / bdry;
        scan.b.push_back(b);
        scan.volume.push_back(vol);
        scan.boundary.push_back(bdry);
        scan.quotient.push_back(quotient);
        if (quotient > scan.sup || scan.quotient.size() == 1) {
            scan.sup = quotient;
            scan.argsup = scan.quotient.size() - 1;
        }
    }
    return scan;
}

double varpi(int n, double eta)
{
    if (n < 3)
        throw ParameterError("varpi: n must be >= 3");
    if (!(eta > 0.0))
        throw ParameterError("varpi: eta must be positive");
    const double nn = n;
    const double a_n1 = sphere_area(n - 1);
    const double a_n = sphere_area(n);
    return 7.0 / 8.0 * std::pow(2.0, -1.0 - 2.0 / nn) * (nn - 2.0) * (nn - 2.0) / (nn * nn * (nn - 1.0) * (nn - 1.0)) *
           a_n1 * a_n1 * std::pow(a_n, 2.0 / nn - 2.0) * std::pow(eta, 2.0 * nn + 2.0);
}

double deane_iso_constant(int n, double eta, double eps)
{
    if (n < 2 || !(eta > 0.0))
        throw ParameterError("deane_iso_constant: need n >= 2 and eta > 0");
    if (!(eps >= 0.0 && eps <= 1.0))
        throw ParameterError("deane_iso_constant: eps must lie in [0, 1]");
    const double nn = n;
    return (1.0 - eps) * std::pow(2.0, 1.0 - 1.0 / nn) * sphere_area(n - 1) * std::pow(sphere_area(n), 1.0 / nn - 1.0) *
           std::pow(eta, nn + 1.0);
}

double sobolev_from_iso(int n, double C_s)
{
    if (n <= 2)
        throw ParameterError("sobolev_from_iso: n must be >= 3");
    if (!(C_s > 0.0))
        throw ParameterError("sobolev_from_iso: C_s must be positive");
    return (2.0 * n - 2.0) / (n - 2.0) / C_s;
}

AssumptionReport digamma_check(const ProfileMetric& profile, double center, double r, double tau, double p, double K,
                               double eta)
{
    const int n = profile.dim();
    if (!(r > 0.0) || !(tau > 0.0) || !(eta > 0.0))
        throw ParameterError("digamma_check: r, tau, eta must be positive");
    if (!(p > 0.5 * n))
        throw ParameterError("digamma_check: need p > n/2");
    const auto s = centered_arclength(profile);
    if (center < s.front() - 1e-12 || center > s.back() + 1e-12)
        throw ParameterError("digamma_check: ball centre outside the profile");

    AssumptionReport rep;
    rep.n = n;
    rep.p = p;
    rep.K = K;
    rep.tau = tau;
    rep.eta = eta;
    rep.r = r;
    rep.center = center;

    const auto curv = evaluate_curvature(profile);
    const Band inner = Band::around(center, tau * r);
    const Band outer = Band::around(center, r);

    rep.volume.measured = band_volume(profile, inner);
    rep.volume.bound = ball_volume(n) * std::pow(eta * tau * r, n);
    rep.volume.margin = (rep.volume.measured - rep.volume.bound) / rep.volume.bound;

    rep.energy.measured = lp_norm(curv.rm_norm, 0.5 * n, profile, inner);
    rep.energy.bound = varpi(n, eta);
    rep.energy.margin = (rep.energy.bound - rep.energy.measured) / rep.energy.bound;

    rep.ricci.measured = lp_norm(ricci_norm(curv), p, profile, outer);
    rep.ricci.bound = K * std::pow(r, n / p - 2.0);
    rep.ricci.margin = (rep.ricci.bound - rep.ricci.measured) / rep.ricci.bound;

    for (AssumptionItem* item : {&rep.volume, &rep.energy, &rep.ricci})
        item->pass = item->margin >= 0.0;
    return rep;
}

} // namespace rflab
