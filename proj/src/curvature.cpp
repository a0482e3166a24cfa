#include "rflab/curvature.hpp"

#include "rflab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rflab {

namespace {

// Odd fit psi ~ a h + b h^3 about a pole; the regular curvature limit there is -6 b / a.
double pole_curvature(const ProfileMetric& profile, int pole)
{
    const std::size_t n = profile.size();
    const std::size_t p = pole == 0 ? 0 : n - 1;
    const std::size_t i1 = pole == 0 ? 1 : n - 2;
    const std::size_t i2 = pole == 0 ? 2 : n - 3;
    // phi is even about the pole, so the trapezoid rule is third order per cell here.
    const double h1 = 0.5 * (profile.phi[p] + profile.phi[i1]) * std::abs(profile.x[i1] - profile.x[p]);
    const double h2 = h1 + 0.5 * (profile.phi[i1] + profile.phi[i2]) * std::abs(profile.x[i2] - profile.x[i1]);
    const double y1 = profile.psi[i1], y2 = profile.psi[i2];
    const double det = h1 * h2 * (h2 * h2 - h1 * h1);
    const double a = (y1 * h2 * h2 * h2 - y2 * h1 * h1 * h1) / det;
    const double b = (y2 * h1 - y1 * h2) / det;
    return -6.0 * b / a;
}

} // namespace

ProfileDerivatives compute_derivatives(const ProfileMetric& profile, const Stencil& stencil)
{
    ProfileDerivatives d;
    d.psi_x = stencil.d1(profile.psi, Parity::Odd);
    d.psi_xx = stencil.d2(profile.psi, Parity::Odd);
    d.phi_x = stencil.d1(profile.phi, Parity::Even);
    const std::size_t n = profile.size();
    d.psi_s.resize(n);
    d.psi_ss.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = profile.phi[i];
        d.psi_s[i] = d.psi_x[i] / phi;
        d.psi_ss[i] = (d.psi_xx[i] - d.psi_x[i] * d.phi_x[i] / phi) / (phi * phi);
    }
    return d;
}

CurvatureState sectional_curvatures(const ProfileMetric& profile)
{
    return sectional_curvatures(profile, Stencil(profile));
}

CurvatureState sectional_curvatures(const ProfileMetric& profile, const Stencil& stencil)
{
    const std::size_t n = profile.size();
    const std::size_t first = profile.closed() ? 1 : 0;
    const std::size_t last = profile.closed() ? n - 1 : n;
    const double psi_max = *std::max_element(profile.psi.begin(), profile.psi.end());
    for (std::size_t i = first; i < last; ++i)
        if (!(profile.psi[i] >= 1e-12 * psi_max))
            throw SingularProfileError("curvature: psi vanishes at interior node " + std::to_string(i));

    const auto d = compute_derivatives(profile, stencil);
    CurvatureState st;
    st.q = profile.q;
    st.psi = profile.psi;
    st.psi_s = d.psi_s;
    st.psi_ss = d.psi_ss;
    st.K_N.resize(n);
    st.K_T.resize(n);
    for (std::size_t i = first; i < last; ++i) {
        const double psi = profile.psi[i];
        st.K_N[i] = -d.psi_ss[i] / psi;
        st.K_T[i] = (1.0 - d.psi_s[i] * d.psi_s[i]) / (psi * psi);
    }
    if (profile.closed()) {
        for (int pole = 0; pole < 2; ++pole) {
            const std::size_t p = pole == 0 ? 0 : n - 1;
            const double k = pole_curvature(profile, pole);
            st.K_N[p] = k;
            st.K_T[p] = k;
        }
    }
    return st;
}

CurvatureState ricci_and_scalar(CurvatureState state)
{
    const double q = state.q;
    const std::size_t n = state.K_N.size();
    state.ric_ss.resize(n);
    state.ric_fiber.resize(n);
    state.R.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double kn = state.K_N[i], kt = state.K_T[i];
        state.ric_ss[i] = q * kn;
        state.ric_fiber[i] = kn + (q - 1.0) * kt;
        state.R[i] = 2.0 * q * kn + q * (q - 1.0) * kt;
    }
    return state;
}

double riemann_norm_squared(double k_normal, double k_tangential, int q)
{
    const double qq = q;
    return 4.0 * (qq * k_normal * k_normal + 0.5 * qq * (qq - 1.0) * k_tangential * k_tangential);
}

CurvatureState riemann_norm(CurvatureState state)
{
    const std::size_t n = state.K_N.size();
    state.rm_norm.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        state.rm_norm[i] = std::sqrt(riemann_norm_squared(state.K_N[i], state.K_T[i], state.q));
    return state;
}

CurvatureState a_profile(CurvatureState state)
{
    const std::size_t n = state.K_N.size();
    state.a.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        state.a[i] = state.psi[i] * state.psi[i] * (state.K_N[i] - state.K_T[i]);
    return state;
}

CurvatureState evaluate_curvature(const ProfileMetric& profile)
{
    return evaluate_curvature(profile, Stencil(profile));
}

CurvatureState evaluate_curvature(const ProfileMetric& profile, const Stencil& stencil)
{
    return a_profile(riemann_norm(ricci_and_scalar(sectional_curvatures(profile, stencil))));
}

std::vector<double> ricci_norm(const CurvatureState& state)
{
    std::vector<double> out(state.ric_ss.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::sqrt(state.ric_ss[i] * state.ric_ss[i] + state.q * state.ric_fiber[i] * state.ric_fiber[i]);
    return out;
}

NeckReport neck_bump_analysis(const ProfileMetric& profile)
{
    NeckReport rep;
    const auto& psi = profile.psi;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(psi.size());
    const bool periodic = !profile.closed();
    const auto s = centered_arclength(profile);
    auto at = [&](std::ptrdiff_t i) { return psi[static_cast<std::size_t>(periodic ? (i % n + n) % n : i)]; };
    auto same = [](double u, double v) { return std::abs(u - v) <= 1e-12 * std::max(std::abs(u), std::abs(v)); };

    const std::ptrdiff_t begin = periodic ? 0 : 1;
    const std::ptrdiff_t end = periodic ? n : n - 1;
    std::ptrdiff_t i = begin;
    if (periodic) {
        // Start scanning at a run boundary so no plateau straddles the wrap.
        std::ptrdiff_t k = 0;
        while (k < n && same(at(k), at(k - 1)))
            ++k;
        if (k == n)
            return rep; // constant profile
        i = k;
    }
    const std::ptrdiff_t stop = periodic ? i + n : end;
    while (i < stop) {
        std::ptrdiff_t j = i;
        while (j + 1 < (periodic ? stop : end) && same(at(j + 1), at(i)))
            ++j;
        const double left = at(i - 1), right = at(j + 1), v = at(i);
        const bool left_ok = periodic || i - 1 >= 0;
        const bool right_ok = periodic || j + 1 < n;
        if (left_ok && right_ok) {
            const std::ptrdiff_t mid = (i + j) / 2;
            const std::size_t node = static_cast<std::size_t>(periodic ? mid % n : mid);
            Extremum e{node, v, s[node]};
            if (left > v && right > v && !same(left, v) && !same(right, v))
                rep.necks.push_back(e);
            else if (left < v && right < v && !same(left, v) && !same(right, v))
                rep.bumps.push_back(e);
        }
        i = j + 1;
    }
    for (const auto& e : rep.necks)
        rep.r_min = rep.r_min ? std::min(*rep.r_min, e.psi) : e.psi;
    for (const auto& e : rep.bumps)
        rep.r_max = rep.r_max ? std::min(*rep.r_max, e.psi) : e.psi;
    return rep;
}

} // namespace rflab
