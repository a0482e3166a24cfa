#include "oracles/oracles.hpp"
#include "support.hpp"

#include "rflab/commands.hpp"
#include "rflab/curvature.hpp"
#include "rflab/errors.hpp"
#include "rflab/norms.hpp"
#include "rflab/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rflab;

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^b (G^2 + s^2)^{3/2} ds
double band_volume_integral(double G, double b)
{
    const double r = std::sqrt(G * G + b * b);
    return b * (2.0 * b * b + 5.0 * G * G) * r / 8.0 + 3.0 * std::pow(G, 4) / 8.0 * std::asinh(b / G);
}

} // namespace

TEST_CASE("sphere and ball volumes")
{
    for (int k = 1; k <= 7; ++k) {
        CHECK(sphere_area(k) == doctest::Approx(oracles::sphere_volume(k)).epsilon(1e-13));
        CHECK(ball_volume(k + 1) == doctest::Approx(oracles::sphere_volume(k) / (k + 1)).epsilon(1e-13));
    }
    CHECK(sphere_area(3) == doctest::Approx(2.0 * kPi * kPi));
    CHECK(sphere_area(4) == doctest::Approx(8.0 * kPi * kPi / 3.0));
}

TEST_CASE("unit S^4 volume at M = 800")
{
    const auto p = build_round_sphere(1.0, 3, 800);
    const double exact = 8.0 * kPi * kPi / 3.0;
    CHECK(std::abs(band_volume(p, Band::all()) - exact) / exact < 1e-6);
}

TEST_CASE("neck band volume matches the antiderivative")
{
    const double G = 0.2;
    const auto p = support::band_dumbbell(G, 256000, 0.9);
    const double exact = oracles::sphere_volume(3) * band_volume_integral(G, 1.0);
    CHECK(std::abs(band_volume(p, Band{0.0, 1.0}) - exact) / exact < 1e-8);
}

TEST_CASE("empty band has zero volume")
{
    const auto p = build_round_sphere(1.0, 3, 100);
    CHECK(band_volume(p, Band{0.3, 0.3}) == 0.0);
    CHECK_THROWS_AS(band_volume(p, Band{0.4, 0.3}), ParameterError);
}

TEST_CASE("band |Rm|_2 matches the closed form")
{
    const double G = 0.2, c = 1.0;
    const auto p = support::band_dumbbell(G, 64000, 0.9);
    const auto cs = evaluate_curvature(p);
    const double num = lp_norm(cs.rm_norm, 2.0, p, Band::around(0.0, c));
    const double exact2 = 24.0 * 2.0 * oracles::sphere_volume(3) * oracles::band_kn_integral_exact(G, c);
    CHECK(std::abs(num * num - exact2) / exact2 < 1e-8);
    CHECK(band_rm2_closed_form(G, c) == doctest::Approx(std::sqrt(exact2)).epsilon(1e-13));
}

TEST_CASE("K_N energy on the band sits below the upper-bound chain")
{
    for (double G : {0.05, 0.1, 0.2, 0.4})
        for (double c : {0.5, 1.0, 1.5}) {
            if (G >= c)
                continue;
            DumbbellShape sh;
            sh.G = G;
            sh.c = c;
            sh.M = 8000;
            sh.cluster = 0.99;
            const auto p = build_dumbbell(sh);
            const auto cs = evaluate_curvature(p);
            std::vector<double> kn2(p.size());
            for (std::size_t i = 0; i < p.size(); ++i)
                kn2[i] = cs.K_N[i] * cs.K_N[i];
            const double lhs = band_integral(p, kn2, Band::around(0.0, c));
            // 2^{7/2} alpha(3) int_0^c G^4/(G+s)^5 ds = 2^{3/2} alpha(3) (1 - G^4/(G+c)^4)
            const double rhs = std::pow(2.0, 1.5) * oracles::sphere_volume(3) * (1.0 - std::pow(G / (G + c), 4));
            CHECK(lhs <= rhs);
            CHECK(lhs > 0.1 * rhs);
        }
}

TEST_CASE("Lp norm of a constant field")
{
    const auto p = support::band_dumbbell(0.2, 1600);
    const std::vector<double> f(p.size(), 3.0);
    const Band b = Band::around(0.0, 0.7);
    const double vol = band_volume(p, b);
    for (double q : {1.0, 2.0, 2.5, 4.0})
        CHECK(lp_norm(f, q, p, b) == doctest::Approx(3.0 * std::pow(vol, 1.0 / q)).epsilon(1e-12));
    CHECK(lp_norm(f, std::numeric_limits<double>::infinity(), p, b) == 3.0);
    CHECK_THROWS_AS(lp_norm(f, 0.5, p, b), ParameterError);
}

TEST_CASE("quadrature converges at second order on the neck band")
{
    const double G = 0.2;
    const double exact = oracles::sphere_volume(3) * band_volume_integral(G, 1.0);
    std::vector<double> err;
    for (int M : {1000, 2000, 4000}) {
        const auto p = support::band_dumbbell(G, M, 0.5);
        err.push_back(std::abs(band_volume(p, Band{0.0, 1.0}) - exact));
    }
    CHECK(numerics::observed_order(err[0], err[1]) > 1.8);
    CHECK(numerics::observed_order(err[1], err[2]) > 1.8);
}

TEST_CASE("hemisphere isoperimetric quotient")
{
    const auto p = build_round_sphere(1.0, 3, 800);
    const std::vector<double> b{0.0};
    const auto scan = iso_quotient_scan(p, b);
    const double exact = std::pow(4.0 * kPi * kPi / 3.0, 0.75) / (2.0 * kPi * kPi);
    CHECK(scan.quotient[0] == doctest::Approx(exact).epsilon(1e-5));
}

TEST_CASE("small caps approach the Euclidean quotient")
{
    const auto p = build_round_sphere(1.0, 3, 4000);
    const double euclid = std::pow(ball_volume(4), 0.75) / sphere_area(3);
    std::vector<double> b, dev;
    for (double eps : {0.4, 0.2, 0.1})
        b.push_back(-kPi / 2.0 + eps);
    const auto scan = iso_quotient_scan(p, b);
    for (double q : scan.quotient)
        dev.push_back(std::abs(q / euclid - 1.0));
    CHECK(dev[2] < 3e-3);
    CHECK(dev[0] / dev[1] == doctest::Approx(4.0).epsilon(0.1));
    CHECK(dev[1] / dev[2] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("iso scan rejects a degenerate boundary")
{
    const auto p = build_round_sphere(1.0, 3, 200);
    const std::vector<double> b{kPi / 2.0};
    CHECK_THROWS_AS(iso_quotient_scan(p, b), ParameterError);
}

TEST_CASE("neck quotients stay bounded and track the model shape")
{
    IsoSettings st;
    st.resolution = 50;
    st.M = 4000;
    const auto rows = scan_iso(st, 2);
    double sup = 0.0, lo = 1e300, hi = 0.0;
    for (const auto& row : rows) {
        sup = std::max(sup, row.scan.sup);
        for (std::size_t k = 0; k < row.scan.b.size(); ++k) {
            const double b = row.scan.b[k], G = row.G;
            const double model = std::pow(std::pow(G + b, 4) - std::pow(G, 4), 0.75) / (G * G * G + b * b * b);
            const double ratio = row.scan.quotient[k] / model;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    CHECK(sup < 1.0);
    CHECK(lo > 0.0);
    CHECK(hi / lo < 10.0);
    CHECK(rows.back().scan.sup == doctest::Approx(rows[rows.size() - 2].scan.sup).epsilon(0.02));
}

TEST_CASE("varpi value and scaling")
{
    CHECK(std::abs(varpi(4, 1.0) - 7.0 / 8.0 * kPi / (64.0 * std::sqrt(3.0))) < 1e-12);
    CHECK(varpi(4, 1.0) == doctest::Approx(0.0248).epsilon(1e-2));
    for (int n : {3, 4, 5, 7})
        for (double eta : {0.3, 0.5, 2.0})
            CHECK(varpi(n, eta) == doctest::Approx(std::pow(eta, 2 * n + 2) * varpi(n, 1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(varpi(2, 1.0), ParameterError);
}

TEST_CASE("band |Rm|_2 at G = 1e-3 is far above the energy gap")
{
    CHECK(band_rm2_closed_form(1e-3, 1.0) > 100.0 * varpi(4, 1.0));
    const auto p = support::band_dumbbell(1e-3, 64000, 0.9999);
    const double num = lp_norm(evaluate_curvature(p).rm_norm, 2.0, p, Band::around(0.0, 1.0));
    CHECK(num > 100.0 * varpi(4, 1.0));
}

TEST_CASE("band |Rm|_2 settles as G shrinks")
{
    std::vector<double> v;
    for (double G : {0.2, 0.1, 0.05, 0.025}) {
        const auto p = support::band_dumbbell(G, 16000, 0.999);
        v.push_back(lp_norm(evaluate_curvature(p).rm_norm, 2.0, p, Band::around(0.0, 1.0)));
    }
    for (std::size_t k = 2; k < v.size(); ++k)
        CHECK(std::abs(v[k] - v[k - 1]) < 0.6 * std::abs(v[k - 1] - v[k - 2]));
    CHECK(v.back() < band_rm2_upper_bound(1e-9, 1.0));
}

TEST_CASE("band |Ric|_p increases as G decreases")
{
    for (double p_exp : {2.5, 3.0, 4.0}) {
        double prev = 0.0;
        for (double G : {0.2, 0.1, 0.05, 0.025}) {
            const auto p = support::band_dumbbell(G, 16000, 0.999);
            const double v = lp_norm(ricci_norm(evaluate_curvature(p)), p_exp, p, Band::around(0.0, 1.0));
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("Deane iso constant")
{
    CHECK(deane_iso_constant(4, 1.0, 1.0) == 0.0);
    double prev = 0.0;
    for (double eta : {0.1, 0.5, 1.0, 2.0}) {
        const double v = deane_iso_constant(4, eta, 0.2);
        CHECK(v > prev);
        prev = v;
    }
    const double direct = std::pow(2.0, 0.75) * 2.0 * kPi * kPi * std::pow(8.0 * kPi * kPi / 3.0, -0.75);
    CHECK(deane_iso_constant(4, 1.0, 0.0) == doctest::Approx(direct).epsilon(1e-13));
    CHECK_THROWS_AS(deane_iso_constant(4, 1.0, 1.5), ParameterError);
    CHECK_THROWS_AS(deane_iso_constant(4, 1.0, -0.1), ParameterError);
}

TEST_CASE("Sobolev constant from the isoperimetric constant")
{
    CHECK(sobolev_from_iso(4, 1.0) == doctest::Approx(3.0));
    CHECK(sobolev_from_iso(3, 2.0) == doctest::Approx(2.0));
    for (int n : {3, 4, 6})
        for (double cs : {0.1, 1.0, 7.5})
            CHECK(sobolev_from_iso(n, cs) * cs == doctest::Approx((2.0 * n - 2.0) / (n - 2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(sobolev_from_iso(2, 1.0), ParameterError);
}

TEST_CASE("assumption checker on the unit sphere")
{
    const auto p = build_round_sphere(1.0, 3, 4000);
    // At r = 0.1 the energy item cannot pass: |Rm|_2 on a ball of radius 0.05
    // is about sqrt(24 w(4)) 0.05^2, far above varpi(4, 1/2).
    const auto mid = digamma_check(p, 0.0, 0.1, 0.5, 3.0, 1e6, 0.5);
    CHECK(mid.volume.pass);
    CHECK(mid.ricci.pass);
    CHECK(!mid.energy.pass);
    // A band of half-width 0.05 about the equator has volume about 2 * 0.05 * alpha(3).
    CHECK(mid.volume.measured == doctest::Approx(2.0 * 0.05 * sphere_area(3)).epsilon(1e-3));
    CHECK(mid.energy.measured == doctest::Approx(std::sqrt(24.0 * mid.volume.measured)).epsilon(1e-3));

    // A small cap at the pole is a genuine geodesic ball.
    const auto pole = digamma_check(p, -kPi / 2.0, 0.002, 0.5, 3.0, 1e6, 0.5);
    CHECK(pole.all_pass());
    CHECK(pole.energy.measured == doctest::Approx(std::sqrt(24.0 * ball_volume(4)) * 1e-6).epsilon(1e-2));

    for (const auto* item : {&mid.volume, &mid.energy, &mid.ricci, &pole.volume, &pole.energy, &pole.ricci})
        CHECK(item->pass == (item->margin >= 0.0));
    CHECK_THROWS_AS(digamma_check(p, 3.0, 0.1, 0.5, 3.0, 1.0, 0.5), ParameterError);
    CHECK_THROWS_AS(digamma_check(p, 0.0, 0.1, 0.5, 1.5, 1.0, 0.5), ParameterError);
}

TEST_CASE("assumption checker on the neck band as G shrinks")
{
    double prev_margin = 1e300;
    std::vector<bool> ricci_pass, energy_pass;
    for (double G : {0.2, 0.1, 0.05, 0.025}) {
        const auto p = support::band_dumbbell(G, 16000, 0.999);
        const auto rep = digamma_check(p, 0.0, 1.0, 1.0, 3.0, 50.0, 1.0);
        CHECK(rep.ricci.margin < prev_margin);
        prev_margin = rep.ricci.margin;
        ricci_pass.push_back(rep.ricci.pass);
        energy_pass.push_back(rep.energy.pass);
    }
    CHECK(ricci_pass.front());
    CHECK(!ricci_pass.back());
    for (bool e : energy_pass)
        CHECK(!e);
}

TEST_CASE("field interpolation in arclength")
{
    const auto p = build_round_sphere(1.0, 3, 400);
    CHECK(field_at(p, p.psi, 0.3) == doctest::Approx(std::cos(0.3)).epsilon(1e-4));
    CHECK_THROWS_AS(field_at(p, p.psi, 2.0), ParameterError);
}
