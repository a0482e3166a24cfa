#include "oracles/oracles.hpp"
#include "support.hpp"

#include "rflab/curvature.hpp"
#include "rflab/errors.hpp"
#include "rflab/norms.hpp"
#include "rflab/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rflab;

namespace {

double sphere_error(int M)
{
    const auto cs = sectional_curvatures(build_round_sphere(1.0, 3, M));
    double e = 0.0;
    for (std::size_t i = 0; i < cs.K_N.size(); ++i)
        e = std::max({e, std::abs(cs.K_N[i] - 1.0), std::abs(cs.K_T[i] - 1.0)});
    return e;
}

// psi = sin x (1 + 0.2 sin^2 x cos 3x), phi = 1 + 0.1 sin^2 x on [0, pi]
double fix_phi(double x) { return 1.0 + 0.1 * std::sin(x) * std::sin(x); }
double fix_psi(double x) { return std::sin(x) * (1.0 + 0.2 * std::sin(x) * std::sin(x) * std::cos(3.0 * x)); }

ProfileMetric fixture(int M)
{
    ProfileMetric p;
    p.q = 3;
    for (int i = 0; i <= M; ++i) {
        const double x = std::numbers::pi * i / M;
        p.x.push_back(x);
        p.phi.push_back(fix_phi(x));
        p.psi.push_back(i == 0 || i == M ? 0.0 : fix_psi(x));
    }
    return p;
}

} // namespace

TEST_CASE("unit sphere curvatures converge at second order")
{
    const double e1 = sphere_error(100), e2 = sphere_error(200);
    CHECK(e2 < 1e-3);
    CHECK(numerics::observed_order(e1, e2) > 1.8);
}

TEST_CASE("unit S^4 Ricci, scalar curvature and |Rm|^2")
{
    const auto cs = evaluate_curvature(build_round_sphere(1.0, 3, 400));
    for (std::size_t i = 0; i < cs.R.size(); i += 37) {
        CHECK(cs.R[i] == doctest::Approx(12.0).epsilon(1e-3));
        CHECK(cs.ric_ss[i] == doctest::Approx(3.0).epsilon(1e-3));
        CHECK(cs.ric_fiber[i] == doctest::Approx(3.0).epsilon(1e-3));
        CHECK(cs.rm_norm[i] * cs.rm_norm[i] == doctest::Approx(24.0).epsilon(1e-3));
        CHECK(std::abs(cs.a[i]) < 1e-3);
    }
}

TEST_CASE("cylinder: K_N = 0 and K_T = 1/rho^2")
{
    const auto cs = evaluate_curvature(build_cylinder(2.0, 3, 1.0, 64));
    for (std::size_t i = 0; i < cs.K_N.size(); ++i) {
        CHECK(std::abs(cs.K_N[i]) < 1e-12);
        CHECK(cs.K_T[i] == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(cs.rm_norm[i] * cs.rm_norm[i] == doctest::Approx(oracles::riemann_index_sum(0.0, 0.25, 3)).epsilon(1e-12));
    }
}

TEST_CASE("neck band curvature matches the hyperbola closed form")
{
    const double G = 0.2;
    const auto p = support::band_dumbbell(G, 3200);
    const auto cs = evaluate_curvature(p);
    const auto s = centered_arclength(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (std::abs(s[i]) > 1.0)
            continue;
        const double r = G * G + s[i] * s[i];
        CHECK(std::abs(cs.K_N[i] + G * G / (r * r)) < 1e-4 * G * G / (r * r) + 1e-6);
        CHECK(std::abs(cs.K_T[i] - G * G / (r * r)) < 1e-4 * G * G / (r * r) + 1e-6);
        // R = 2q K_N + q(q-1) K_T vanishes for q = 3
        CHECK(std::abs(cs.R[i]) < 1e-3 * cs.rm_norm[i]);
        // a = -2 G^2 / (G^2 + s^2)
        CHECK(cs.a[i] == doctest::Approx(-2.0 * G * G / r).epsilon(1e-4));
    }
    CHECK(cs.a[p.size() / 2] == doctest::Approx(-2.0).epsilon(1e-4));
}

TEST_CASE("scalar curvature vanishes identically when K_T = -K_N and q = 3")
{
    CurvatureState st;
    st.q = 3;
    st.K_N = {-1.0, -0.3, 2.5};
    st.K_T = {1.0, 0.3, -2.5};
    st = ricci_and_scalar(st);
    for (double r : st.R)
        CHECK(r == 0.0);
}

TEST_CASE("curvatures agree with a coordinate Christoffel computation")
{
    const int M = 1600;
    const auto p = fixture(M);
    const auto cs = evaluate_curvature(p);
    const auto metric = oracles::warped_metric(fix_phi, fix_psi, 3);
    for (int i : {M / 8, M / 4, 3 * M / 8, 5 * M / 8}) {
        Eigen::VectorXd pt(4);
        pt << p.x[static_cast<std::size_t>(i)], 1.0, 1.2, 0.3;
        const auto oc = oracles::coordinate_curvature(metric, pt);
        const auto ric = oc.ricci();
        const std::size_t k = static_cast<std::size_t>(i);
        CHECK(cs.K_N[k] == doctest::Approx(oc.sectional(0, 1)).epsilon(1e-4));
        CHECK(cs.K_T[k] == doctest::Approx(oc.sectional(1, 2)).epsilon(1e-4));
        CHECK(cs.ric_ss[k] == doctest::Approx(ric(0, 0) / oc.g(0, 0)).epsilon(1e-4));
        CHECK(cs.ric_fiber[k] == doctest::Approx(ric(1, 1) / oc.g(1, 1)).epsilon(1e-4));
        CHECK(cs.R[k] == doctest::Approx(oc.scalar()).epsilon(1e-4));
        CHECK(cs.rm_norm[k] * cs.rm_norm[k] == doctest::Approx(oc.norm_squared()).epsilon(1e-4));
    }
}

TEST_CASE("|Rm|^2 formula equals the full index sum")
{
    for (int q : {2, 3, 4, 5})
        for (double kn : {-1.3, 0.0, 0.7})
            for (double kt : {-0.2, 1.0, 2.5})
                CHECK(riemann_norm_squared(kn, kt, q) ==
                      doctest::Approx(oracles::riemann_index_sum(kn, kt, q)).epsilon(1e-12));
    CHECK(riemann_norm_squared(1.0, 1.0, 3) == doctest::Approx(24.0));
    CHECK(riemann_norm_squared(-2.0, 2.0, 3) == doctest::Approx(96.0));
}

TEST_CASE("a vanishes where K_N = K_T")
{
    const auto cs = evaluate_curvature(build_round_sphere(3.0, 4, 200));
    for (double v : cs.a)
        CHECK(std::abs(v) < 1e-3);
}

TEST_CASE("neck and bump census")
{
    const auto sphere = neck_bump_analysis(build_round_sphere(1.0, 3, 200));
    CHECK(sphere.necks.empty());
    CHECK(sphere.bumps.size() == 1);
    CHECK(!sphere.r_min.has_value());

    const auto two = neck_bump_analysis(support::two_neck(800));
    CHECK(two.necks.size() == 2);
    CHECK(two.bumps.size() == 3);
    CHECK(two.necks[0].psi == doctest::Approx(two.necks[1].psi).epsilon(1e-12));
    CHECK(two.necks[0].s == doctest::Approx(-two.necks[1].s).epsilon(1e-9));

    const auto dumbbell = neck_bump_analysis(support::band_dumbbell(0.2));
    CHECK(dumbbell.necks.size() == 1);
    CHECK(dumbbell.necks[0].s == 0.0);
    CHECK(dumbbell.bumps.size() == 2);
    REQUIRE(dumbbell.r_max.has_value());
    CHECK(*dumbbell.r_max > 1.0);
}

TEST_CASE("scalar curvature is bounded by the Riemann norm")
{
    std::vector<ProfileMetric> states{build_round_sphere(1.0, 3, 200), build_cylinder(0.5, 3, 2.0, 64),
                                      support::band_dumbbell(0.1), support::two_neck(800), fixture(400),
                                      build_round_sphere(1.0, 5, 200)};
    for (const auto& p : states) {
        const auto cs = evaluate_curvature(p);
        const double d = p.dim();
        for (std::size_t i = 0; i < cs.R.size(); ++i) {
            CHECK(std::abs(cs.R[i]) <= std::sqrt(d * (d - 1) / 2.0) * cs.rm_norm[i] * (1 + 1e-12));
            CHECK(cs.R[i] == doctest::Approx(cs.ric_ss[i] + p.q * cs.ric_fiber[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("Ricci norm")
{
    const auto cs = evaluate_curvature(build_round_sphere(1.0, 3, 400));
    const auto rn = ricci_norm(cs);
    CHECK(rn[200] == doctest::Approx(6.0).epsilon(1e-4));
}

TEST_CASE("interior vanishing of psi is singular")
{
    auto p = build_round_sphere(1.0, 3, 100);
    p.psi[50] = 1e-14;
    CHECK_THROWS_AS(sectional_curvatures(p), SingularProfileError);
}
