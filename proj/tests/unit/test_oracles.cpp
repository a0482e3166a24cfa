#include "oracles/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("oracle: band K_N integral")
{
    CHECK(oracles::band_kn_integral_exact(1.0, 1.0) == doctest::Approx(5.0 / (3.0 * std::pow(2.0, 1.5))).epsilon(1e-15));
    CHECK(oracles::band_kn_integral_exact(1e-3, 1e6) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(2.0 * oracles::sphere_volume(3) * (2.0 / 3.0) == doctest::Approx(8.0 * kPi * kPi / 3.0));
    for (double G : {0.01, 0.3, 2.0})
        CHECK(oracles::band_kn_integral_exact(G, 1.7 * G) ==
              doctest::Approx(oracles::band_kn_integral_exact(1.0, 1.7)).epsilon(1e-13));
    // against Simpson on the integrand
    const double G = 0.2, c = 1.0;
    const double num = oracles::simpson([&](double s) { return std::pow(G, 4) * std::pow(G * G + s * s, -2.5); }, 0.0, c);
    CHECK(oracles::band_kn_integral_exact(G, c) == doctest::Approx(num).epsilon(1e-10));
}

TEST_CASE("oracle: shrinking sphere")
{
    CHECK(oracles::exact_sphere_shrink(1.0, 3, 0.0) == 1.0);
    CHECK(oracles::exact_sphere_shrink(1.0, 3, 0.1) == doctest::Approx(std::sqrt(0.4)).epsilon(1e-15));
    CHECK_THROWS_AS(oracles::exact_sphere_shrink(1.0, 3, 1.0 / 6.0), std::domain_error);
    CHECK_NOTHROW(oracles::exact_sphere_shrink(1.0, 3, 1.0 / 6.0 - 1e-9));
}

TEST_CASE("oracle: sphere volumes against the Gamma function")
{
    for (int k = 0; k <= 9; ++k)
        CHECK(oracles::sphere_volume(k) ==
              doctest::Approx(2.0 * std::pow(kPi, (k + 1) / 2.0) / std::tgamma((k + 1) / 2.0)).epsilon(1e-14));
}

TEST_CASE("oracle: Riemann index sum")
{
    CHECK(oracles::riemann_index_sum(1.0, 1.0, 3) == doctest::Approx(24.0));
    CHECK(oracles::riemann_index_sum(1.0, 0.0, 3) == doctest::Approx(12.0));
    for (double k : {0.5, 2.0})
        CHECK(oracles::riemann_index_sum(-k, k, 3) == doctest::Approx(24.0 * k * k));
}

TEST_CASE("oracle: coordinate curvature of space forms")
{
    // flat R^4 in polar form: phi = 1, psi = x
    const auto flat = oracles::warped_metric([](double) { return 1.0; }, [](double x) { return x; }, 3);
    Eigen::VectorXd p(4);
    p << 0.8, 1.0, 1.1, 0.4;
    const auto f = oracles::coordinate_curvature(flat, p);
    CHECK(std::abs(f.sectional(0, 1)) < 1e-6);
    CHECK(std::abs(f.sectional(1, 2)) < 1e-6);
    CHECK(std::abs(f.norm_squared()) < 1e-10);

    // unit S^4 and hyperbolic H^4
    const auto sphere = oracles::warped_metric([](double) { return 1.0; }, [](double x) { return std::sin(x); }, 3);
    const auto s = oracles::coordinate_curvature(sphere, p);
    CHECK(s.sectional(0, 1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.sectional(2, 3) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.scalar() == doctest::Approx(12.0).epsilon(1e-6));
    CHECK(s.norm_squared() == doctest::Approx(24.0).epsilon(1e-6));
    const auto hyp = oracles::warped_metric([](double) { return 1.0; }, [](double x) { return std::sinh(x); }, 3);
    CHECK(oracles::coordinate_curvature(hyp, p).sectional(0, 2) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("oracle: Simpson and Monte Carlo ratio sup")
{
    CHECK(oracles::simpson([](double x) { return x * x * x; }, 0.0, 2.0, 10) == doctest::Approx(4.0).epsilon(1e-14));
    std::mt19937_64 rng(5);
    Eigen::MatrixXd g1 = Eigen::MatrixXd::Identity(2, 2), g2 = Eigen::MatrixXd::Identity(2, 2);
    g1(1, 1) = 9.0;
    const double mc = oracles::ratio_sup_mc(g1, g2, rng, 100000);
    CHECK(mc <= std::log(9.0) + 1e-12);
    CHECK(mc == doctest::Approx(std::log(9.0)).epsilon(1e-4));
    const auto g = oracles::random_spd(4, rng, 0.5, 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    CHECK(es.eigenvalues().minCoeff() >= 0.5 - 1e-12);
    CHECK(es.eigenvalues().maxCoeff() <= 2.0 + 1e-12);
}
