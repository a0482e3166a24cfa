#pragma once

#include "rflab/geometry.hpp"

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace rflab {

/// Volume of the unit k-sphere, 2 pi^{(k+1)/2} / Gamma((k+1)/2).
double sphere_area(int k);
/// Volume of the unit k-ball, sphere_area(k - 1) / k.
double ball_volume(int k);

/// Closed interval of centred arclength. Balls B(x, r) of the warped product
/// are represented by bands {|s - s0| <= r}, clipped to the profile.
struct Band {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    static Band all() { return {}; }
    static Band around(double center, double radius) { return {center - radius, center + radius}; }
    bool is_all() const { return lo == -std::numeric_limits<double>::infinity() && hi == std::numeric_limits<double>::infinity(); }
};

/// int_band f dVol with dVol = alpha(q) psi^q phi dx, trapezoid in x. Band edges
/// between nodes are handled by linear interpolation inside the cut cell.
double band_integral(const ProfileMetric& profile, std::span<const double> f, Band band);

/// alpha(q) int_band psi^q phi dx.
double band_volume(const ProfileMetric& profile, Band band);

/// (int_band |f|^p dVol)^{1/p}; p = infinity gives the max over band nodes.
double lp_norm(std::span<const double> field, double p, const ProfileMetric& profile, Band band);

/// Linear interpolation of a nodal field at centred arclength s.
double field_at(const ProfileMetric& profile, std::span<const double> field, double s);

struct IsoScan {
    double base = 0.0;
    std::vector<double> b;
    std::vector<double> volume;
    std::vector<double> boundary;
    std::vector<double> quotient;
    double sup = 0.0;
    std::size_t argsup = 0;
};

/// Q(b) = Vol(Omega_b)^{(d-1)/d} / Vol(d Omega_b) over the level-set slabs
/// Omega_b = {base <= s <= b}. The boundary volume counts both level spheres,
/// alpha(q) (psi(base)^q + psi(b)^q); with base at a pole only psi(b) remains.
/// base defaults to the left end of the profile.
IsoScan iso_quotient_scan(const ProfileMetric& profile, std::span<const double> b_values,
                          std::optional<double> base = std::nullopt);

/// Energy-gap constant
/// (7/8) 2^{-1-2/n} (n-2)^2 / (n^2 (n-1)^2) alpha(n-1)^2 alpha(n)^{2/n-2} eta^{2n+2}.
double varpi(int n, double eta);

/// (1 - eps) 2^{1-1/n} alpha(n-1) alpha(n)^{1/n-1} eta^{n+1}.
double deane_iso_constant(int n, double eta, double eps);

/// Sobolev constant from the isoperimetric constant: (2n - 2) / (n - 2) / C_s.
double sobolev_from_iso(int n, double C_s);

struct AssumptionItem {
    bool pass = false;
    double margin = 0.0; // relative slack, >= 0 exactly when pass
    double measured = 0.0;
    double bound = 0.0;
};

struct AssumptionReport {
    int n = 0;
    double p = 0.0, K = 0.0, tau = 0.0, eta = 0.0, r = 0.0, center = 0.0;
    AssumptionItem volume;  // Vol B(x, tau r) >= w(n) (eta tau r)^n
    AssumptionItem energy;  // |Rm|_{n/2, B(x, tau r)} <= varpi(n, eta)
    AssumptionItem ricci;   // |Ric|_{p, B(x, r)} <= K r^{n/p - 2}
    bool all_pass() const { return volume.pass && energy.pass && ricci.pass; }
};

AssumptionReport digamma_check(const ProfileMetric& profile, double center, double r, double tau, double p,
                               double K, double eta);

} // namespace rflab
