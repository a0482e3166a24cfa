#pragma once

#include "rflab/geometry.hpp"
#include "rflab/stencil.hpp"

#include <optional>
#include <vector>

namespace rflab {

/// Arclength derivatives of psi together with the raw coordinate derivatives
/// they were assembled from.
struct ProfileDerivatives {
    std::vector<double> psi_x;
    std::vector<double> psi_xx;
    std::vector<double> phi_x;
    std::vector<double> psi_s;
    std::vector<double> psi_ss;
};

ProfileDerivatives compute_derivatives(const ProfileMetric& profile, const Stencil& stencil);

/// Pointwise curvature of a warped product. Fields are indexed by grid node;
/// pole values of closed profiles are the regular limits K_N = K_T there.
struct CurvatureState {
    int q = 3;
    std::vector<double> psi;
    std::vector<double> psi_s;
    std::vector<double> psi_ss;
    std::vector<double> K_N;
    std::vector<double> K_T;
    std::vector<double> ric_ss;
    std::vector<double> ric_fiber;
    std::vector<double> R;
    std::vector<double> rm_norm;
    std::vector<double> a;
};

/// K_N = -psi_ss / psi and K_T = (1 - psi_s^2) / psi^2.
/// Throws SingularProfileError if psi is below 1e-12 max(psi) at an interior node.
CurvatureState sectional_curvatures(const ProfileMetric& profile);
CurvatureState sectional_curvatures(const ProfileMetric& profile, const Stencil& stencil);

/// ric_ss = q K_N, ric_fiber = K_N + (q-1) K_T, R = 2q K_N + q(q-1) K_T.
CurvatureState ricci_and_scalar(CurvatureState state);

/// |Rm|^2 = 4 [q K_N^2 + q(q-1)/2 K_T^2]; stores |Rm|.
CurvatureState riemann_norm(CurvatureState state);
double riemann_norm_squared(double k_normal, double k_tangential, int q);

/// a = psi^2 (K_N - K_T).
CurvatureState a_profile(CurvatureState state);

/// All of the above in one pass.
CurvatureState evaluate_curvature(const ProfileMetric& profile);
CurvatureState evaluate_curvature(const ProfileMetric& profile, const Stencil& stencil);

/// |Ric| = sqrt(ric_ss^2 + q ric_fiber^2) per node.
std::vector<double> ricci_norm(const CurvatureState& state);

struct Extremum {
    std::size_t node = 0;
    double psi = 0.0;
    double s = 0.0; // centred arclength
};

struct NeckReport {
    std::vector<Extremum> necks;
    std::vector<Extremum> bumps;
    std::optional<double> r_min; // psi at the smallest neck
    std::optional<double> r_max; // psi at the smallest bump
};

/// Interior local minima (necks) and maxima (bumps) of psi. Runs of equal psi
/// (relative tolerance 1e-12) count once, at the run's middle node.
NeckReport neck_bump_analysis(const ProfileMetric& profile);

} // namespace rflab
