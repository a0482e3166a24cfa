#pragma once

#include "rflab/curvature.hpp"
#include "rflab/geometry.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rflab {

enum class FlowMode { Ricci, LocalRicci };
enum class StopReason { ReachedTEnd, PinchDetected, CurvatureCap, NumericFailure };

std::string to_string(FlowMode mode);
std::string to_string(StopReason reason);
FlowMode flow_mode_from_string(const std::string& name);

struct DtPolicy {
    bool adaptive = true;
    double fixed_dt = 0.0; // used when !adaptive
    double cfl = 0.5;      // lambda_CFL in (0, 1/2]
};

struct FlowConfig {
    FlowMode mode = FlowMode::Ricci;
    std::optional<CutoffProfile> cutoff; // required for LocalRicci
    DtPolicy dt;
    double t_end = 0.0;
    std::size_t snapshot_stride = 1;
    double pinch_fraction = 1e-3;        // stop once psi_min < pinch_fraction * psi_min(0)
    std::optional<double> curvature_cap; // default 1e8 / psi_min(0)^2, applied to |chi^2 Rm|_inf
    double min_dt = 1e-16;

    void validate(const ProfileMetric& profile) const;
};

struct Snapshot {
    double t = 0.0;
    ProfileMetric profile;
};

/// Scalar monitors recorded after every accepted step (and at t = 0).
struct SeriesRow {
    double t = 0.0;
    double dt = 0.0;
    double psi_min = 0.0;
    double rm_max = 0.0;
    double chi2_rm_max = 0.0;
    double volume = 0.0;
    double energy = 0.0;  // int |Rm|^{d/2} dVol
    double energy2 = 0.0; // int chi^2 |Rm|^{d/2+1} dVol
};

struct Trajectory {
    FlowMode mode = FlowMode::Ricci;
    std::vector<double> chi; // cutoff used for the run; all ones for Ricci flow
    std::vector<Snapshot> snapshots;
    std::vector<SeriesRow> series;
    StopReason stop_reason = StopReason::ReachedTEnd;
    std::string message;
    bool neck_tracking = false; // psi_min follows the necks rather than the global interior minimum
    double psi_min0 = 0.0;
    double curvature_cap = 0.0;
    ProfileMetric background; // gauge background (the initial metric)
};

/// Time derivatives (d psi/dt, d phi/dt) of the warped-product metric under
/// dg/dt = -2 chi^2 Ric + L_{chi^2 W} g, where W is the DeTurck vector field
/// relative to `background` (W = g^{ij}(Gamma - Gamma~)). The Lie term only
/// reparametrizes x; it makes the system strictly parabolic, which the bare
/// fixed-x equations are not near the poles. W vanishes wherever g is a
/// constant multiple of the background, so the round sphere evolves exactly as
/// in the fixed-x gauge. An empty chi means chi = 1; nodes with chi = 0 get
/// zero rates exactly.
struct FlowRates {
    std::vector<double> psi_t;
    std::vector<double> phi_t;
};
FlowRates flow_rates(const ProfileMetric& profile, const Stencil& stencil, std::span<const double> chi,
                     const ProfileMetric& background);

/// x-component of the DeTurck vector field of `profile` relative to `background`.
std::vector<double> deturck_field(const ProfileMetric& profile, const Stencil& stencil, const ProfileMetric& background);

/// Largest stable step lambda_CFL * min (phi dx)^2 / (2 max(1, q)).
double cfl_limit(const ProfileMetric& profile, double cfl);

/// One classical RK4 step. Poles keep psi = 0. Throws StepRejected above the
/// CFL limit and NumericFailure when psi turns non-finite or non-positive.
/// The gauge background defaults to `profile` itself.
ProfileMetric step(const ProfileMetric& profile, std::span<const double> chi, double dt, double cfl = 0.5,
                   const ProfileMetric* background = nullptr);
/// Same, reusing a stencil built for the profile's grid.
ProfileMetric step(const ProfileMetric& profile, const Stencil& stencil, std::span<const double> chi, double dt,
                   double cfl, const ProfileMetric& background);

/// psi_min as tracked by run_flow: smallest neck radius when `necks` is set,
/// otherwise the smallest interior psi.
double tracked_psi_min(const ProfileMetric& profile, bool necks);

Trajectory run_flow(const ProfileMetric& initial, const FlowConfig& config);

struct ResidualReport {
    double max_residual_kn = 0.0;
    double max_residual_kt = 0.0;
    double max_residual = 0.0;
    double rate_scale = 0.0; // max |dK/dt| over the window, for relative reading
    double dt = 0.0;
    std::size_t snapshots_used = 0;
};

/// Compares centred time differences of K_N and K_T across consecutive
/// snapshots with their rates from the chain rule through d psi/dt and
/// d phi/dt (which carry the gradient and Hessian of chi^2). Needs at least
/// three snapshots with uniform spacing starting at `first`.
ResidualReport curvature_evolution_residual(const Trajectory& trajectory, std::size_t first, std::size_t count);

} // namespace rflab
