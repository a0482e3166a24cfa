#pragma once

#include "rflab/flow.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rflab {

struct HypothesisItem {
    bool pass = false;
    bool applicable = true;
    double measured = 0.0;
    double bound = 0.0;
    double margin = 0.0; // signed slack; >= 0 when pass
};

/// The four neck-pinch hypotheses on a reflection-symmetric dumbbell:
/// K_T > 0 (|psi_s| < 1), R > 0, |a| <= mu, r_max^2 / r_min^2 >= (2 mu + 2q)/(q - 1).
struct AkReport {
    int q = 0;
    double mu = 0.0;
    HypothesisItem tangential; // measured: min K_T / |Rm|
    HypothesisItem scalar;     // measured: min R / |Rm|, bound 1e-4
    HypothesisItem pinching;   // measured: max |a|, bound mu
    HypothesisItem ratio;      // measured: r_max^2 / r_min^2
    std::size_t necks = 0;
    std::size_t bumps = 0;
    bool all_pass() const { return tangential.pass && scalar.pass && pinching.pass && ratio.pass; }
};

double ak_ratio_threshold(double mu, int q);
AkReport ak_hypotheses(const ProfileMetric& profile, double mu);

struct PinchReport {
    bool pinched = false;
    bool has_neck = false;
    double singular_time = 0.0; // first trigger time of the pinch criterion
    double resolution = 0.0;    // last accepted dt before the trigger
    double r_min0 = 0.0;
    double threshold = 0.0;      // r_min(0)^2 / (q - 1)
    double weak_threshold = 0.0; // r_min(0)
    bool assertion_checked = false; // pinched, a neck was tracked, and the hypotheses held at t = 0
    bool below_threshold = false;
    bool below_weak_threshold = false;
    double volume_at_stop = 0.0;
    AkReport hypotheses;
    std::vector<double> t;
    std::vector<double> r_min;
    std::string caveat;
};

PinchReport pinch_monitor(const Trajectory& trajectory, double mu = 2.0);

struct PerelmanSample {
    double t = 0.0;
    double curvature_margin = 0.0; // max |Rm| / (alpha / t + (eps r)^{-2}) near s0
    double volume_ratio = 0.0;     // min Vol(band(x, sqrt t)) / t^{d/2} near s0
};

struct PerelmanReport {
    double alpha = 1.0;
    double eps_r = 1.0;
    double s0 = 0.0;
    std::vector<PerelmanSample> samples;
    double max_curvature_margin = 0.0;
    double min_volume_ratio = 0.0;
};

/// Pseudolocality conclusion shape tracked over snapshots with t > 0, for
/// nodes within arclength eps_r of s0 (centred arclength of each snapshot).
PerelmanReport perelman_monitor(const Trajectory& trajectory, double alpha, double eps_r, double s0);

struct GronwallReport {
    bool holds = false;
    std::vector<double> envelope;
    double max_excess = 0.0; // max (f - envelope) / max(1, |envelope|)
    std::optional<std::size_t> first_violation;
};

/// Checks f(t) <= [f(0) + int_0^t e^{-bs} g(s) ds] e^{bt} on uniform samples,
/// with relative tolerance 1e-9.
GronwallReport gronwall_envelope(std::span<const double> t, std::span<const double> f, std::span<const double> g,
                                 double b);

struct IntegroFit {
    double a = 0.0, b = 0.0, y0 = 0.0;
    double k = 0.0;
    double w = 0.0;
    double min_comparison = 0.0; // min over [0, T] of (w e^{kt})' - a int w e^{ks} - b w e^{kt} - 1
    bool comparison_holds = false;
    bool dominates = false; // numeric solution of y' = a int y + b y + 1 stays below w e^{kt}
    double max_ratio = 0.0; // max y / (w e^{kt})
};

/// k = b + sqrt(a) + 1, w = max(y0 + 1, 1 / (k - b - a/k)), verified on [0, T].
IntegroFit integro_gronwall_fit(double a, double b, double y0, double T, std::size_t steps = 4000);

struct EnergyReport {
    std::vector<double> t;
    std::vector<double> energy;  // int |Rm|^{d/2}
    std::vector<double> energy2; // int chi^2 |Rm|^{d/2+1}
    double grad_chi_inf = 0.0;
    double growth_rate = 0.0; // fitted slope of log E(t)
    double growth_constant = 100.0;
    bool growth_within = false; // growth_rate <= growth_constant * |grad chi|^2_inf
    std::optional<double> e2_exponent; // log-log slope of t E2 against (t |grad chi|^2 + 1)^2
    double A0 = 0.0;
    double rm_norm0 = 0.0; // |Rm|_{d/2} at t = 0
    double gate = 0.0;     // 2 / (d^2 A0^2)
    bool gate_holds = false;
};

EnergyReport lrf_energy_monitor(const Trajectory& trajectory, double A0, double growth_constant = 100.0);

struct ExtensionSample {
    double t = 0.0;
    double chi2_rm_inf = 0.0;
    double grad_chi2_rm_p4 = 0.0;
    double grad_chi2_rm_p8 = 0.0;
    double hess_chi_p4 = 0.0;
    double hess_chi_p8 = 0.0;
};

struct ExtensionReport {
    std::vector<ExtensionSample> samples;       // one per snapshot
    std::vector<double> series_t;               // every recorded step
    std::vector<double> series_chi2_rm_inf;
    std::vector<double> running_sup;
    double sup_chi2_rm_inf = 0.0;
    double sup_rm_inf = 0.0;
};

/// |nabla(chi^2 Rm)|^2 per node of a profile.
std::vector<double> grad_chi2_rm_squared(const ProfileMetric& profile, std::span<const double> chi);
/// |nabla^2 chi|^2 per node of a profile.
std::vector<double> hess_chi_squared(const ProfileMetric& profile, std::span<const double> chi);
/// sup over nodes of |d chi / ds|.
double grad_inf(const ProfileMetric& profile, std::span<const double> chi);

ExtensionReport extension_tracker(const Trajectory& trajectory);

} // namespace rflab
