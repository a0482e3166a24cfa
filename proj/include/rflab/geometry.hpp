#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rflab {

enum class Topology { ClosedSphere, Periodic };

std::string to_string(Topology topology);
Topology topology_from_string(const std::string& name);

/// Rotationally symmetric metric g = phi(x)^2 dx^2 + psi(x)^2 g_{S^q} sampled
/// on a fixed coordinate grid. Arclength is ds = phi dx.
///
/// ClosedSphere profiles have psi = 0 at both end nodes (the poles).
/// Periodic profiles describe a cylinder: the node after x.back() is x.front()
/// shifted by `period`.
struct ProfileMetric {
    int q = 3;
    std::vector<double> x;
    std::vector<double> phi;
    std::vector<double> psi;
    Topology topology = Topology::ClosedSphere;
    bool symmetric = false;
    double period = 0.0;

    std::size_t size() const { return x.size(); }
    int dim() const { return q + 1; }
    bool closed() const { return topology == Topology::ClosedSphere; }

    /// Throws InvariantError describing the first violated invariant.
    void validate() const;
};

/// Cutoff function of Local Ricci Flow, sampled on a profile's grid.
/// Support is described in centred arclength about `center`.
struct CutoffProfile {
    std::vector<double> chi;
    double center = 0.0;
    double r_in = 0.0;
    double r_out = 0.0;

    void validate(const ProfileMetric& profile) const;
};

/// Field of symmetric positive-definite matrices on a tensor-product grid.
/// Nodes are stored row-major over `axes` (last axis fastest).
struct CoordinateMetricField {
    int dim = 0;
    std::vector<std::vector<double>> axes;
    std::vector<Eigen::MatrixXd> g;

    std::size_t node_count() const;
    std::vector<double> node(std::size_t index) const;
    /// Multilinear interpolation of the matrix field at a point inside the box.
    Eigen::MatrixXd at(std::span<const double> point) const;
    void validate() const;
};

// --- builders -------------------------------------------------------------

/// Round sphere of radius rho: psi(s) = rho cos(s / rho), s in [-pi rho/2, pi rho/2],
/// in the identity gauge (x = s, phi = 1). M is the number of grid intervals.
ProfileMetric build_round_sphere(double rho, int q, int M);

/// Cylinder psi = rho on a periodic coordinate interval of the given length.
ProfileMetric build_cylinder(double rho, int q, double length, int M);

/// Shape of the dumbbell used for the neck-pinch experiments.
///
/// The neck band |s| <= c carries psi = sqrt(G^2 + kappa s^2) (kappa = 1 is the
/// hyperbola of the Angenent-Knopf example). Past the band the profile blends,
/// over `blend_width`, into the round sphere tangent to the band at s = c; that
/// sphere forms the bump and closes at the pole with |psi_s| = 1.
///
/// The grid uses phi(x) = 1 - cluster cos(pi x / L) on x in [-L, L], which
/// concentrates nodes at the neck. `cluster` is a target; it is adjusted so
/// that s = +-c falls exactly on grid nodes.
struct DumbbellShape {
    double G = 0.2;
    double c = 1.0;
    int q = 3;
    double kappa = 1.0;
    double blend_width = -1.0; // <= 0 selects c / 2
    int M = 800;               // grid intervals, must be even
    double cluster = 0.9;
};

ProfileMetric build_dumbbell(const DumbbellShape& shape);

/// Node index carrying s = +c (and M - index carries -c) for a dumbbell built from `shape`.
std::size_t dumbbell_band_edge_node(const ProfileMetric& profile, double c);

CutoffProfile build_cutoff(const ProfileMetric& profile, double center, double r_in, double r_out);
CutoffProfile unit_cutoff(const ProfileMetric& profile, double value);

/// Transition profile used by build_cutoff: 1 at t <= 0, 0 at t >= 1.
double cutoff_ramp(double t);
/// Largest |d ramp / dt|; the arclength slope bound is this over (r_out - r_in).
double cutoff_ramp_max_slope();

// --- arclength ------------------------------------------------------------

/// Cumulative arclength s(x) = int phi dx with s(x0) = 0.
std::vector<double> arclength(const ProfileMetric& profile);
/// Arclength shifted so that the midpoint of the profile's extent is 0.
std::vector<double> centered_arclength(const ProfileMetric& profile);
double total_arclength(const ProfileMetric& profile);

/// diag(phi^2, psi^2, ..., psi^2) on the interior nodes: the profile metric in
/// coordinates (x, orthonormal sphere directions). Dimension q + 1.
CoordinateMetricField profile_coordinate_field(const ProfileMetric& profile);

/// Closing slope |psi_s| at the given pole (0 = left, 1 = right) from an odd
/// cubic fit through the two nearest interior nodes.
double pole_closing_slope(const ProfileMetric& profile, int pole);

} // namespace rflab
