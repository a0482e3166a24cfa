#pragma once

#include "rflab/geometry.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace rflab {

/// Generalized eigenvalues of the pencil (g1, g2), ascending: the extreme
/// values of g1(V, V) / g2(V, V) over directions V.
Eigen::VectorXd pencil_eigenvalues(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2);

/// max |log lambda| over the pencil eigenvalues at one point.
double tl_distance_at(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2);

/// Tensor Lipschitz distance: sup over grid nodes and directions of
/// |log g1(V, V) / g2(V, V)|.
double tl_distance(const CoordinateMetricField& g1, const CoordinateMetricField& g2);

struct ClosenessReport {
    double eigen_deviation = 0.0;     // max |lambda_i - 1|
    double frobenius_deviation = 0.0; // |g - I|_F
    double det_deviation = 0.0;       // |det g - 1|
    double codim1_det_deviation = 0.0; // max_j |det g_(j) - 1|, g_(j) = g without row and column j
    double bridge_bound = 0.0;        // n sqrt(n) max |lambda_i - 1|
    bool bridge_holds = false;        // frobenius_deviation <= bridge_bound
    Eigen::VectorXd eigenvalues;      // ascending
    Eigen::VectorXd reconstructed;    // det g / det(g on the hyperplane orthogonal to the j-th eigenvector)
    double reconstruction_error = 0.0; // max |reconstructed_j - lambda_j|
};

ClosenessReport matrix_closeness(const Eigen::MatrixXd& g);

/// Piecewise-linear simplicial mesh of dimension m embedded in the coordinate box.
struct SimplexMesh {
    int m = 1;
    std::vector<std::vector<double>> vertices;
    std::vector<std::vector<std::size_t>> elements; // m + 1 vertex indices each

    void validate(int ambient_dim) const;
};

struct VolumeRatioReport {
    double volume1 = 0.0;
    double volume2 = 0.0;
    double ratio = 0.0;  // volume1 / volume2
    double delta = 0.0;  // TL distance used for the bound
    double bound = 0.0;  // exp(m delta / 2)
    double margin = 0.0; // m delta / 2 - |log ratio|
    bool pass = false;   // exp(-m delta/2) <= ratio <= exp(m delta/2), rounding slack 1e-12
    bool strict = false; // both inequalities strict
};

/// Riemannian m-volume of a mesh: element volumes sqrt(det(E^T g(mid) E)) / m!
/// with g evaluated at the element centroid.
double mesh_volume(const CoordinateMetricField& g, const SimplexMesh& mesh);

VolumeRatioReport volume_ratio_check(const CoordinateMetricField& g1, const CoordinateMetricField& g2,
                                     const SimplexMesh& mesh, double delta);
/// Same, with delta measured as tl_distance(g1, g2).
VolumeRatioReport volume_ratio_check(const CoordinateMetricField& g1, const CoordinateMetricField& g2,
                                     const SimplexMesh& mesh);

struct IsoRatioReport {
    double delta = 0.0;              // TL distance of the coordinate fields
    double bound = 0.0;              // (d - 1) delta
    std::vector<double> x_b;         // slab ends in the shared coordinate
    std::vector<double> log_ratio;   // log Q1(b) / Q2(b)
    double max_abs_log_ratio = 0.0;
    bool pass = false;
};

/// Compares level-set isoperimetric quotients of two profile metrics on the
/// same grid. The slabs are fixed in the coordinate x, {x[base] <= x <= x[j]}
/// for each listed node j, so both metrics measure the same sets.
IsoRatioReport iso_ratio_check(const ProfileMetric& p1, const ProfileMetric& p2, std::size_t base_node,
                               std::span<const std::size_t> end_nodes);

/// Quantitative uniform-to-TL bound: if |g - h| <= eps (operator norm) and
/// both g and h have eigenvalues >= lambda_min, then d_TL(g, h) <= log(1 + eps / lambda_min).
double uniform_tl_bound(double eps, double lambda_min);

} // namespace rflab
