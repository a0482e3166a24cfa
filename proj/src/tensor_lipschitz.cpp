#include "rflab/tensor_lipschitz.hpp"

#include "rflab/errors.hpp"
#include "rflab/norms.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rflab {

namespace {

void require_spd(const Eigen::MatrixXd& m, const char* what)
{
    if (m.rows() != m.cols())
        throw ParameterError(std::string(what) + ": matrix is not square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvariantError(std::string(what) + ": matrix is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw InvariantError(std::string(what) + ": matrix is not positive definite");
}

void require_same_grid(const CoordinateMetricField& a, const CoordinateMetricField& b)
{
    if (a.dim != b.dim || a.axes != b.axes)
        throw ParameterError("tl_distance: fields live on different grids");
}

double factorial(int m)
{
    double f = 1.0;
    for (int k = 2; k <= m; ++k)
        f *= k;
    return f;
}

} // namespace

Eigen::VectorXd pencil_eigenvalues(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2)
{
    if (g1.rows() != g2.rows() || g1.cols() != g2.cols())
        throw ParameterError("pencil_eigenvalues: shape mismatch");
    require_spd(g1, "pencil_eigenvalues");
    Eigen::LLT<Eigen::MatrixXd> llt(g2);
    if (llt.info() != Eigen::Success)
        throw InvariantError("pencil_eigenvalues: second matrix is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd c = L.triangularView<Eigen::Lower>().solve(g1);
    c = L.triangularView<Eigen::Lower>().solve(c.transpose()).transpose();
    c = 0.5 * (c + c.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double tl_distance_at(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2)
{
    const Eigen::VectorXd ev = pencil_eigenvalues(g1, g2);
    return std::max(std::abs(std::log(ev(0))), std::abs(std::log(ev(ev.size() - 1))));
}

double tl_distance(const CoordinateMetricField& g1, const CoordinateMetricField& g2)
{
    require_same_grid(g1, g2);
    g1.validate();
    g2.validate();
    double d = 0.0;
    for (std::size_t i = 0; i < g1.g.size(); ++i)
        d = std::max(d, tl_distance_at(g1.g[i], g2.g[i]));
    return d;
}

ClosenessReport matrix_closeness(const Eigen::MatrixXd& g)
{
    if (g.rows() != g.cols() || g.rows() < 1)
        throw ParameterError("matrix_closeness: matrix is not square");
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ParameterError("matrix_closeness: matrix is not symmetric");
    require_spd(g, "matrix_closeness");

    const Eigen::Index n = g.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    ClosenessReport r;
    r.eigenvalues = es.eigenvalues();
    r.eigen_deviation = (r.eigenvalues.array() - 1.0).abs().maxCoeff();
    r.frobenius_deviation = (g - Eigen::MatrixXd::Identity(n, n)).norm();
    const double det = g.determinant();
    r.det_deviation = std::abs(det - 1.0);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::MatrixXd minor(n - 1, n - 1);
        for (Eigen::Index a = 0, ra = 0; a < n; ++a) {
            if (a == j)
                continue;
            for (Eigen::Index b = 0, rb = 0; b < n; ++b) {
                if (b == j)
                    continue;
                minor(ra, rb++) = g(a, b);
            }
            ++ra;
        }
        const double md = n == 1 ? 1.0 : minor.determinant();
        r.codim1_det_deviation = std::max(r.codim1_det_deviation, std::abs(md - 1.0));
    }
    r.bridge_bound = static_cast<double>(n) * std::sqrt(static_cast<double>(n)) * r.eigen_deviation;
    r.bridge_holds = r.frobenius_deviation <= r.bridge_bound * (1.0 + 1e-12) + 1e-15;

    // Restrict g to the hyperplane orthogonal to each eigenvector through a
    // Householder basis, independent of the remaining eigenvectors.
    r.reconstructed.resize(n);
    const Eigen::MatrixXd& vecs = es.eigenvectors();
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd v = vecs.col(j).normalized();
        if (v(0) > 0.0)
            v = -v;
        Eigen::VectorXd u = v - Eigen::VectorXd::Unit(n, 0);
        Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
        if (u.norm() > 0.0) {
            u.normalize();
            h -= 2.0 * u * u.transpose();
        }
        const Eigen::MatrixXd b = h.transpose() * g * h;
        const double hyper = n == 1 ? 1.0 : b.bottomRightCorner(n - 1, n - 1).determinant();
        r.reconstructed(j) = det / hyper;
    }
    r.reconstruction_error = (r.reconstructed - r.eigenvalues).cwiseAbs().maxCoeff();
    return r;
}

void SimplexMesh::validate(int ambient_dim) const
{
    if (m < 1 || m > ambient_dim)
        throw ParameterError("simplex mesh: dimension must lie in [1, ambient dimension]");
    for (const auto& v : vertices)
        if (static_cast<int>(v.size()) != ambient_dim)
            throw ParameterError("simplex mesh: vertex dimension mismatch");
    for (const auto& e : elements) {
        if (static_cast<int>(e.size()) != m + 1)
            throw ParameterError("simplex mesh: element must have m + 1 vertices");
        for (std::size_t idx : e)
            if (idx >= vertices.size())
                throw ParameterError("simplex mesh: vertex index out of range");
    }
}

double mesh_volume(const CoordinateMetricField& g, const SimplexMesh& mesh)
{
    mesh.validate(static_cast<int>(g.axes.size()));
    if (g.dim != static_cast<int>(g.axes.size()))
        throw ParameterError("mesh_volume: field dimension differs from the coordinate dimension");
    const int dim = g.dim;
    const double norm = factorial(mesh.m);
    double total = 0.0;
    for (const auto& el : mesh.elements) {
        const auto& v0 = mesh.vertices[el[0]];
        Eigen::MatrixXd e(dim, mesh.m);
        std::vector<double> centroid(v0);
        for (int k = 1; k <= mesh.m; ++k) {
            const auto& vk = mesh.vertices[el[k]];
            for (int a = 0; a < dim; ++a) {
                e(a, k - 1) = vk[a] - v0[a];
                centroid[a] += vk[a];
            }
        }
        for (double& c : centroid)
            c /= mesh.m + 1;
        const Eigen::MatrixXd flat = e.transpose() * e;
        if (!(flat.determinant() > 1e-300))
            throw ParameterError("mesh_volume: degenerate element");
        const double gram = (e.transpose() * g.at(centroid) * e).determinant();
        if (!(gram > 0.0))
            throw ParameterError("mesh_volume: degenerate element");
        total += std::sqrt(gram) / norm;
    }
    return total;
}

VolumeRatioReport volume_ratio_check(const CoordinateMetricField& g1, const CoordinateMetricField& g2,
                                     const SimplexMesh& mesh, double delta)
{
    require_same_grid(g1, g2);
    if (!(delta >= 0.0))
        throw ParameterError("volume_ratio_check: delta must be >= 0");
    VolumeRatioReport r;
    r.delta = delta;
    r.volume1 = mesh_volume(g1, mesh);
    r.volume2 = mesh_volume(g2, mesh);
    r.ratio = r.volume1 / r.volume2;
    const double half = 0.5 * mesh.m * delta;
    r.bound = std::exp(half);
    const double lr = std::abs(std::log(r.ratio));
    r.margin = half - lr;
    r.pass = lr <= half + 1e-12 * std::max(1.0, half);
    r.strict = lr < half;
    return r;
}

VolumeRatioReport volume_ratio_check(const CoordinateMetricField& g1, const CoordinateMetricField& g2,
                                     const SimplexMesh& mesh)
{
    return volume_ratio_check(g1, g2, mesh, tl_distance(g1, g2));
}

IsoRatioReport iso_ratio_check(const ProfileMetric& p1, const ProfileMetric& p2, std::size_t base_node,
                               std::span<const std::size_t> end_nodes)
{
    if (p1.size() != p2.size() || p1.x != p2.x || p1.q != p2.q || p1.topology != p2.topology)
        throw ParameterError("iso_ratio_check: profiles live on different grids");
    if (base_node >= p1.size())
        throw ParameterError("iso_ratio_check: base node out of range");
    IsoRatioReport r;
    r.delta = tl_distance(profile_coordinate_field(p1), profile_coordinate_field(p2));
    r.bound = (p1.dim() - 1) * r.delta;
    const auto s1 = centered_arclength(p1);
    const auto s2 = centered_arclength(p2);
    std::vector<double> b1, b2;
    for (std::size_t j : end_nodes) {
        if (j >= p1.size() || j <= base_node)
            throw ParameterError("iso_ratio_check: slab end must lie after the base node");
        b1.push_back(s1[j]);
        b2.push_back(s2[j]);
        r.x_b.push_back(p1.x[j]);
    }
    const auto q1 = iso_quotient_scan(p1, b1, s1[base_node]);
    const auto q2 = iso_quotient_scan(p2, b2, s2[base_node]);
    for (std::size_t k = 0; k < b1.size(); ++k) {
        const double lr = std::log(q1.quotient[k] / q2.quotient[k]);
        r.log_ratio.push_back(lr);
        r.max_abs_log_ratio = std::max(r.max_abs_log_ratio, std::abs(lr));
    }
    r.pass = r.max_abs_log_ratio <= r.bound + 1e-12 * std::max(1.0, r.bound);
    return r;
}

double uniform_tl_bound(double eps, double lambda_min)
{
    if (!(eps >= 0.0) || !(lambda_min > 0.0))
        throw ParameterError("uniform_tl_bound: need eps >= 0 and lambda_min > 0");
    return std::log1p(eps / lambda_min);
}

} // namespace rflab
