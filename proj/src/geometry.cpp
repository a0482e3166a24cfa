#include "rflab/geometry.hpp"

#include "rflab/errors.hpp"
#include "rflab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rflab {

namespace {

constexpr double kPi = std::numbers::pi;

// Shoulder fraction of the cutoff ramp: the slope rises over [0, a], stays
// flat, and falls over [1 - a, 1].
constexpr double kRampShoulder = 1.0 / 3.0;

double smoothstep5_integral(double v)
{
    v = std::clamp(v, 0.0, 1.0);
    return v * v * v * v * (v * (v - 3.0) + 2.5);
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

std::string to_string(Topology topology)
{
    return topology == Topology::ClosedSphere ? "closed-sphere" : "periodic";
}

Topology topology_from_string(const std::string& name)
{
    if (name == "closed-sphere")
        return Topology::ClosedSphere;
    if (name == "periodic")
        return Topology::Periodic;
    throw ParameterError("unknown topology '" + name + "'");
}

void ProfileMetric::validate() const
{
    const std::size_t n = x.size();
    if (q < 2)
        throw InvariantError("profile: fiber dimension q must be >= 2, got " + std::to_string(q));
    if (n < 5)
        throw InvariantError("profile: need at least 5 grid nodes");
    if (phi.size() != n || psi.size() != n)
        throw InvariantError("profile: x, phi, psi sizes differ");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x[i] > x[i - 1]))
            throw InvariantError("profile: grid not strictly increasing at node " + std::to_string(i));
    for (std::size_t i = 0; i < n; ++i)
        if (!(phi[i] > 0.0) || !std::isfinite(phi[i]))
            throw InvariantError("profile: phi must be positive, node " + std::to_string(i));
    if (topology == Topology::Periodic) {
        if (!(period > x.back() - x.front()))
            throw InvariantError("profile: periodic period must exceed the node span");
        for (std::size_t i = 0; i < n; ++i)
            if (!(psi[i] > 0.0))
                throw InvariantError("profile: periodic psi must be positive, node " + std::to_string(i));
        return;
    }
    if (psi.front() != 0.0 || psi.back() != 0.0)
        throw InvariantError("profile: closed-sphere psi must vanish exactly at both poles");
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (!(psi[i] > 0.0) || !std::isfinite(psi[i]))
            throw InvariantError("profile: psi must be positive at interior node " + std::to_string(i));
    for (int pole = 0; pole < 2; ++pole) {
        const double slope = pole_closing_slope(*this, pole);
        if (std::abs(slope - 1.0) > 1e-3)
            throw InvariantError("profile: pole " + std::to_string(pole) + " closing slope " + fmt(slope) +
                                 " differs from 1");
    }
}

void CutoffProfile::validate(const ProfileMetric& profile) const
{
    if (chi.size() != profile.size())
        throw InvariantError("cutoff: size differs from profile grid");
    for (double v : chi)
        if (!(v >= 0.0 && v <= 1.0))
            throw InvariantError("cutoff: values must lie in [0, 1]");
    if (!(r_out > r_in))
        return; // constant cutoff
    const auto s = centered_arclength(profile);
    const double slope_cap = cutoff_ramp_max_slope() / (r_out - r_in) * (1.0 + 1e-9);
    for (std::size_t i = 0; i < chi.size(); ++i) {
        const double d = std::abs(s[i] - center);
        if (d <= r_in && chi[i] != 1.0)
            throw InvariantError("cutoff: chi must equal 1 inside r_in");
        if (d >= r_out && chi[i] != 0.0)
            throw InvariantError("cutoff: chi must vanish outside r_out");
        if (i > 0) {
            const double slope = std::abs(chi[i] - chi[i - 1]) / (s[i] - s[i - 1]);
            if (slope > slope_cap)
                throw InvariantError("cutoff: discrete slope exceeds the ramp bound");
        }
    }
}

std::size_t CoordinateMetricField::node_count() const
{
    std::size_t n = 1;
    for (const auto& a : axes)
        n *= a.size();
    return n;
}

std::vector<double> CoordinateMetricField::node(std::size_t index) const
{
    std::vector<double> p(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
        const std::size_t len = axes[k].size();
        p[k] = axes[k][index % len];
        index /= len;
    }
    return p;
}

Eigen::MatrixXd CoordinateMetricField::at(std::span<const double> point) const
{
    const std::size_t na = axes.size();
    if (point.size() != na)
        throw ParameterError("metric field: point dimension mismatch");
    std::vector<std::size_t> lo(na);
    std::vector<double> frac(na);
    for (std::size_t k = 0; k < na; ++k) {
        const auto& a = axes[k];
        if (a.size() == 1) {
            lo[k] = 0;
            frac[k] = 0.0;
            continue;
        }
        if (point[k] < a.front() - 1e-12 || point[k] > a.back() + 1e-12)
            throw ParameterError("metric field: point outside the coordinate box");
        auto it = std::upper_bound(a.begin(), a.end(), point[k]);
        std::size_t j = static_cast<std::size_t>(std::distance(a.begin(), it));
        j = std::clamp<std::size_t>(j, 1, a.size() - 1);
        lo[k] = j - 1;
        frac[k] = std::clamp((point[k] - a[j - 1]) / (a[j] - a[j - 1]), 0.0, 1.0);
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    const std::size_t corners = std::size_t{1} << na;
    for (std::size_t mask = 0; mask < corners; ++mask) {
        double w = 1.0;
        std::size_t flat = 0;
        bool valid = true;
        for (std::size_t k = 0; k < na; ++k) {
            const bool up = (mask >> k) & 1U;
            const std::size_t len = axes[k].size();
            std::size_t idx = lo[k] + (up ? 1 : 0);
            if (idx >= len) {
                valid = false;
                break;
            }
            w *= up ? frac[k] : 1.0 - frac[k];
            flat = flat * len + idx;
        }
        if (valid && w != 0.0)
            out += w * g[flat];
    }
    return out;
}

void CoordinateMetricField::validate() const
{
    if (dim < 1)
        throw InvariantError("metric field: dimension must be positive");
    if (g.size() != node_count())
        throw InvariantError("metric field: matrix count differs from node count");
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& m = g[i];
        if (m.rows() != dim || m.cols() != dim)
            throw InvariantError("metric field: matrix " + std::to_string(i) + " has wrong shape");
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw InvariantError("metric field: matrix " + std::to_string(i) + " is not symmetric");
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() != Eigen::Success)
            throw InvariantError("metric field: matrix " + std::to_string(i) + " is not positive definite");
    }
}

ProfileMetric build_round_sphere(double rho, int q, int M)
{
    if (!(rho > 0.0) || q < 2 || M < 16)
        throw ParameterError("build_round_sphere: need rho > 0, q >= 2, M >= 16");
    ProfileMetric p;
    p.q = q;
    p.topology = Topology::ClosedSphere;
    p.symmetric = true;
    const double half = 0.5 * kPi * rho;
    p.x.resize(M + 1);
    p.phi.assign(M + 1, 1.0);
    p.psi.resize(M + 1);
    for (int i = 0; i <= M; ++i) {
        // Mirror-exact construction: node M - i is the reflection of node i.
        const int j = std::min(i, M - i);
        const double dist = half * (2.0 * j) / M; // arclength from the nearest pole
        const double xs = -half + dist;
        p.x[i] = i <= M - i ? xs : -xs;
        p.psi[i] = rho * std::sin(dist / rho);
    }
    p.psi.front() = 0.0;
    p.psi.back() = 0.0;
    if (M % 2 == 0)
        p.x[M / 2] = 0.0;
    return p;
}

ProfileMetric build_cylinder(double rho, int q, double length, int M)
{
    if (!(rho > 0.0) || q < 2 || M < 16 || !(length > 0.0))
        throw ParameterError("build_cylinder: need rho > 0, q >= 2, length > 0, M >= 16");
    ProfileMetric p;
    p.q = q;
    p.topology = Topology::Periodic;
    p.symmetric = true;
    p.period = length;
    p.x.resize(M);
    p.phi.assign(M, 1.0);
    p.psi.assign(M, rho);
    for (int i = 0; i < M; ++i)
        p.x[i] = -0.5 * length + length * i / M;
    return p;
}

namespace {

struct DumbbellPieces {
    double G, c, kappa, w;
    double m, R, s_equator, L;

    double band(double s) const { return std::sqrt(G * G + kappa * s * s); }
    double band_d1(double s) const { return kappa * s / band(s); }
    // Sphere of radius R with its equator at s_equator; closes at s = L.
    double cap(double s) const { return R * std::sin((L - s) / R); }
    double cap_d1(double s) const { return -std::cos((L - s) / R); }

    double psi(double s) const
    {
        s = std::abs(s);
        if (s <= c)
            return band(s);
        if (s >= c + w)
            return cap(s);
        const double W = numerics::smoothstep5((s - c) / w);
        return (1.0 - W) * band(s) + W * cap(s);
    }

    double psi_d1(double s) const
    {
        const double sign = s < 0.0 ? -1.0 : 1.0;
        s = std::abs(s);
        double d;
        if (s <= c)
            d = band_d1(s);
        else if (s >= c + w)
            d = cap_d1(s);
        else {
            const double t = (s - c) / w;
            const double W = numerics::smoothstep5(t);
            const double dW = numerics::smoothstep5_deriv(t) / w;
            d = (1.0 - W) * band_d1(s) + W * cap_d1(s) + dW * (cap(s) - band(s));
        }
        return sign * d;
    }
};

} // namespace

ProfileMetric build_dumbbell(const DumbbellShape& shape)
{
    const double G = shape.G, c = shape.c;
    if (!(G > 0.0) || !(c > G))
        throw ParameterError("build_dumbbell: need 0 < G < c");
    if (shape.q < 2)
        throw ParameterError("build_dumbbell: q must be >= 2");
    if (!(shape.kappa > 0.0 && shape.kappa <= 1.0))
        throw ParameterError("build_dumbbell: kappa must lie in (0, 1]");
    if (shape.M < 16 || shape.M % 2 != 0)
        throw ParameterError("build_dumbbell: M must be even and >= 16");
    if (!(shape.cluster >= 0.0 && shape.cluster < 1.0))
        throw ParameterError("build_dumbbell: cluster must lie in [0, 1)");

    DumbbellPieces pc{};
    pc.G = G;
    pc.c = c;
    pc.kappa = shape.kappa;
    pc.w = shape.blend_width > 0.0 ? shape.blend_width : 0.5 * c;
    pc.m = pc.band_d1(c);
    const double one_minus_m2 = (G * G + shape.kappa * (1.0 - shape.kappa) * c * c) / (G * G + shape.kappa * c * c);
    pc.R = pc.band(c) / std::sqrt(one_minus_m2);
    pc.s_equator = c + pc.R * std::asin(pc.m);
    pc.L = pc.s_equator + 0.5 * kPi * pc.R;
    if (!(c + pc.w < pc.L))
        throw ConstructionError("build_dumbbell: blend region reaches the pole");

    // The blended profile must stay a graph with |psi_s| < 1 and psi > 0.
    constexpr int kProbe = 4000;
    for (int k = 0; k <= kProbe; ++k) {
        const double s = c + pc.w * k / kProbe;
        const double slope = pc.psi_d1(s);
        if (!(std::abs(slope) < 1.0) || !(pc.psi(s) > 0.0))
            throw ConstructionError("build_dumbbell: blend produces |psi_s| >= 1 or psi <= 0 near s = " + fmt(s));
    }

    // Grid: x in [-L, L], phi = 1 - eps cos(pi x / L), s(x) = x - eps L/pi sin(pi x / L).
    const int M = shape.M;
    const double L = pc.L;
    const double gamma = c / L;
    auto s_of_xi = [](double xi, double eps) { return xi - eps / kPi * std::sin(kPi * xi); };
    // Solve xi* for the requested clustering, then snap to a node and re-solve eps.
    double lo = gamma, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (s_of_xi(mid, shape.cluster) < gamma ? lo : hi) = mid;
    }
    const double xi_target = 0.5 * (lo + hi);
    auto node_xi = [M](int i) { return -1.0 + 2.0 * i / M; };
    int j = static_cast<int>(std::lround((xi_target + 1.0) * M / 2.0));
    double eps = -1.0;
    for (int attempt = 0; attempt < M; ++attempt) {
        j = std::clamp(j, M / 2 + 1, M - 1);
        const double xi = node_xi(j);
        const double cand = kPi * (xi - gamma) / std::sin(kPi * xi);
        if (cand >= 0.0 && cand < std::max(0.995, shape.cluster + 0.5 * (1.0 - shape.cluster))) {
            eps = cand;
            break;
        }
        j += cand < 0.0 ? 1 : -1;
    }
    if (eps < 0.0)
        throw ConstructionError("build_dumbbell: cannot place the band edge on a grid node");

    ProfileMetric p;
    p.q = shape.q;
    p.topology = Topology::ClosedSphere;
    p.symmetric = true;
    p.x.resize(M + 1);
    p.phi.resize(M + 1);
    p.psi.resize(M + 1);
    for (int i = M / 2; i <= M; ++i) {
        const double xi = node_xi(i);
        const double x = i == M / 2 ? 0.0 : L * xi;
        double s = i == j ? c : L * s_of_xi(xi, eps);
        if (i == M)
            s = L;
        const double ph = 1.0 - eps * std::cos(kPi * xi);
        const double ps = i == M ? 0.0 : pc.psi(s);
        p.x[i] = x;
        p.phi[i] = ph;
        p.psi[i] = ps;
        p.x[M - i] = -x;
        p.phi[M - i] = ph;
        p.psi[M - i] = ps;
    }
    p.validate();
    return p;
}

std::size_t dumbbell_band_edge_node(const ProfileMetric& profile, double c)
{
    const auto s = centered_arclength(profile);
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (std::abs(s[i] - c) < std::abs(s[best] - c))
            best = i;
    return best;
}

double cutoff_ramp(double t)
{
    constexpr double a = kRampShoulder;
    if (t <= 0.0)
        return 1.0;
    if (t >= 1.0)
        return 0.0;
    double integral;
    if (t <= a)
        integral = a * smoothstep5_integral(t / a);
    else if (t <= 1.0 - a)
        integral = 0.5 * a + (t - a);
    else
        integral = (1.0 - a) - a * smoothstep5_integral((1.0 - t) / a);
    return 1.0 - integral / (1.0 - a);
}

double cutoff_ramp_max_slope() { return 1.0 / (1.0 - kRampShoulder); }

CutoffProfile build_cutoff(const ProfileMetric& profile, double center, double r_in, double r_out)
{
    if (!(r_in > 0.0) || !(r_out > r_in))
        throw ParameterError("build_cutoff: need 0 < r_in < r_out");
    const auto s = centered_arclength(profile);
    const double tol = 1e-12 * (s.back() - s.front());
    if (center - r_out < s.front() - tol || center + r_out > s.back() + tol)
        throw ParameterError("build_cutoff: support exceeds the profile domain");
    CutoffProfile cut;
    cut.center = center;
    cut.r_in = r_in;
    cut.r_out = r_out;
    cut.chi.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double d = std::abs(s[i] - center);
        cut.chi[i] = cutoff_ramp((d - r_in) / (r_out - r_in));
    }
    return cut;
}

CutoffProfile unit_cutoff(const ProfileMetric& profile, double value)
{
    if (!(value >= 0.0 && value <= 1.0))
        throw ParameterError("unit_cutoff: value must lie in [0, 1]");
    CutoffProfile cut;
    cut.chi.assign(profile.size(), value);
    return cut;
}

std::vector<double> arclength(const ProfileMetric& profile)
{
    return numerics::cumulative_integral(profile.x, profile.phi);
}

std::vector<double> centered_arclength(const ProfileMetric& profile)
{
    auto s = arclength(profile);
    const double mid = 0.5 * s.back();
    for (double& v : s)
        v -= mid;
    if (profile.symmetric && s.size() % 2 == 1)
        s[s.size() / 2] = 0.0;
    return s;
}

double total_arclength(const ProfileMetric& profile)
{
    const auto s = arclength(profile);
    double total = s.back();
    if (profile.topology == Topology::Periodic) {
        const double h = profile.period - (profile.x.back() - profile.x.front());
        total += 0.5 * h * (profile.phi.back() + profile.phi.front());
    }
    return total;
}

CoordinateMetricField profile_coordinate_field(const ProfileMetric& profile)
{
    const std::size_t n = profile.size();
    const std::size_t first = profile.closed() ? 1 : 0;
    const std::size_t last = profile.closed() ? n - 1 : n;
    CoordinateMetricField f;
    f.dim = profile.dim();
    f.axes.resize(1);
    for (std::size_t i = first; i < last; ++i) {
        f.axes[0].push_back(profile.x[i]);
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(f.dim, f.dim) * (profile.psi[i] * profile.psi[i]);
        m(0, 0) = profile.phi[i] * profile.phi[i];
        f.g.push_back(std::move(m));
    }
    return f;
}

double pole_closing_slope(const ProfileMetric& profile, int pole)
{
    const std::size_t n = profile.size();
    const auto s = arclength(profile);
    const std::size_t p = pole == 0 ? 0 : n - 1;
    const std::size_t i1 = pole == 0 ? 1 : n - 2;
    const std::size_t i2 = pole == 0 ? 2 : n - 3;
    const double h1 = std::abs(s[i1] - s[p]), h2 = std::abs(s[i2] - s[p]);
    const double y1 = profile.psi[i1] - profile.psi[p], y2 = profile.psi[i2] - profile.psi[p];
    // psi ~ a h + b h^3 near the pole.
    const double a = (y1 * h2 * h2 * h2 - y2 * h1 * h1 * h1) / (h1 * h2 * (h2 * h2 - h1 * h1));
    return a;
}

} // namespace rflab
