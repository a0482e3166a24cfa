#pragma once

#include "rflab/flow.hpp"
#include "rflab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace support {

inline rflab::ProfileMetric ak_dumbbell(int M)
{
    rflab::DumbbellShape sh;
    sh.G = 0.3;
    sh.c = 0.6;
    sh.kappa = 0.8;
    sh.cluster = 0.0;
    sh.M = M;
    return rflab::build_dumbbell(sh);
}

inline rflab::ProfileMetric band_dumbbell(double G, int M = 1600, double cluster = 0.9)
{
    rflab::DumbbellShape sh;
    sh.G = G;
    sh.c = 1.0;
    sh.kappa = 1.0;
    sh.M = M;
    sh.cluster = cluster;
    return rflab::build_dumbbell(sh);
}

/// psi = sin x (1 + 0.8 sin^2 x cos 4x) on [0, pi], phi = 1: two necks, three bumps.
inline rflab::ProfileMetric two_neck(int M)
{
    rflab::ProfileMetric p;
    p.q = 3;
    p.symmetric = true;
    for (int i = 0; i <= M; ++i) {
        const double x = M_PI * i / M;
        const double s = std::sin(x);
        p.x.push_back(x);
        p.phi.push_back(1.0);
        p.psi.push_back(i == 0 || i == M ? 0.0 : s * (1.0 + 0.8 * s * s * std::cos(4.0 * x)));
    }
    return p;
}

inline rflab::FlowConfig fixed_config(double dt, double t_end, std::size_t stride = 1)
{
    rflab::FlowConfig c;
    c.dt.adaptive = false;
    c.dt.fixed_dt = dt;
    c.t_end = t_end;
    c.snapshot_stride = stride;
    return c;
}

inline double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

} // namespace support
