#include "rflab/stencil.hpp"

#include "rflab/errors.hpp"
#include "rflab/numerics.hpp"

namespace rflab {

Stencil::Stencil(const ProfileMetric& profile)
{
    const auto& x = profile.x;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    if (n < 5)
        throw ParameterError("stencil: need at least 5 nodes");
    nodes_.resize(static_cast<std::size_t>(n));
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        Node& node = nodes_[static_cast<std::size_t>(i)];
        std::array<double, 5> pos{};
        for (int k = 0; k < 5; ++k) {
            std::ptrdiff_t j = i + k - 2;
            double xj;
            bool mirrored = false;
            if (profile.closed()) {
                if (j < 0) {
                    j = -j;
                    xj = 2.0 * x.front() - x[static_cast<std::size_t>(j)];
                    mirrored = true;
                } else if (j >= n) {
                    j = 2 * (n - 1) - j;
                    xj = 2.0 * x.back() - x[static_cast<std::size_t>(j)];
                    mirrored = true;
                } else {
                    xj = x[static_cast<std::size_t>(j)];
                }
            } else {
                double shift = 0.0;
                if (j < 0) {
                    j += n;
                    shift = -profile.period;
                } else if (j >= n) {
                    j -= n;
                    shift = profile.period;
                }
                xj = x[static_cast<std::size_t>(j)] + shift;
            }
            node.idx[k] = static_cast<std::size_t>(j);
            node.mirrored[k] = mirrored;
            pos[k] = xj;
        }
        const auto w5 = numerics::fd_weights(x[static_cast<std::size_t>(i)], pos, 1);
        const auto w3 = numerics::fd_weights(x[static_cast<std::size_t>(i)], std::span<const double>(pos).subspan(1, 3), 2);
        for (int k = 0; k < 5; ++k)
            node.w1[k] = w5[1][k];
        for (int k = 0; k < 3; ++k) {
            node.w1_low[k] = w3[1][k];
            node.w2[k] = w3[2][k];
        }
    }
}

std::vector<double> Stencil::d1(std::span<const double> f, Parity parity) const
{
    std::vector<double> out(nodes_.size());
    const double ghost_sign = parity == Parity::Odd ? -1.0 : 1.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& nd = nodes_[i];
        double acc = 0.0;
        for (int k = 0; k < 5; ++k)
            acc += nd.w1[k] * (nd.mirrored[k] ? ghost_sign : 1.0) * f[nd.idx[k]];
        out[i] = acc;
    }
    return out;
}

std::vector<double> Stencil::d1_low(std::span<const double> f, Parity parity) const
{
    std::vector<double> out(nodes_.size());
    const double ghost_sign = parity == Parity::Odd ? -1.0 : 1.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& nd = nodes_[i];
        double acc = 0.0;
        for (int k = 0; k < 3; ++k)
            acc += nd.w1_low[k] * (nd.mirrored[k + 1] ? ghost_sign : 1.0) * f[nd.idx[k + 1]];
        out[i] = acc;
    }
    return out;
}

std::vector<double> Stencil::d2(std::span<const double> f, Parity parity) const
{
    std::vector<double> out(nodes_.size());
    const double ghost_sign = parity == Parity::Odd ? -1.0 : 1.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& nd = nodes_[i];
        double acc = 0.0;
        for (int k = 0; k < 3; ++k)
            acc += nd.w2[k] * (nd.mirrored[k + 1] ? ghost_sign : 1.0) * f[nd.idx[k + 1]];
        out[i] = acc;
    }
    return out;
}

} // namespace rflab
