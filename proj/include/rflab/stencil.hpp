#pragma once

#include "rflab/geometry.hpp"

#include <array>
#include <span>
#include <vector>

namespace rflab {

/// Behaviour of a field under reflection through a pole. psi is odd, phi and
/// the curvature fields are even.
enum class Parity { Even, Odd };

/// Precomputed finite-difference weights in the coordinate x for a profile grid.
/// Closed profiles extend fields across the poles by reflection; periodic
/// profiles wrap around.
class Stencil {
public:
    explicit Stencil(const ProfileMetric& profile);

    std::size_t size() const { return nodes_.size(); }

    /// d/dx, fourth order (five points).
    std::vector<double> d1(std::span<const double> f, Parity parity) const;
    /// d/dx, second order (three points).
    std::vector<double> d1_low(std::span<const double> f, Parity parity) const;
    /// d^2/dx^2, second order (three points).
    std::vector<double> d2(std::span<const double> f, Parity parity) const;

private:
    struct Node {
        std::array<std::size_t, 5> idx{};
        std::array<bool, 5> mirrored{};
        std::array<double, 5> w1{};
        std::array<double, 3> w1_low{};
        std::array<double, 3> w2{};
    };
    std::vector<Node> nodes_;
};

} // namespace rflab
