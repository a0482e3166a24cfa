#pragma once

#include <span>
#include <vector>

namespace rflab::numerics {

/// Finite-difference weights (Fornberg) for derivatives 0..max_order at z
/// using the given nodes. Result is indexed [order][node].
std::vector<std::vector<double>> fd_weights(double z, std::span<const double> nodes, int max_order);

/// Cumulative integral of sampled f over a strictly increasing grid, F[0] = 0.
/// Each cell integrates the cubic through four neighbouring nodes (one-sided
/// at the ends), so the result is fourth-order accurate.
std::vector<double> cumulative_integral(std::span<const double> x, std::span<const double> f);

/// Composite trapezoid rule.
double trapezoid(std::span<const double> x, std::span<const double> f);

/// 6t^5 - 15t^4 + 10t^3 clamped to [0, 1].
double smoothstep5(double t);
double smoothstep5_deriv(double t);
double smoothstep5_deriv2(double t);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y ~ slope * x + intercept. Needs at least two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// log2(coarse / fine): observed order for a halving refinement.
double observed_order(double coarse_error, double fine_error);

} // namespace rflab::numerics
