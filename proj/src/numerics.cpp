#include "rflab/numerics.hpp"

#include "rflab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace rflab::numerics {

std::vector<std::vector<double>> fd_weights(double z, std::span<const double> nodes, int max_order)
{
    const int n = static_cast<int>(nodes.size());
    std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, max_order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

std::vector<double> cumulative_integral(std::span<const double> x, std::span<const double> f)
{
    const std::size_t n = x.size();
    if (n != f.size())
        throw ParameterError("cumulative_integral: size mismatch");
    std::vector<double> out(n, 0.0);
    if (n < 2)
        return out;
    if (n < 4) {
        for (std::size_t i = 1; i < n; ++i)
            out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
        return out;
    }
    // 3-point Gauss-Legendre integrates the local cubic exactly.
    static constexpr std::array<double, 3> gl_t{-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr std::array<double, 3> gl_w{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t start = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(i) - 1, 0,
                                                             static_cast<std::ptrdiff_t>(n) - 4);
        const std::span<const double> xs = x.subspan(start, 4);
        const double a = x[i], b = x[i + 1];
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double cell = 0.0;
        for (int g = 0; g < 3; ++g) {
            const double z = mid + half * gl_t[g];
            double val = 0.0;
            for (int k = 0; k < 4; ++k) {
                double basis = 1.0;
                for (int j = 0; j < 4; ++j)
                    if (j != k)
                        basis *= (z - xs[j]) / (xs[k] - xs[j]);
                val += basis * f[start + k];
            }
            cell += gl_w[g] * val;
        }
        out[i + 1] = out[i] + half * cell;
    }
    return out;
}

double trapezoid(std::span<const double> x, std::span<const double> f)
{
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        sum += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
    return sum;
}

double smoothstep5(double t)
{
    if (t <= 0.0)
        return 0.0;
    if (t >= 1.0)
        return 1.0;
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double smoothstep5_deriv(double t)
{
    if (t <= 0.0 || t >= 1.0)
        return 0.0;
    return 30.0 * t * t * (t - 1.0) * (t - 1.0);
}

double smoothstep5_deriv2(double t)
{
    if (t <= 0.0 || t >= 1.0)
        return 0.0;
    return 60.0 * t * (t - 1.0) * (2.0 * t - 1.0);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw ParameterError("fit_line: need at least two paired samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0)
        throw ParameterError("fit_line: abscissae are all equal");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

double observed_order(double coarse_error, double fine_error)
{
    return std::log2(coarse_error / fine_error);
}

} // namespace rflab::numerics
