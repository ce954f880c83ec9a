#pragma once

// Test-only oracles: central finite-difference stencils and helpers kept
// independent of the library's jet/Lie-derivative code paths.

#include <array>
#include <cmath>
#include <functional>

namespace oracles {

// 9-point central stencils; orders of accuracy 8, 8, 6, 6.
inline constexpr std::array<double, 9> kD1{1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0,
                                           4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
inline constexpr std::array<double, 9> kD2{-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
                                           8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};
inline constexpr std::array<double, 9> kD3{-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0.0,
                                           -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240};
inline constexpr std::array<double, 9> kD4{7.0 / 240, -2.0 / 5, 169.0 / 60, -122.0 / 15, 91.0 / 8,
                                           -122.0 / 15, 169.0 / 60, -2.0 / 5, 7.0 / 240};

/// k-th derivative of f at t0 from 9 samples spaced h.
inline double derivative(const std::function<double(double)>& f, double t0, int order, double h) {
    const std::array<double, 9>& c = order == 1   ? kD1
                                     : order == 2 ? kD2
                                     : order == 3 ? kD3
                                                  : kD4;
    double acc = 0.0;
    for (int i = -4; i <= 4; ++i) acc += c[i + 4] * f(t0 + i * h);
    return acc / std::pow(h, order);
}

/// Richardson-extrapolated first derivative (central, steps h and h/2).
inline double derivative_richardson(const std::function<double(double)>& f, double t0, double h) {
    const double d_h = (f(t0 + h) - f(t0 - h)) / (2.0 * h);
    const double d_h2 = (f(t0 + h / 2) - f(t0 - h / 2)) / h;
    return (4.0 * d_h2 - d_h) / 3.0;
}

} // namespace oracles
