// Gauss-Legendre building blocks shared by the pricing integral and the
// Kendall-tau integration.

#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace copex {

// 16-point Gauss-Legendre rule on [-1,1], positive half (nodes symmetric).
inline constexpr double gl16_nodes[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                         0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                         0.9445750230732326, 0.9894009349916499};
inline constexpr double gl16_weights[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                           0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                           0.0622535239386479, 0.0271524594117541};

/// Integral of f over [a,b] by the 16-point rule.
template <class F>
double gauss_legendre_16(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = half * gl16_nodes[i];
        sum += gl16_weights[i] * (f(mid - dx) + f(mid + dx));
    }
    return sum * half;
}

/// Composite rule over consecutive panels given by breakpoints.
template <class F>
double integrate_panels(F&& f, std::span<const double> breakpoints) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        total += gauss_legendre_16(f, breakpoints[i], breakpoints[i + 1]);
    return total;
}

/// Uniform k-panel tensor rule for g(u,v) on the unit square.
template <class G>
double integrate_unit_square(G&& g, int panels_per_axis) {
    const double h = 1.0 / panels_per_axis;
    // Precompute the 1-d nodes/weights of the composite rule.
    std::vector<double> nodes, weights;
    nodes.reserve(16 * panels_per_axis);
    weights.reserve(16 * panels_per_axis);
    for (int p = 0; p < panels_per_axis; ++p) {
        const double mid = (p + 0.5) * h;
        for (int i = 7; i >= 0; --i) {
            nodes.push_back(mid - 0.5 * h * gl16_nodes[i]);
            weights.push_back(0.5 * h * gl16_weights[i]);
        }
        for (int i = 0; i < 8; ++i) {
            nodes.push_back(mid + 0.5 * h * gl16_nodes[i]);
            weights.push_back(0.5 * h * gl16_weights[i]);
        }
    }
    double total = 0.0;
    for (std::size_t iu = 0; iu < nodes.size(); ++iu) {
        double row = 0.0;
        for (std::size_t iv = 0; iv < nodes.size(); ++iv) row += weights[iv] * g(nodes[iu], nodes[iv]);
        total += weights[iu] * row;
    }
    return total;
}

} // namespace copex
