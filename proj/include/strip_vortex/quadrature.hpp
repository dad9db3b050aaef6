#pragma once

#include <cstddef>
#include <vector>

namespace strip_vortex {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Rule with n points; rules are computed once and cached per n.
const GaussRule& gauss_legendre(std::size_t n);

/// Integrate f over [a, b] with the n-point rule.
template <class F>
double integrate_gauss(F&& f, double a, double b, std::size_t n) {
    const GaussRule& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
    }
    return half * sum;
}

}  // namespace strip_vortex
