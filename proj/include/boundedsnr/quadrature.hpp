#pragma once

#include <cstddef>
#include <vector>

namespace snr::quadrature {

/// Gauss-Legendre nodes and weights mapped onto [lo, hi].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [lo, hi]; exact for polynomials of degree 2n - 1.
Rule gauss_legendre(std::size_t n, double lo, double hi);

/// Integrate f over [lo, hi] with an n-point Gauss-Legendre rule.
template <class F>
double integrate(const Rule& rule, F&& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        acc += rule.weights[i] * f(rule.nodes[i]);
    }
    return acc;
}

}  // namespace snr::quadrature
