#include "boundedsnr/quadrature.hpp"

#include "boundedsnr/errors.hpp"

#include <cmath>
#include <numbers>

namespace snr::quadrature {

Rule gauss_legendre(std::size_t n, double lo, double hi) {
    if (n == 0) {
        throw ConfigurationError("gauss_legendre: need at least one node");
    }
    if (!(hi > lo)) {
        throw ConfigurationError("gauss_legendre: need hi > lo");
    }
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double half_width = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Newton iteration on P_n from the Chebyshev-like starting guess.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t j = 2; j <= n; ++j) {
                const double dj = static_cast<double>(j);
                const double p2 = ((2.0 * dj - 1.0) * x * p1 - (dj - 1.0) * p0) / dj;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t j = 2; j <= n; ++j) {
            const double dj = static_cast<double>(j);
            const double p2 = ((2.0 * dj - 1.0) * x * p1 - (dj - 1.0) * p0) / dj;
            p0 = p1;
            p1 = p2;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half_width * x;
        rule.nodes[n - 1 - i] = mid + half_width * x;
        rule.weights[i] = half_width * w;
        rule.weights[n - 1 - i] = half_width * w;
    }
    return rule;
}

}  // namespace snr::quadrature
