#pragma once

// Confluent hypergeometric and modified Bessel functions on the quadrant
// a > 0, b > 0, z >= 0. All functions are pure and thread-safe.

#include <cstddef>

namespace snr::specfun {

struct SeriesOptions {
    double rel_tol = 1e-15;
    std::size_t max_terms = 20000;
};

/// Outcome of a positive-term power series summation.
///
/// `value` is the sum divided by exp(log_scale); the true sum is
/// value * exp(log_scale). For arguments where the sum fits in a double,
/// log_scale is zero.
struct SeriesResult {
    double value = 0.0;
    double log_scale = 0.0;
    std::size_t terms_used = 0;
    bool converged = false;
};

/// Raw Kummer series M(a, b, z) = sum_i (a)_i / (b)_i z^i / i!. Never throws on
/// non-convergence; inspect `converged`.
SeriesResult kummer_series(double a, double b, double z, const SeriesOptions& opts = {});

/// M(a, b, z). Throws DomainError for z < 0 or non-positive a, b, and EvaluationError
/// if the series does not converge within max_terms or overflows a double.
double kummer_m(double a, double b, double z, const SeriesOptions& opts = {});

/// log M(a, b, z); usable where M itself overflows (z up to several thousand).
double log_kummer_m(double a, double b, double z, const SeriesOptions& opts = {});

/// M(a1, b1, z) / M(a2, b2, z), summing both series together under a shared
/// running scale so neither overflows.
double kummer_ratio(double a1, double b1, double a2, double b2, double z,
                    const SeriesOptions& opts = {});

/// Modified Bessel function of the first kind I_nu(z), nu >= -1/2, z >= 0.
/// I_nu(0) is 1 for nu = 0, 0 for nu > 0 and +inf for nu < 0.
double bessel_i(double nu, double z, const SeriesOptions& opts = {});

/// 0F1(; b; z) = sum_j z^j / ((b)_j j!), b > 0, z >= 0.
double hyp0f1(double b, double z, const SeriesOptions& opts = {});

/// E[exp(y'U)] for U uniform on the sphere of radius r in R^p, ||y|| = y_norm.
///
/// Equals Gamma(p/2) 2^{p/2-1} I_{p/2-1}(w) / w^{p/2-1} with w = y_norm * r,
/// evaluated as 0F1(; p/2; w^2/4) so it is continuous at w = 0.
double langevin_mgf(double y_norm, double r, int p, const SeriesOptions& opts = {});

/// log Gamma(x) for x > 0.
double log_gamma(double x);

}  // namespace snr::specfun
