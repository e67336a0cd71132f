#pragma once

// Equivariant estimators delta_h(x, s^2) = h(||x||^2 / s^2) x and their
// multiplier functions h.

#include "boundedsnr/problem.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace snr {

// ---------------------------------------------------------------------------
// Radial priors: the law of R = ||theta|| / sigma on [0, m].

struct PointMass {
    double r = 0.0;

    bool operator==(const PointMass&) const = default;
};

/// theta | sigma uniform on the ball of radius m sigma: density p r^{p-1} / m^p.
struct BallUniform {
    bool operator==(const BallUniform&) const = default;
};

/// Piecewise-linear density through (r[i], density[i]), zero outside [r.front(), r.back()].
struct TabulatedDensity {
    std::vector<double> r;
    std::vector<double> density;

    bool operator==(const TabulatedDensity&) const = default;
};

using RadialPrior = std::variant<PointMass, BallUniform, TabulatedDensity>;

/// Throws ConfigurationError if the prior puts mass outside [0, m] or does not
/// integrate to one within 1e-8.
void validate_prior(const RadialPrior& prior, const Problem& prob);

// ---------------------------------------------------------------------------
// Estimator descriptions.

struct EstimatorSpec;

namespace kind {

struct Unbiased {
    bool operator==(const Unbiased&) const = default;
};
struct Affine {
    double a = 1.0;

    bool operator==(const Affine&) const = default;
};
struct Mle {
    bool operator==(const Mle&) const = default;
};
/// Bayes rule for theta | sigma uniform on the sphere of radius radius*sigma and
/// sigma^2 ~ (sigma^2)^{l/2 - 1}. An empty radius means m.
struct BoundaryUniform {
    double l = 0.0;
    std::optional<double> radius;

    bool operator==(const BoundaryUniform&) const = default;
};
struct RadialMixture {
    double l = 0.0;
    RadialPrior prior = BallUniform{};

    bool operator==(const RadialMixture&) const = default;
};
/// min(base multiplier, envelope).
struct Truncated {
    std::shared_ptr<const EstimatorSpec> base;

    bool operator==(const Truncated& other) const;
};
/// Linear interpolation through (t[i], h[i]), constant beyond the ends.
struct Tabulated {
    std::vector<double> t;
    std::vector<double> h;

    bool operator==(const Tabulated&) const = default;
};

}  // namespace kind

struct EstimatorSpec {
    using Variant = std::variant<kind::Unbiased, kind::Affine, kind::Mle, kind::BoundaryUniform,
                                 kind::RadialMixture, kind::Truncated, kind::Tabulated>;
    Variant value;

    static EstimatorSpec unbiased();
    static EstimatorSpec affine(double a);
    static EstimatorSpec mle();
    static EstimatorSpec boundary_uniform(double l = 0.0, std::optional<double> radius = {});
    static EstimatorSpec radial_mixture(double l, RadialPrior prior);
    static EstimatorSpec truncated(EstimatorSpec base);
    static EstimatorSpec tabulated(std::vector<double> t, std::vector<double> h);

    template <class T>
    bool is() const noexcept {
        return std::holds_alternative<T>(value);
    }

    bool operator==(const EstimatorSpec&) const = default;

    /// Short human-readable name, also used for output file names.
    std::string label() const;
};


/// Throws ConfigurationError if the spec cannot be evaluated for prob
/// (l >= k + p, radius outside (0, m], negative table values, ...).
void validate(const EstimatorSpec& spec, const Problem& prob);

// ---------------------------------------------------------------------------
// Multipliers. t = +inf is accepted everywhere and gives the limit.

/// Restricted maximum likelihood multiplier.
double h_mle(double t, const Problem& prob);

/// Boundary-uniform Bayes multiplier h(radius, l, t) for any radius >= 0
/// (radius = 0 gives 0). No check against m; see h_bu for the checked form.
double h_sphere(double t, const Problem& prob, double l, double radius);

/// Boundary-uniform Bayes multiplier; requires l < k + p and 0 < radius <= m.
double h_bu(double t, const Problem& prob, double l, double radius);

/// h(m, 0, t): the multiplier of delta_BU,0.
double envelope(double t, const Problem& prob);

/// Bayes multiplier for a spherically symmetric prior with radial law `prior`.
double h_radial_mixture(double t, const Problem& prob, double l, const RadialPrior& prior);

using MultiplierFn = std::function<double(double)>;

/// Validate once and return t -> h(t). The returned callable is immutable and
/// safe to invoke concurrently.
MultiplierFn make_multiplier(const EstimatorSpec& spec, const Problem& prob);

double multiplier(const EstimatorSpec& spec, double t, const Problem& prob);

/// h(||x||^2 / s2) x. Throws DomainError if s2 <= 0 or x has the wrong length.
std::vector<double> estimate(const EstimatorSpec& spec, std::span<const double> x, double s2,
                             const Problem& prob);

// ---------------------------------------------------------------------------
// Two-sample reduction.

struct TwoSampleReduction {
    std::vector<double> x;  ///< (x1 - x2) / 2
    std::vector<double> w;  ///< (x1 + x2) / 2
    double s2 = 0.0;        ///< s2' / 2
    double m = 0.0;         ///< m' / sqrt(2)
};

TwoSampleReduction two_sample_map(std::span<const double> x1, std::span<const double> x2,
                                  double s2_prime, double m_prime);

/// Estimate of theta_1 from the reduced problem: w + psi.
std::vector<double> two_sample_estimate(const TwoSampleReduction& reduced,
                                        std::span<const double> psi);

}  // namespace snr
