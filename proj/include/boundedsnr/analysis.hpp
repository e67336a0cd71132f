#pragma once

// Grid verification of multiplier inequalities and dominance conditions.
// A passing report certifies a property on the supplied grid only.

#include "boundedsnr/estimators.hpp"
#include "boundedsnr/problem.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace snr::analysis {

/// Floating-point allowance for inequalities checked at grid points.
inline constexpr double kSlack = 1e-12;

struct Violation {
    std::string check;
    std::vector<std::pair<std::string, double>> inputs;
    double lhs = 0.0;
    double rhs = 0.0;

    bool operator==(const Violation&) const = default;
};

struct VerificationReport {
    std::string name;
    std::string grid_description;
    std::vector<Violation> violations;
    bool passed = true;
    /// Results are informative only (conjectured cases); callers should not assert on them.
    bool exploratory = false;
    std::size_t checks = 0;

    void record(bool ok, std::string check, std::vector<std::pair<std::string, double>> inputs,
                double lhs, double rhs);
    /// Fold another report's checks and violations into this one.
    void absorb(const VerificationReport& other);

    bool operator==(const VerificationReport&) const = default;
};

/// n log-spaced points from lo to hi inclusive (lo, hi > 0).
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// {0} + 200 log-spaced points in [1e-4, 1e4] + {+inf}.
std::vector<double> default_t_grid();

/// 100 log-spaced points in [1e-3, 700].
std::vector<double> default_z_grid();

/// l values spread over (-inf, k + p): {-4, -2, -1, 0, 0.5, 1, 2, 5, 10, k + p - 1} below k + p.
std::vector<double> default_l_grid(const Problem& prob);

/// 21 equispaced points in [0, m].
std::vector<double> default_lambda_grid(const Problem& prob);

/// Grid points where the spec's multiplier exceeds h(m, 0, t) by more than kSlack.
std::vector<double> envelope_violation_set(const EstimatorSpec& spec, const Problem& prob,
                                           const std::vector<double>& t_grid);

/// Sufficient condition for B to dominate A: h_A >= h_B everywhere and
/// (h_A + h_B) / 2 >= h(m, 0, t) wherever h_A != h_B.
VerificationReport midpoint_dominance_check(const EstimatorSpec& a, const EstimatorSpec& b,
                                            const Problem& prob,
                                            const std::vector<double>& t_grid);

/// R(z) = M((k+p)/2+1, p/2, z) / M((k+p)/2+1, p/2+1, z) >= (z/p)(sqrt(1 + 2(k+p)/z) + 1),
/// plus the representation R(z) = 1 + (2z/p) beta(z) with beta computed as
/// 1 + k E_z[1 / (p + 2J + 2)]. p = 1 is accepted and flagged exploratory.
VerificationReport verify_inequality_r1(int p, int k, const std::vector<double>& z_grid);

/// h(m, 0, t) <= h_mle(t) for every grid t >= m^2 / (p + k).
VerificationReport verify_envelope_inequality(const Problem& prob,
                                              const std::vector<double>& t_grid);

/// h(lambda, l, t) as a function of all three arguments.
using HFunction = std::function<double(double lambda, double l, double t)>;

/// Monotonicity of h(lambda, l, t): decreasing in t, increasing in lambda and l,
/// h(lambda, l, 0) = lambda^2 / p, and the limit at t = inf as the lower bound.
VerificationReport verify_h_properties(const Problem& prob, const std::vector<double>& l_grid,
                                       const std::vector<double>& t_grid,
                                       const std::vector<double>& lambda_grid);

/// Same checks against an arbitrary h (e.g. a deliberately perturbed one).
VerificationReport verify_h_properties(const Problem& prob, const std::vector<double>& l_grid,
                                       const std::vector<double>& t_grid,
                                       const std::vector<double>& lambda_grid,
                                       const HFunction& h);

/// K_{a,b,c}(z) = M(a-c+1, b-c+1, z) / M(a+1, b, z) decreasing in z for c in {0, 1},
/// and H(a) = M(a, b+1, z) / M(a, b, z) decreasing in a.
VerificationReport verify_ratio_properties(const std::vector<double>& a_grid,
                                           const std::vector<double>& b_grid,
                                           const std::vector<double>& z_grid);

/// z M(a+1, b+1, z) = b (M(a+1, b, z) - M(a, b, z)) to relative 1e-10.
VerificationReport verify_recurrence(const std::vector<double>& a_grid,
                                     const std::vector<double>& b_grid,
                                     const std::vector<double>& z_grid);

struct Truncation {
    EstimatorSpec spec;
    /// Grid points where the input exceeded the envelope.
    std::vector<double> violations;
    /// True when nothing was truncated on the grid.
    bool identity = false;
    std::string advisory;
};

/// Truncated(spec): the multiplier min(h, h(m, 0, .)), together with the grid
/// points where the truncation bites.
Truncation build_dominating_truncation(const EstimatorSpec& spec, const Problem& prob,
                                       const std::vector<double>& t_grid = default_t_grid());

}  // namespace snr::analysis
