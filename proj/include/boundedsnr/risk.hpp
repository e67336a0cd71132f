#pragma once

// Monte Carlo risk R(lambda, delta_h) = E ||h(T) X - theta||^2 / sigma^2, simulated
// at sigma = 1, theta = lambda e_1.
//
// Replicates are split into chunks of `chunk_size`. Chunk c draws from its own
// stream seeded by (seed, c), chunks may run on any number of workers, and the
// per-chunk statistics are merged in chunk order, so results are bit-identical
// for a given SampleConfig regardless of the worker count.

#include "boundedsnr/estimators.hpp"
#include "boundedsnr/problem.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace snr {

struct SampleConfig {
    std::int64_t replicates = 200000;
    std::uint64_t seed = 20120601;
    std::int64_t chunk_size = 10000;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned workers = 0;

    /// Throws ConfigurationError unless replicates >= 1 and chunk_size >= 1.
    /// A chunk_size above replicates is treated as replicates.
    void validate() const;
};

struct RiskPoint {
    double lambda = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t replicates = 0;
};

struct RiskCurve {
    Problem problem;
    EstimatorSpec spec;
    std::vector<RiskPoint> points;
};

/// Paired (common random numbers) difference of two risks.
struct RiskDifference {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Welford accumulator with an order-sensitive but deterministic merge.
class RunningStats {
public:
    void add(double x) noexcept {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    void merge(const RunningStats& other) noexcept;

    std::int64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Plug-in sample variance (n - 1 denominator); 0 for fewer than two values.
    double variance() const noexcept;
    double std_error() const noexcept;

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Random source for one chunk.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t chunk);

    double normal() { return normal_(engine_); }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

/// Draw x ~ N_p(lambda e_1, I_p) and s2 ~ chi^2_k (sum of k squared normals).
void sample_canonical(double lambda, const Problem& prob, RandomStream& stream,
                      std::span<double> x, double& s2);

struct CanonicalDraw {
    std::vector<double> x;
    double s2 = 0.0;
};
CanonicalDraw sample_canonical(double lambda, const Problem& prob, RandomStream& stream);

RiskPoint mc_risk(const EstimatorSpec& spec, double lambda, const Problem& prob,
                  const SampleConfig& cfg);

/// R(lambda, A) - R(lambda, B) from losses on the same draws.
RiskDifference mc_risk_difference(const EstimatorSpec& a, const EstimatorSpec& b, double lambda,
                                  const Problem& prob, const SampleConfig& cfg);

/// Risks of several estimators on shared draws, plus each risk minus the
/// reference estimator's risk.
struct PairedEvaluation {
    std::vector<RiskPoint> risks;
    std::vector<RiskDifference> minus_reference;
};

PairedEvaluation mc_paired(std::span<const EstimatorSpec> specs, std::size_t reference,
                           double lambda, const Problem& prob, const SampleConfig& cfg);

/// Direct risk versus lambda^2 + E[(x'x)((h - h_lambda)^2 - h_lambda^2)], with
/// h_lambda(t) = h(lambda, 0, t), on the same draws.
struct DecompositionCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    /// 4 x standard error of the per-replicate lhs - rhs.
    double tolerance = 0.0;
    double lhs_std_error = 0.0;
    double rhs_std_error = 0.0;

    bool agrees() const noexcept;
};

DecompositionCheck conditional_decomposition_check(const EstimatorSpec& spec, double lambda,
                                                   const Problem& prob, const SampleConfig& cfg);

/// One RiskPoint per grid value. Every point uses cfg.seed, so curves for
/// different estimators are paired point by point.
RiskCurve risk_curve(const EstimatorSpec& spec, const Problem& prob,
                     std::span<const double> lambda_grid, const SampleConfig& cfg);

struct PairedCurves {
    std::vector<RiskCurve> curves;
    std::size_t reference = 0;
    /// minus_reference[i][j]: spec i minus the reference at grid point j.
    std::vector<std::vector<RiskDifference>> minus_reference;
};

PairedCurves paired_risk_curves(std::span<const EstimatorSpec> specs, std::size_t reference,
                                const Problem& prob, std::span<const double> lambda_grid,
                                const SampleConfig& cfg);

/// Throws ConfigurationError unless the grid is non-empty, strictly increasing and in [0, m].
void validate_lambda_grid(std::span<const double> grid, const Problem& prob);

/// n equispaced values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

/// CSV: `# ` comment lines, header `lambda,estimate,std_error,replicates`, 12 significant digits.
void write_risk_csv(std::ostream& out, const RiskCurve& curve,
                    std::span<const std::string> comments = {});

}  // namespace snr
