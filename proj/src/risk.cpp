#include "boundedsnr/risk.hpp"

#include "boundedsnr/errors.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <mutex>
#include <thread>

namespace snr {

namespace {

constexpr double kAgreementSe = 4.0;

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

// Runs `body(stream, count, stats)` once per chunk. Each chunk fills its own
// `n_stats` accumulators; they are merged in chunk order.
template <class Body>
std::vector<RunningStats> run_chunks(const SampleConfig& cfg, std::size_t n_stats, Body&& body) {
    cfg.validate();
    const std::int64_t chunk = std::min(cfg.chunk_size, cfg.replicates);
    const std::int64_t n_chunks = (cfg.replicates + chunk - 1) / chunk;
    std::vector<std::vector<RunningStats>> per_chunk(static_cast<std::size_t>(n_chunks),
                                                     std::vector<RunningStats>(n_stats));

    unsigned workers = cfg.workers != 0 ? cfg.workers : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_chunks)));

    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= n_chunks || failed.load()) return;
            const std::int64_t count = std::min(chunk, cfg.replicates - c * chunk);
            try {
                RandomStream stream(cfg.seed, static_cast<std::uint64_t>(c));
                body(stream, count, std::span<RunningStats>(per_chunk[static_cast<std::size_t>(c)]));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
                return;
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    std::vector<RunningStats> total(n_stats);
    for (const auto& stats : per_chunk) {
        for (std::size_t i = 0; i < n_stats; ++i) total[i].merge(stats[i]);
    }
    return total;
}

double squared_loss(double h, std::span<const double> x, double lambda) {
    double acc = 0.0;
    const double d0 = h * x[0] - lambda;
    acc += d0 * d0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double d = h * x[i];
        acc += d * d;
    }
    return acc;
}

void check_lambda(double lambda, const Problem& prob) {
    if (!(lambda >= 0.0) || lambda > prob.m) {
        throw ConfigurationError(
            fmt::format("lambda = {} must lie in [0, m = {}]", lambda, prob.m));
    }
}

}  // namespace

void SampleConfig::validate() const {
    if (replicates < 1) {
        throw ConfigurationError(fmt::format("replicates must be >= 1, got {}", replicates));
    }
    if (chunk_size < 1) {
        throw ConfigurationError(fmt::format("chunk_size must be >= 1, got {}", chunk_size));
    }
}

void RunningStats::merge(const RunningStats& other) noexcept {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double d = other.mean_ - mean_;
    mean_ += d * nb / n;
    m2_ += other.m2_ + d * d * na * nb / n;
    n_ += other.n_;
}

double RunningStats::variance() const noexcept {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::std_error() const noexcept {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t chunk) {
    std::seed_seq seq{lo32(seed), hi32(seed), lo32(chunk), hi32(chunk), 0x9e3779b9u};
    engine_.seed(seq);
}

void sample_canonical(double lambda, const Problem& prob, RandomStream& stream,
                      std::span<double> x, double& s2) {
    for (double& v : x) v = stream.normal();
    x[0] += lambda;
    double acc = 0.0;
    for (int j = 0; j < prob.k; ++j) {
        const double z = stream.normal();
        acc += z * z;
    }
    s2 = acc;
}

CanonicalDraw sample_canonical(double lambda, const Problem& prob, RandomStream& stream) {
    CanonicalDraw draw;
    draw.x.resize(static_cast<std::size_t>(prob.p));
    sample_canonical(lambda, prob, stream, draw.x, draw.s2);
    return draw;
}

PairedEvaluation mc_paired(std::span<const EstimatorSpec> specs, std::size_t reference,
                           double lambda, const Problem& prob, const SampleConfig& cfg) {
    prob.validate();
    check_lambda(lambda, prob);
    if (specs.empty()) throw ConfigurationError("mc_paired: need at least one estimator");
    if (reference >= specs.size()) throw ConfigurationError("mc_paired: reference out of range");
    std::vector<MultiplierFn> fns;
    fns.reserve(specs.size());
    for (const auto& s : specs) fns.push_back(make_multiplier(s, prob));
    const std::size_t n = specs.size();

    // stats[0, n): losses; stats[n, 2n): loss_i - loss_reference.
    auto stats = run_chunks(cfg, 2 * n, [&](RandomStream& stream, std::int64_t count,
                                            std::span<RunningStats> acc) {
        std::vector<double> x(static_cast<std::size_t>(prob.p));
        std::vector<double> loss(n);
        double s2 = 0.0;
        for (std::int64_t r = 0; r < count; ++r) {
            sample_canonical(lambda, prob, stream, x, s2);
            double norm2 = 0.0;
            for (double v : x) norm2 += v * v;
            const double t = norm2 / s2;
            for (std::size_t i = 0; i < n; ++i) {
                loss[i] = squared_loss(fns[i](t), x, lambda);
                acc[i].add(loss[i]);
            }
            for (std::size_t i = 0; i < n; ++i) acc[n + i].add(loss[i] - loss[reference]);
        }
    });

    PairedEvaluation out;
    for (std::size_t i = 0; i < n; ++i) {
        out.risks.push_back({lambda, stats[i].mean(), stats[i].std_error(), stats[i].count()});
        out.minus_reference.push_back({stats[n + i].mean(), stats[n + i].std_error()});
    }
    return out;
}

RiskPoint mc_risk(const EstimatorSpec& spec, double lambda, const Problem& prob,
                  const SampleConfig& cfg) {
    const EstimatorSpec specs[] = {spec};
    return mc_paired(specs, 0, lambda, prob, cfg).risks.front();
}

RiskDifference mc_risk_difference(const EstimatorSpec& a, const EstimatorSpec& b, double lambda,
                                  const Problem& prob, const SampleConfig& cfg) {
    const EstimatorSpec specs[] = {a, b};
    return mc_paired(specs, 1, lambda, prob, cfg).minus_reference.front();
}

bool DecompositionCheck::agrees() const noexcept {
    return std::abs(lhs - rhs) <= tolerance + 1e-12 * std::max(1.0, std::abs(lhs));
}

DecompositionCheck conditional_decomposition_check(const EstimatorSpec& spec, double lambda,
                                                   const Problem& prob, const SampleConfig& cfg) {
    prob.validate();
    check_lambda(lambda, prob);
    const MultiplierFn h = make_multiplier(spec, prob);
    const double lambda2 = lambda * lambda;

    // stats: direct loss, decomposition term, their difference.
    auto stats = run_chunks(cfg, 3, [&](RandomStream& stream, std::int64_t count,
                                        std::span<RunningStats> acc) {
        std::vector<double> x(static_cast<std::size_t>(prob.p));
        double s2 = 0.0;
        for (std::int64_t r = 0; r < count; ++r) {
            sample_canonical(lambda, prob, stream, x, s2);
            double norm2 = 0.0;
            for (double v : x) norm2 += v * v;
            const double t = norm2 / s2;
            const double ht = h(t);
            const double best = h_sphere(t, prob, 0.0, lambda);
            const double direct = squared_loss(ht, x, lambda);
            const double decomposed =
                lambda2 + norm2 * ((ht - best) * (ht - best) - best * best);
            acc[0].add(direct);
            acc[1].add(decomposed);
            acc[2].add(direct - decomposed);
        }
    });

    DecompositionCheck out;
    out.lhs = stats[0].mean();
    out.rhs = stats[1].mean();
    out.lhs_std_error = stats[0].std_error();
    out.rhs_std_error = stats[1].std_error();
    out.tolerance = kAgreementSe * stats[2].std_error();
    return out;
}

void validate_lambda_grid(std::span<const double> grid, const Problem& prob) {
    if (grid.empty()) throw ConfigurationError("lambda grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        check_lambda(grid[i], prob);
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw ConfigurationError("lambda grid must be strictly increasing");
        }
    }
}

PairedCurves paired_risk_curves(std::span<const EstimatorSpec> specs, std::size_t reference,
                                const Problem& prob, std::span<const double> lambda_grid,
                                const SampleConfig& cfg) {
    validate_lambda_grid(lambda_grid, prob);
    PairedCurves out;
    out.reference = reference;
    for (const auto& s : specs) {
        out.curves.push_back({prob, s, {}});
        out.minus_reference.emplace_back();
    }
    for (double lambda : lambda_grid) {
        const auto eval = mc_paired(specs, reference, lambda, prob, cfg);
        for (std::size_t i = 0; i < specs.size(); ++i) {
            out.curves[i].points.push_back(eval.risks[i]);
            out.minus_reference[i].push_back(eval.minus_reference[i]);
        }
    }
    return out;
}

RiskCurve risk_curve(const EstimatorSpec& spec, const Problem& prob,
                     std::span<const double> lambda_grid, const SampleConfig& cfg) {
    const EstimatorSpec specs[] = {spec};
    return std::move(paired_risk_curves(specs, 0, prob, lambda_grid, cfg).curves.front());
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (n == 0) throw ConfigurationError("grid needs at least one point");
    if (n == 1) return {lo};
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    g.back() = hi;
    return g;
}

void write_risk_csv(std::ostream& out, const RiskCurve& curve,
                    std::span<const std::string> comments) {
    for (const auto& c : comments) fmt::print(out, "# {}\n", c);
    fmt::print(out, "lambda,estimate,std_error,replicates\n");
    for (const auto& pt : curve.points) {
        fmt::print(out, "{:.12g},{:.12g},{:.12g},{}\n", pt.lambda, pt.estimate, pt.std_error,
                   pt.replicates);
    }
}

}  // namespace snr
