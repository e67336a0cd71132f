#include "boundedsnr/analysis.hpp"

#include "boundedsnr/errors.hpp"
#include "boundedsnr/specfun.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace snr::analysis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string describe_values(const std::vector<double>& v) {
    if (v.empty()) return "empty";
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return fmt::format("{} points in [{:g}, {:g}]", v.size(), *lo, *hi);
}

std::string problem_tag(const Problem& prob) {
    return fmt::format("p={} k={} m={:g}", prob.p, prob.k, prob.m);
}

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool not_above(double lhs, double rhs) { return lhs <= rhs + kSlack; }

// Scale-aware variant for quantities that range over many orders of magnitude.
bool not_above_scaled(double lhs, double rhs) {
    return lhs <= rhs + kSlack * std::max(1.0, std::abs(rhs));
}

// beta(z) = 1 + k E[1 / (p + 2J + 2)], J with pmf proportional to
// (a)_j / (p/2 + 1)_j z^j / j!, a = (k+p)/2 + 1.
double beta_by_expectation(int p, int k, double z) {
    const double a = 0.5 * (k + p) + 1.0;
    const double b = 0.5 * p + 1.0;
    double term = 1.0;
    double mass = 1.0;
    double weighted = 1.0 / (p + 2.0);
    for (int j = 0; j < 20000; ++j) {
        const double factor = (a + j) / (b + j) * z / (j + 1.0);
        term *= factor;
        mass += term;
        weighted += term / (p + 2.0 * (j + 1) + 2.0);
        if (mass > 1e280) {
            term *= 1e-280;
            mass *= 1e-280;
            weighted *= 1e-280;
        }
        if (factor < 1.0 && term <= 1e-16 * mass) break;
    }
    return 1.0 + k * weighted / mass;
}

}  // namespace

void VerificationReport::record(bool ok, std::string check,
                                std::vector<std::pair<std::string, double>> inputs, double lhs,
                                double rhs) {
    ++checks;
    if (ok) return;
    violations.push_back({std::move(check), std::move(inputs), lhs, rhs});
    passed = false;
}

void VerificationReport::absorb(const VerificationReport& other) {
    checks += other.checks;
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    passed = violations.empty();
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi))
        throw ConfigurationError(fmt::format("log grid needs 0 < lo <= hi < inf, got [{}, {}]", lo, hi));
    if (n == 0) throw ConfigurationError("log grid needs at least one point");
    if (n == 1) return {lo};
    std::vector<double> g(n);
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> default_t_grid() {
    std::vector<double> g{0.0};
    const auto inner = log_grid(1e-4, 1e4, 200);
    g.insert(g.end(), inner.begin(), inner.end());
    g.push_back(kInf);
    return g;
}

std::vector<double> default_z_grid() { return log_grid(1e-3, 700.0, 100); }

std::vector<double> default_l_grid(const Problem& prob) {
    std::vector<double> g;
    for (double l : {-4.0, -2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        if (l < prob.dof() - 1) g.push_back(l);
    }
    g.push_back(prob.dof() - 1.0);
    return g;
}

std::vector<double> default_lambda_grid(const Problem& prob) {
    std::vector<double> g(21);
    for (int i = 0; i <= 20; ++i) g[static_cast<std::size_t>(i)] = prob.m * i / 20.0;
    return g;
}

std::vector<double> envelope_violation_set(const EstimatorSpec& spec, const Problem& prob,
                                           const std::vector<double>& t_grid) {
    const auto h = make_multiplier(spec, prob);
    std::vector<double> out;
    for (double t : t_grid) {
        if (h(t) > envelope(t, prob) + kSlack) out.push_back(t);
    }
    return out;
}

VerificationReport midpoint_dominance_check(const EstimatorSpec& a, const EstimatorSpec& b,
                                            const Problem& prob,
                                            const std::vector<double>& t_grid) {
    VerificationReport rep;
    rep.name = fmt::format("midpoint dominance {} -> {}", a.label(), b.label());
    rep.grid_description = fmt::format("{}; t: {}", problem_tag(prob), describe_values(t_grid));
    const auto ha = make_multiplier(a, prob);
    const auto hb = make_multiplier(b, prob);
    for (double t : t_grid) {
        const double va = ha(t);
        const double vb = hb(t);
        rep.record(not_above(vb, va), "h_A >= h_B", {{"t", t}}, va, vb);
        if (std::abs(va - vb) > kSlack) {
            const double env = envelope(t, prob);
            const double mid = 0.5 * (va + vb);
            rep.record(not_above(env, mid), "(h_A + h_B)/2 >= envelope", {{"t", t}}, mid, env);
        }
    }
    return rep;
}

VerificationReport verify_inequality_r1(int p, int k, const std::vector<double>& z_grid) {
    if (p < 1 || k < 1) throw DomainError(fmt::format("p and k must be >= 1, got p={} k={}", p, k));
    VerificationReport rep;
    rep.name = fmt::format("ratio lower bound p={} k={}", p, k);
    rep.grid_description = fmt::format("z: {}", describe_values(z_grid));
    rep.exploratory = p < 2 || k < 2;
    const double a = 0.5 * (k + p) + 1.0;
    const double b = 0.5 * p;
    for (double z : z_grid) {
        if (!(z > 0.0) || !std::isfinite(z))
            throw DomainError(fmt::format("z grid values must be positive and finite, got {}", z));
        const double r = specfun::kummer_ratio(a, b, a, b + 1.0, z);
        const double bound = (z / p) * (std::sqrt(1.0 + 2.0 * (k + p) / z) + 1.0);
        rep.record(not_above_scaled(bound, r), "R(z) >= (z/p)(sqrt(1+2(k+p)/z)+1)", {{"z", z}},
                   r, bound);
        const double rep_value = 1.0 + (2.0 * z / p) * beta_by_expectation(p, k, z);
        const double rel = std::abs(rep_value - r) / std::abs(r);
        rep.record(rel <= 1e-10, "R(z) = 1 + (2z/p) beta(z)", {{"z", z}}, r, rep_value);
    }
    return rep;
}

VerificationReport verify_envelope_inequality(const Problem& prob,
                                              const std::vector<double>& t_grid) {
    VerificationReport rep;
    rep.name = fmt::format("envelope below mle {}", problem_tag(prob));
    const double t0 = prob.m * prob.m / prob.dof();
    rep.grid_description = fmt::format("t >= {:g} from {}", t0, describe_values(t_grid));
    for (double t : t_grid) {
        if (t < t0) continue;
        const double env = envelope(t, prob);
        const double mle = h_mle(t, prob);
        rep.record(not_above(env, mle), "h(m,0,t) <= h_mle(t)", {{"t", t}}, env, mle);
    }
    return rep;
}

VerificationReport verify_h_properties(const Problem& prob, const std::vector<double>& l_grid,
                                       const std::vector<double>& t_grid,
                                       const std::vector<double>& lambda_grid) {
    return verify_h_properties(prob, l_grid, t_grid, lambda_grid,
                               [&prob](double lambda, double l, double t) {
                                   return h_sphere(t, prob, l, lambda);
                               });
}

VerificationReport verify_h_properties(const Problem& prob, const std::vector<double>& l_grid,
                                       const std::vector<double>& t_grid,
                                       const std::vector<double>& lambda_grid,
                                       const HFunction& h) {
    prob.validate();
    const auto ls = sorted_unique(l_grid);
    const auto ts = sorted_unique(t_grid);
    const auto lams = sorted_unique(lambda_grid);
    for (double l : ls) {
        if (!(l < prob.dof()))
            throw DomainError(fmt::format("l = {} must be < k + p = {} for the posterior to exist",
                                          l, prob.dof()));
    }
    for (double t : ts) {
        if (!(t >= 0.0)) throw DomainError(fmt::format("t grid values must be >= 0, got {}", t));
    }
    for (double lam : lams) {
        if (!(lam >= 0.0) || !std::isfinite(lam))
            throw DomainError(fmt::format("lambda grid values must be finite and >= 0, got {}", lam));
    }

    VerificationReport rep;
    rep.name = fmt::format("h properties {}", problem_tag(prob));
    rep.grid_description = fmt::format("l: {}; t: {}; lambda: {}", describe_values(ls),
                                       describe_values(ts), describe_values(lams));

    // values[i][j][n] = h(lams[i], ls[j], ts[n])
    std::vector<std::vector<std::vector<double>>> values(
        lams.size(), std::vector<std::vector<double>>(ls.size(), std::vector<double>(ts.size())));
    for (std::size_t i = 0; i < lams.size(); ++i)
        for (std::size_t j = 0; j < ls.size(); ++j)
            for (std::size_t n = 0; n < ts.size(); ++n) values[i][j][n] = h(lams[i], ls[j], ts[n]);

    const double p = prob.p;
    for (std::size_t i = 0; i < lams.size(); ++i) {
        const double lam = lams[i];
        const double top = lam * lam / p;
        for (std::size_t j = 0; j < ls.size(); ++j) {
            const double l = ls[j];
            const double a = 0.5 * (prob.dof() - l) + 1.0;
            const double zeta = 0.5 * lam * lam;
            const double bottom =
                top * specfun::kummer_ratio(a, 0.5 * p + 1.0, a, 0.5 * p, zeta);
            const auto& row = values[i][j];

            const double at_zero = h(lam, l, 0.0);
            rep.record(std::abs(at_zero - top) <= kSlack, "h(lambda,l,0) = lambda^2/p",
                       {{"lambda", lam}, {"l", l}}, at_zero, top);

            for (std::size_t n = 0; n < ts.size(); ++n) {
                const double t = ts[n];
                rep.record(not_above(row[n], top), "h <= lambda^2/p",
                           {{"lambda", lam}, {"l", l}, {"t", t}}, row[n], top);
                rep.record(not_above(bottom, row[n]), "h >= h(lambda,l,inf)",
                           {{"lambda", lam}, {"l", l}, {"t", t}}, row[n], bottom);
                if (lam > 0.0 && n + 1 < ts.size()) {
                    rep.record(not_above(row[n + 1], row[n]), "decreasing in t",
                               {{"lambda", lam}, {"l", l}, {"t", ts[n + 1]}}, row[n + 1], row[n]);
                }
                if (t > 0.0 && j + 1 < ls.size() && lam > 0.0) {
                    const double next = values[i][j + 1][n];
                    rep.record(not_above(row[n], next), "increasing in l",
                               {{"lambda", lam}, {"l", ls[j + 1]}, {"t", t}}, next, row[n]);
                }
                if (i + 1 < lams.size()) {
                    const double next = values[i + 1][j][n];
                    rep.record(not_above(row[n], next), "increasing in lambda",
                               {{"lambda", lams[i + 1]}, {"l", l}, {"t", t}}, next, row[n]);
                }
            }
        }
    }
    return rep;
}

VerificationReport verify_ratio_properties(const std::vector<double>& a_grid,
                                           const std::vector<double>& b_grid,
                                           const std::vector<double>& z_grid) {
    VerificationReport rep;
    rep.name = "hypergeometric ratio monotonicity";
    rep.grid_description = fmt::format("a: {}; b: {}; z: {}", describe_values(a_grid),
                                       describe_values(b_grid), describe_values(z_grid));
    const auto as = sorted_unique(a_grid);
    const auto zs = sorted_unique(z_grid);
    for (double b : b_grid) {
        for (double a : as) {
            for (int c : {0, 1}) {
                double prev = specfun::kummer_ratio(a - c + 1.0, b - c + 1.0, a + 1.0, b, zs.front());
                for (std::size_t n = 1; n < zs.size(); ++n) {
                    const double cur =
                        specfun::kummer_ratio(a - c + 1.0, b - c + 1.0, a + 1.0, b, zs[n]);
                    rep.record(not_above_scaled(cur, prev), fmt::format("K_(a,b,{}) decreasing in z", c),
                               {{"a", a}, {"b", b}, {"z", zs[n]}}, cur, prev);
                    prev = cur;
                }
            }
        }
        for (double z : zs) {
            double prev = specfun::kummer_ratio(as.front(), b + 1.0, as.front(), b, z);
            for (std::size_t n = 1; n < as.size(); ++n) {
                const double cur = specfun::kummer_ratio(as[n], b + 1.0, as[n], b, z);
                if (z > 0.0) {
                    rep.record(not_above_scaled(cur, prev), "H decreasing in a",
                               {{"a", as[n]}, {"b", b}, {"z", z}}, cur, prev);
                }
                prev = cur;
            }
        }
    }
    return rep;
}

VerificationReport verify_recurrence(const std::vector<double>& a_grid,
                                     const std::vector<double>& b_grid,
                                     const std::vector<double>& z_grid) {
    VerificationReport rep;
    rep.name = "contiguous recurrence";
    rep.grid_description = fmt::format("a: {}; b: {}; z: {}", describe_values(a_grid),
                                       describe_values(b_grid), describe_values(z_grid));
    for (double a : a_grid) {
        for (double b : b_grid) {
            for (double z : z_grid) {
                const double lhs = z * specfun::kummer_m(a + 1.0, b + 1.0, z);
                const double rhs = b * (specfun::kummer_m(a + 1.0, b, z) - specfun::kummer_m(a, b, z));
                const double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
                rep.record(rel <= 1e-10, "z M(a+1,b+1,z) = b (M(a+1,b,z) - M(a,b,z))",
                           {{"a", a}, {"b", b}, {"z", z}}, lhs, rhs);
            }
        }
    }
    return rep;
}

Truncation build_dominating_truncation(const EstimatorSpec& spec, const Problem& prob,
                                       const std::vector<double>& t_grid) {
    validate(spec, prob);
    Truncation out{EstimatorSpec::truncated(spec), envelope_violation_set(spec, prob, t_grid),
                   false, {}};
    out.identity = out.violations.empty();
    if (out.identity) {
        out.advisory = fmt::format(
            "{} never exceeds the envelope on the grid; truncation is the identity", spec.label());
    }
    return out;
}

}  // namespace snr::analysis
