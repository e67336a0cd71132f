#include "boundedsnr/estimators.hpp"

#include "boundedsnr/errors.hpp"
#include "boundedsnr/quadrature.hpp"
#include "boundedsnr/specfun.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace snr {

namespace {

constexpr std::size_t kRadialNodes = 128;
constexpr std::size_t kNodesPerCell = 16;
constexpr double kPriorMassTol = 1e-8;

void check_t(double t, const char* who) {
    if (!(t >= 0.0)) {
        throw DomainError(fmt::format("{}: t must be >= 0, got {}", who, t));
    }
}

void check_l(double l, const Problem& prob) {
    if (!(l < static_cast<double>(prob.dof()))) {
        throw ConfigurationError(fmt::format(
            "l = {} must be < k + p = {} for the posterior to exist", l, prob.dof()));
    }
}

double hyper_argument(double t, double radius) {
    if (std::isinf(t)) {
        return 0.5 * radius * radius;
    }
    return radius * radius * t / (2.0 * (1.0 + t));
}

double tabulated_density_at(const TabulatedDensity& tab, double r) {
    if (r < tab.r.front() || r > tab.r.back()) {
        return 0.0;
    }
    if (tab.r.size() == 1) {
        return tab.density.front();
    }
    auto it = std::upper_bound(tab.r.begin(), tab.r.end(), r);
    if (it == tab.r.end()) {
        return tab.density.back();
    }
    const auto hi = static_cast<std::size_t>(it - tab.r.begin());
    const std::size_t lo = hi - 1;
    const double w = (r - tab.r[lo]) / (tab.r[hi] - tab.r[lo]);
    return (1.0 - w) * tab.density[lo] + w * tab.density[hi];
}

// Nodes and log(quadrature weight * prior density) for a continuous radial prior.
struct RadialNodes {
    std::vector<double> r;
    std::vector<double> log_weight;
};

RadialNodes radial_nodes(const RadialPrior& prior, const Problem& prob) {
    RadialNodes out;
    auto push = [&](double r, double weight) {
        if (weight > 0.0) {
            out.r.push_back(r);
            out.log_weight.push_back(std::log(weight));
        }
    };
    if (std::holds_alternative<BallUniform>(prior)) {
        const auto rule = quadrature::gauss_legendre(kRadialNodes, 0.0, prob.m);
        const double p = prob.p;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double r = rule.nodes[i];
            push(r, rule.weights[i] * p * std::pow(r / prob.m, p - 1.0) / prob.m);
        }
    } else if (const auto* tab = std::get_if<TabulatedDensity>(&prior)) {
        for (std::size_t c = 0; c + 1 < tab->r.size(); ++c) {
            const auto rule = quadrature::gauss_legendre(kNodesPerCell, tab->r[c], tab->r[c + 1]);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                push(rule.nodes[i], rule.weights[i] * tabulated_density_at(*tab, rule.nodes[i]));
            }
        }
    }
    return out;
}

class RadialMixtureEval {
public:
    RadialMixtureEval(const Problem& prob, double l, const RadialPrior& prior)
        : prob_(prob), l_(l) {
        check_l(l, prob);
        validate_prior(prior, prob);
        if (const auto* pm = std::get_if<PointMass>(&prior)) {
            point_ = pm->r;
        } else {
            nodes_ = radial_nodes(prior, prob);
        }
    }

    double operator()(double t) const {
        check_t(t, "h_radial_mixture");
        if (point_) {
            return h_sphere(t, prob_, l_, *point_);
        }
        const double a = 0.5 * (prob_.dof() - l_) + 1.0;
        const double b = 0.5 * prob_.p;
        const std::size_t n = nodes_.r.size();
        std::vector<double> log_w(n);
        std::vector<double> h(n);
        double max_log = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double r = nodes_.r[i];
            const double zeta = hyper_argument(t, r);
            log_w[i] = nodes_.log_weight[i] - 0.5 * r * r + specfun::log_kummer_m(a, b, zeta);
            h[i] = h_sphere(t, prob_, l_, r);
            max_log = std::max(max_log, log_w[i]);
        }
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = std::exp(log_w[i] - max_log);
            num += w * h[i];
            den += w;
        }
        return num / den;
    }

private:
    Problem prob_;
    double l_;
    std::optional<double> point_;
    RadialNodes nodes_;
};

double tabulated_multiplier(const kind::Tabulated& tab, double t) {
    if (t <= tab.t.front()) {
        return tab.h.front();
    }
    if (t >= tab.t.back()) {
        return tab.h.back();
    }
    auto it = std::upper_bound(tab.t.begin(), tab.t.end(), t);
    const auto hi = static_cast<std::size_t>(it - tab.t.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - tab.t[lo]) / (tab.t[hi] - tab.t[lo]);
    return (1.0 - w) * tab.h[lo] + w * tab.h[hi];
}

}  // namespace

// ---------------------------------------------------------------------------

Problem::Problem(int p_, int k_, double m_) : p(p_), k(k_), m(m_) { validate(); }

void Problem::validate() const {
    if (p < 1) throw ConfigurationError(fmt::format("p must be >= 1, got {}", p));
    if (k < 1) throw ConfigurationError(fmt::format("k must be >= 1, got {}", k));
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw ConfigurationError(fmt::format("m must be finite and > 0, got {}", m));
    }
}

bool kind::Truncated::operator==(const Truncated& other) const {
    if (!base || !other.base) return base == other.base;
    return *base == *other.base;
}

EstimatorSpec EstimatorSpec::unbiased() { return {kind::Unbiased{}}; }
EstimatorSpec EstimatorSpec::affine(double a) { return {kind::Affine{a}}; }
EstimatorSpec EstimatorSpec::mle() { return {kind::Mle{}}; }
EstimatorSpec EstimatorSpec::boundary_uniform(double l, std::optional<double> radius) {
    return {kind::BoundaryUniform{l, radius}};
}
EstimatorSpec EstimatorSpec::radial_mixture(double l, RadialPrior prior) {
    return {kind::RadialMixture{l, std::move(prior)}};
}
EstimatorSpec EstimatorSpec::truncated(EstimatorSpec base) {
    return {kind::Truncated{std::make_shared<const EstimatorSpec>(std::move(base))}};
}
EstimatorSpec EstimatorSpec::tabulated(std::vector<double> t, std::vector<double> h) {
    return {kind::Tabulated{std::move(t), std::move(h)}};
}

std::string EstimatorSpec::label() const {
    struct Visitor {
        std::string operator()(const kind::Unbiased&) const { return "unbiased"; }
        std::string operator()(const kind::Affine& s) const { return fmt::format("affine_a{:g}", s.a); }
        std::string operator()(const kind::Mle&) const { return "mle"; }
        std::string operator()(const kind::BoundaryUniform& s) const {
            if (s.radius) return fmt::format("bu_l{:g}_r{:g}", s.l, *s.radius);
            return fmt::format("bu_l{:g}", s.l);
        }
        std::string operator()(const kind::RadialMixture& s) const {
            struct PriorName {
                std::string operator()(const PointMass& pm) const {
                    return fmt::format("point{:g}", pm.r);
                }
                std::string operator()(const BallUniform&) const { return "ball"; }
                std::string operator()(const TabulatedDensity&) const { return "tabulated"; }
            };
            return fmt::format("mixture_{}_l{:g}", std::visit(PriorName{}, s.prior), s.l);
        }
        std::string operator()(const kind::Truncated& s) const {
            return "trunc_" + (s.base ? s.base->label() : std::string("none"));
        }
        std::string operator()(const kind::Tabulated&) const { return "tabulated"; }
    };
    return std::visit(Visitor{}, value);
}

void validate_prior(const RadialPrior& prior, const Problem& prob) {
    if (const auto* pm = std::get_if<PointMass>(&prior)) {
        if (!(pm->r > 0.0) || pm->r > prob.m) {
            throw ConfigurationError(
                fmt::format("point-mass radius {} must lie in (0, m = {}]", pm->r, prob.m));
        }
        return;
    }
    if (const auto* tab = std::get_if<TabulatedDensity>(&prior)) {
        if (tab->r.size() < 2 || tab->r.size() != tab->density.size()) {
            throw ConfigurationError("tabulated prior needs >= 2 (r, density) pairs of equal length");
        }
        for (std::size_t i = 0; i < tab->r.size(); ++i) {
            if (!std::isfinite(tab->r[i]) || !std::isfinite(tab->density[i]) ||
                tab->density[i] < 0.0) {
                throw ConfigurationError("tabulated prior: values must be finite, density >= 0");
            }
            if (i > 0 && !(tab->r[i] > tab->r[i - 1])) {
                throw ConfigurationError("tabulated prior: r grid must be strictly increasing");
            }
        }
        if (tab->r.front() < 0.0 || tab->r.back() > prob.m) {
            throw ConfigurationError(fmt::format(
                "tabulated prior support [{}, {}] is outside [0, m = {}]", tab->r.front(),
                tab->r.back(), prob.m));
        }
    }
    const auto nodes = radial_nodes(prior, prob);
    double mass = 0.0;
    for (double lw : nodes.log_weight) mass += std::exp(lw);
    if (std::abs(mass - 1.0) > kPriorMassTol) {
        throw ConfigurationError(
            fmt::format("radial prior integrates to {:.12g} over [0, m], expected 1", mass));
    }
}

void validate(const EstimatorSpec& spec, const Problem& prob) {
    prob.validate();
    struct Visitor {
        const Problem& prob;
        void operator()(const kind::Unbiased&) const {}
        void operator()(const kind::Affine& s) const {
            if (!std::isfinite(s.a)) throw ConfigurationError("affine: a must be finite");
        }
        void operator()(const kind::Mle&) const {}
        void operator()(const kind::BoundaryUniform& s) const {
            check_l(s.l, prob);
            const double r = s.radius.value_or(prob.m);
            if (!(r > 0.0) || r > prob.m) {
                throw ConfigurationError(
                    fmt::format("boundary_uniform: radius {} must lie in (0, m = {}]", r, prob.m));
            }
        }
        void operator()(const kind::RadialMixture& s) const {
            check_l(s.l, prob);
            validate_prior(s.prior, prob);
        }
        void operator()(const kind::Truncated& s) const {
            if (!s.base) throw ConfigurationError("truncated: missing base estimator");
            validate(*s.base, prob);
        }
        void operator()(const kind::Tabulated& s) const {
            if (s.t.empty() || s.t.size() != s.h.size()) {
                throw ConfigurationError("tabulated: need >= 1 (t, h) pair, equal lengths");
            }
            for (std::size_t i = 0; i < s.t.size(); ++i) {
                if (!std::isfinite(s.t[i]) || s.t[i] < 0.0) {
                    throw ConfigurationError("tabulated: t values must be finite and >= 0");
                }
                if (!std::isfinite(s.h[i]) || s.h[i] < 0.0) {
                    throw ConfigurationError("tabulated: h values must be finite and >= 0");
                }
                if (i > 0 && !(s.t[i] > s.t[i - 1])) {
                    throw ConfigurationError("tabulated: t grid must be strictly increasing");
                }
            }
        }
    };
    std::visit(Visitor{prob}, spec.value);
}

double h_mle(double t, const Problem& prob) {
    check_t(t, "h_mle");
    const double m2 = prob.m * prob.m;
    const double dof = prob.dof();
    if (t <= m2 / dof) {
        return 1.0;
    }
    const double ratio = std::isinf(t) ? 1.0 : (1.0 + t) / t;
    const double value = m2 / (2.0 * dof) * (std::sqrt(1.0 + 4.0 * dof / m2 * ratio) - 1.0);
    return std::min(value, 1.0);
}

double h_sphere(double t, const Problem& prob, double l, double radius) {
    check_t(t, "h_sphere");
    check_l(l, prob);
    if (!(radius >= 0.0)) {
        throw DomainError(fmt::format("h_sphere: radius must be >= 0, got {}", radius));
    }
    if (radius == 0.0) {
        return 0.0;
    }
    const double a = 0.5 * (prob.dof() - l) + 1.0;
    const double b = 0.5 * prob.p;
    const double zeta = hyper_argument(t, radius);
    return radius * radius / prob.p * specfun::kummer_ratio(a, b + 1.0, a, b, zeta);
}

double h_bu(double t, const Problem& prob, double l, double radius) {
    check_l(l, prob);
    if (!(radius > 0.0) || radius > prob.m) {
        throw ConfigurationError(
            fmt::format("h_bu: radius {} must lie in (0, m = {}]", radius, prob.m));
    }
    return h_sphere(t, prob, l, radius);
}

double envelope(double t, const Problem& prob) { return h_sphere(t, prob, 0.0, prob.m); }

double h_radial_mixture(double t, const Problem& prob, double l, const RadialPrior& prior) {
    return RadialMixtureEval(prob, l, prior)(t);
}

MultiplierFn make_multiplier(const EstimatorSpec& spec, const Problem& prob) {
    validate(spec, prob);
    struct Visitor {
        const Problem& prob;
        MultiplierFn operator()(const kind::Unbiased&) const {
            return [](double t) {
                check_t(t, "multiplier");
                return 1.0;
            };
        }
        MultiplierFn operator()(const kind::Affine& s) const {
            return [a = s.a](double t) {
                check_t(t, "multiplier");
                return a;
            };
        }
        MultiplierFn operator()(const kind::Mle&) const {
            return [prob = prob](double t) { return h_mle(t, prob); };
        }
        MultiplierFn operator()(const kind::BoundaryUniform& s) const {
            return [prob = prob, l = s.l, r = s.radius.value_or(prob.m)](double t) {
                return h_sphere(t, prob, l, r);
            };
        }
        MultiplierFn operator()(const kind::RadialMixture& s) const {
            return [eval = std::make_shared<const RadialMixtureEval>(prob, s.l, s.prior)](
                       double t) { return (*eval)(t); };
        }
        MultiplierFn operator()(const kind::Truncated& s) const {
            return [base = make_multiplier(*s.base, prob), prob = prob](double t) {
                return std::min(base(t), envelope(t, prob));
            };
        }
        MultiplierFn operator()(const kind::Tabulated& s) const {
            return [tab = s](double t) {
                check_t(t, "multiplier");
                return tabulated_multiplier(tab, t);
            };
        }
    };
    return std::visit(Visitor{prob}, spec.value);
}

double multiplier(const EstimatorSpec& spec, double t, const Problem& prob) {
    return make_multiplier(spec, prob)(t);
}

std::vector<double> estimate(const EstimatorSpec& spec, std::span<const double> x, double s2,
                             const Problem& prob) {
    if (!(s2 > 0.0) || !std::isfinite(s2)) {
        throw DomainError(fmt::format("estimate: s2 must be finite and > 0, got {}", s2));
    }
    if (x.size() != static_cast<std::size_t>(prob.p)) {
        throw DomainError(
            fmt::format("estimate: x has length {}, expected p = {}", x.size(), prob.p));
    }
    double norm2 = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) throw DomainError("estimate: x must be finite");
        norm2 += v * v;
    }
    const double h = multiplier(spec, norm2 / s2, prob);
    std::vector<double> out(x.begin(), x.end());
    for (double& v : out) v *= h;
    return out;
}

TwoSampleReduction two_sample_map(std::span<const double> x1, std::span<const double> x2,
                                  double s2_prime, double m_prime) {
    if (x1.size() != x2.size()) {
        throw DomainError(fmt::format("two_sample_map: length mismatch ({} vs {})", x1.size(),
                                      x2.size()));
    }
    if (!(s2_prime > 0.0)) {
        throw DomainError("two_sample_map: s2' must be > 0");
    }
    if (!(m_prime > 0.0)) {
        throw DomainError("two_sample_map: m' must be > 0");
    }
    TwoSampleReduction out;
    out.x.resize(x1.size());
    out.w.resize(x1.size());
    for (std::size_t i = 0; i < x1.size(); ++i) {
        out.x[i] = 0.5 * (x1[i] - x2[i]);
        out.w[i] = 0.5 * (x1[i] + x2[i]);
    }
    out.s2 = 0.5 * s2_prime;
    out.m = m_prime / std::sqrt(2.0);
    return out;
}

std::vector<double> two_sample_estimate(const TwoSampleReduction& reduced,
                                        std::span<const double> psi) {
    if (psi.size() != reduced.w.size()) {
        throw DomainError("two_sample_estimate: psi has the wrong length");
    }
    std::vector<double> out(reduced.w);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += psi[i];
    return out;
}

}  // namespace snr
