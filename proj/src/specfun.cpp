#include "boundedsnr/specfun.hpp"

#include "boundedsnr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace snr::specfun {

namespace {

constexpr double kRescaleAbove = 1e280;
constexpr double kRescaleFactor = 1e-280;
const double kLogRescale = 280.0 * std::log(10.0);

void check_kummer_args(double a, double b, double z, const char* who) {
    if (!(z >= 0.0)) {
        throw DomainError(std::string(who) + ": z must be >= 0, got " + std::to_string(z));
    }
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError(std::string(who) + ": a and b must be > 0, got a=" + std::to_string(a) +
                          ", b=" + std::to_string(b));
    }
    if (!std::isfinite(z)) {
        throw DomainError(std::string(who) + ": z must be finite");
    }
}

// One step of a Kummer series: term_i -> term_{i+1}. Returns the multiplicative
// factor used so callers can tell when the tail has started to decrease.
inline double kummer_step(double a, double b, double z, std::size_t i, double& term) {
    const double di = static_cast<double>(i);
    const double factor = (a + di) / (b + di) * z / (di + 1.0);
    term *= factor;
    return factor;
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) {
        throw DomainError("log_gamma: x must be > 0, got " + std::to_string(x));
    }
    return std::lgamma(x);
}

SeriesResult kummer_series(double a, double b, double z, const SeriesOptions& opts) {
    check_kummer_args(a, b, z, "kummer_series");
    SeriesResult out;
    double term = 1.0;
    double sum = 1.0;
    out.terms_used = 1;
    if (z == 0.0) {
        out.value = 1.0;
        out.converged = true;
        return out;
    }
    for (std::size_t i = 0; out.terms_used < opts.max_terms; ++i) {
        const double factor = kummer_step(a, b, z, i, term);
        sum += term;
        ++out.terms_used;
        if (sum > kRescaleAbove) {
            sum *= kRescaleFactor;
            term *= kRescaleFactor;
            out.log_scale += kLogRescale;
        }
        if (factor < 1.0 && term <= opts.rel_tol * sum) {
            out.converged = true;
            break;
        }
    }
    out.value = sum;
    return out;
}

double kummer_m(double a, double b, double z, const SeriesOptions& opts) {
    const SeriesResult r = kummer_series(a, b, z, opts);
    if (!r.converged) {
        throw EvaluationError("kummer_m: series did not converge", a, b, z);
    }
    const double value = r.value * std::exp(r.log_scale);
    if (!std::isfinite(value)) {
        throw EvaluationError("kummer_m: value overflows double, use log_kummer_m", a, b, z);
    }
    return value;
}

double log_kummer_m(double a, double b, double z, const SeriesOptions& opts) {
    const SeriesResult r = kummer_series(a, b, z, opts);
    if (!r.converged) {
        throw EvaluationError("log_kummer_m: series did not converge", a, b, z);
    }
    return std::log(r.value) + r.log_scale;
}

double kummer_ratio(double a1, double b1, double a2, double b2, double z,
                    const SeriesOptions& opts) {
    check_kummer_args(a1, b1, z, "kummer_ratio");
    check_kummer_args(a2, b2, z, "kummer_ratio");
    if (z == 0.0) {
        return 1.0;
    }
    double t1 = 1.0, s1 = 1.0;
    double t2 = 1.0, s2 = 1.0;
    bool done1 = false, done2 = false;
    std::size_t terms = 1;
    for (std::size_t i = 0; terms < opts.max_terms; ++i) {
        const double f1 = kummer_step(a1, b1, z, i, t1);
        const double f2 = kummer_step(a2, b2, z, i, t2);
        s1 += t1;
        s2 += t2;
        ++terms;
        if (std::max(s1, s2) > kRescaleAbove) {
            s1 *= kRescaleFactor;
            t1 *= kRescaleFactor;
            s2 *= kRescaleFactor;
            t2 *= kRescaleFactor;
        }
        done1 = f1 < 1.0 && t1 <= opts.rel_tol * s1;
        done2 = f2 < 1.0 && t2 <= opts.rel_tol * s2;
        if (done1 && done2) {
            return s1 / s2;
        }
    }
    throw EvaluationError("kummer_ratio: series did not converge", a1, b1, z);
}

double hyp0f1(double b, double z, const SeriesOptions& opts) {
    if (!(b > 0.0) || !(z >= 0.0) || !std::isfinite(z)) {
        throw DomainError("hyp0f1: need b > 0 and finite z >= 0, got b=" + std::to_string(b) +
                          ", z=" + std::to_string(z));
    }
    double term = 1.0;
    double sum = 1.0;
    if (z == 0.0) {
        return 1.0;
    }
    for (std::size_t j = 0; j + 1 < opts.max_terms; ++j) {
        const double dj = static_cast<double>(j);
        const double factor = z / ((b + dj) * (dj + 1.0));
        term *= factor;
        sum += term;
        if (factor < 1.0 && term <= opts.rel_tol * sum) {
            return sum;
        }
    }
    throw EvaluationError("hyp0f1: series did not converge", 0.0, b, z);
}

double bessel_i(double nu, double z, const SeriesOptions& opts) {
    if (!(nu >= -0.5)) {
        throw DomainError("bessel_i: nu must be >= -1/2, got " + std::to_string(nu));
    }
    if (!(z >= 0.0) || !std::isfinite(z)) {
        throw DomainError("bessel_i: z must be finite and >= 0, got " + std::to_string(z));
    }
    if (z == 0.0) {
        if (nu == 0.0) return 1.0;
        return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    const double half = 0.5 * z;
    const double quarter_sq = half * half;
    double term = std::exp(nu * std::log(half) - std::lgamma(nu + 1.0));
    double sum = term;
    for (std::size_t k = 0; k + 1 < opts.max_terms; ++k) {
        const double dk = static_cast<double>(k);
        const double factor = quarter_sq / ((dk + 1.0) * (nu + dk + 1.0));
        term *= factor;
        sum += term;
        if (factor < 1.0 && term <= opts.rel_tol * sum) {
            return sum;
        }
    }
    throw EvaluationError("bessel_i: series did not converge", nu, 0.0, z);
}

double langevin_mgf(double y_norm, double r, int p, const SeriesOptions& opts) {
    if (p < 1) {
        throw DomainError("langevin_mgf: p must be >= 1, got " + std::to_string(p));
    }
    if (!(y_norm >= 0.0) || !(r >= 0.0)) {
        throw DomainError("langevin_mgf: y_norm and r must be >= 0");
    }
    const double w = y_norm * r;
    return hyp0f1(0.5 * p, 0.25 * w * w, opts);
}

}  // namespace snr::specfun
