#pragma once

namespace snr {

/// Canonical model X ~ N_p(theta, sigma^2 I_p), S^2 ~ sigma^2 chi^2_k, with
/// the constraint ||theta|| / sigma <= m.
struct Problem {
    int p = 1;
    int k = 1;
    double m = 1.0;

    Problem() = default;
    /// Throws ConfigurationError unless p >= 1, k >= 1 and m > 0.
    Problem(int p_, int k_, double m_);

    void validate() const;

    /// p + k, the exponent bound for l.
    int dof() const noexcept { return p + k; }
};

}  // namespace snr
