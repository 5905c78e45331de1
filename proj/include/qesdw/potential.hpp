#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qesdw {

/// Couplings of the hyperbolic double-well potential
///   V(x) = v1/cosh^2(x) + v2/(1 + g cosh^2(x)) + v3/(1 + g cosh^2(x))^2
/// in atomic units (hbar = m = c = 1). The shape parameter g must be > 0.
struct PotentialParams {
    double v1 = 0.0;
    double v2 = 0.0;
    double v3 = 0.0;
    double g = 1.0;
};

/// sech^2 / sech^4 couplings of the large-g limit.
struct ManningParams {
    double v4 = 0.0;
    double v5 = 0.0;
};

struct ValidityReport {
    bool v1_ok = false;     // v1 < 1/4
    bool v3_ok = false;     // v3 > -(1+g)
    double v1_margin = 0.0; // 1/4 - v1
    double v3_margin = 0.0; // v3 + (1+g)
    bool valid() const { return v1_ok && v3_ok; }
};

struct GridSample {
    std::vector<double> x;
    std::vector<double> v;
};

/// sech^2, exact for all finite x. The cutoff avoids cosh^2 overflow:
/// cosh(30)^2 ~ 1e26 is fine, cosh(400)^2 is not.
inline double sech_squared(double x) {
    const double ax = std::abs(x);
    if (ax > 30.0) {
        const double e = std::exp(-2.0 * ax);
        return 4.0 * e / ((1.0 + e) * (1.0 + e));
    }
    const double c = std::cosh(x);
    return 1.0 / (c * c);
}

/// V(x). With u = sech^2(x), 1 + g cosh^2(x) = (g + u)/u, so
/// V = v1*u + v2*w + v3*w^2 where w = u/(g+u). No overflow for any x.
inline double evaluate(const PotentialParams& p, double x) {
    const double u = sech_squared(x);
    const double w = u / (p.g + u);
    return p.v1 * u + p.v2 * w + p.v3 * w * w;
}

/// Large-g limit: v4 = v1 + v2/g, v5 = v3/g^2.
inline ManningParams manning_limit(const PotentialParams& p) {
    if (!(p.g > 0.0))
        throw std::domain_error("manning_limit: g must be > 0");
    return {p.v1 + p.v2 / p.g, p.v3 / (p.g * p.g)};
}

/// Checks the real-spectrum conditions v1 < 1/4 and v3 > -(1+g).
/// This is a report, not a gate: callers may still evaluate V outside
/// the valid region.
inline ValidityReport validate(const PotentialParams& p) {
    if (!(p.g > 0.0))
        throw std::invalid_argument("validate: g must be > 0");
    ValidityReport r;
    r.v1_margin = 0.25 - p.v1;
    r.v3_margin = p.v3 + (1.0 + p.g);
    r.v1_ok = p.v1 < 0.25;
    r.v3_ok = p.v3 > -(1.0 + p.g);
    return r;
}

/// Uniform samples of V on [x_min, x_max]. The node formula is symmetric
/// in (i, n-1-i), so a grid with x_min = -x_max is palindromic exactly.
inline GridSample sample_grid(const PotentialParams& p, double x_min, double x_max, int n_points) {
    if (n_points < 2)
        throw std::invalid_argument("sample_grid: need n_points >= 2");
    if (!(x_min < x_max))
        throw std::invalid_argument("sample_grid: need x_min < x_max");
    GridSample out;
    out.x.reserve(static_cast<std::size_t>(n_points));
    out.v.reserve(static_cast<std::size_t>(n_points));
    const double denom = static_cast<double>(n_points - 1);
    for (int i = 0; i < n_points; ++i) {
        const double xi = (x_min * (denom - i) + x_max * i) / denom;
        out.x.push_back(xi);
        out.v.push_back(evaluate(p, xi));
    }
    return out;
}

} // namespace qesdw
