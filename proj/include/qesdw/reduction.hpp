#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "qesdw/potential.hpp"

namespace qesdw {

/// Parameters of the reduced operator obtained from the Schrödinger
/// equation by z = -sinh^2(x) and the power-prefactor ansatz:
///
///   [ (z^3 - (lambda+1)z^2 + lambda z) d^2/dz^2
///     + ((gamma+delta+epsilon)z^2 - (lambda gamma + gamma + lambda delta + epsilon)z
///        + lambda gamma) d/dz
///     + (alpha beta z - sigma) ] phi(z) = 0.
///
/// alpha and beta carry the energy through sqrt(-E) (principal branch, so
/// alpha - beta = sqrt(-E) >= 0 here); their sum and product are the
/// branch-independent quantities. gamma = 1/2 always, lambda = (1+g)/g > 1,
/// and sigma is the only coefficient containing v2.
struct ReducedCoefficients {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.5;
    double delta = 0.0;
    double epsilon = 0.0;
    double lambda = 0.0;
    double sigma = 0.0;
    double s = 0.0; // shape constant, = 2(alpha + beta)

    // drift polynomial Q(z) = q2 z^2 - q1 z + q0
    double drift_quadratic() const { return gamma + delta + epsilon; }
    double drift_linear() const { return lambda * gamma + gamma + lambda * delta + epsilon; }
    double drift_constant() const { return lambda * gamma; }
};

/// The reduced ODE as explicit polynomial data, coefficients lowest degree
/// first. P has regular singular points at exactly {0, 1, lambda}.
struct OdeOperator {
    std::array<double, 4> p; // z(z-1)(z-lambda)
    std::array<double, 3> q;
    std::array<double, 2> r; // {-sigma, alpha*beta}
};

/// Even wavefunction of the ansatz:
///   psi(x) = cosh(x)^e1 * (1 + g cosh^2 x)^e2 * sum_m a_m (-sinh^2 x)^m.
struct Wavefunction {
    double cosh_exponent = 0.0;    // (1/2)(1 + sqrt(1-4 v1))
    double bracket_exponent = 0.0; // (1/2)(1 - sqrt(1 + v3/(1+g)))
    double g = 1.0;
    std::vector<double> poly; // a_0 ... a_n, lowest degree first
};

/// s = 3 + sqrt(1-4 v1) - 2 sqrt(1 + v3/(1+g)). The energy-independent
/// combination entering alpha + beta = s/2 and the level energies.
inline double shape_constant(double v1, double v3, double g) {
    if (!(g > 0.0))
        throw std::domain_error("shape_constant: g must be > 0");
    const double rad1 = 1.0 - 4.0 * v1;
    const double rad3 = 1.0 + v3 / (1.0 + g);
    if (rad1 < 0.0 || rad3 < 0.0)
        throw std::domain_error("shape_constant: negative radicand (need v1 <= 1/4 and v3 >= -(1+g))");
    return 3.0 + std::sqrt(rad1) - 2.0 * std::sqrt(rad3);
}

/// Closed-form level energy E = -(2n + s/2)^2, the unique E <= 0 branch of
/// the series-termination condition at degree n.
inline double energy(int n, double v1, double v3, double g) {
    if (n < 0)
        throw std::invalid_argument("energy: n must be >= 0");
    const ValidityReport vr = validate(PotentialParams{v1, 0.0, v3, g});
    if (!vr.valid())
        throw std::domain_error("energy: parameters violate v1 < 1/4 or v3 > -(1+g)");
    const double s = shape_constant(v1, v3, g);
    const double root = 2.0 * n + 0.5 * s;
    return -root * root;
}

/// Populates all seven reduced coefficients for a bound-state trial energy
/// E <= 0. The identity epsilon = alpha + beta + 1 - gamma - delta holds by
/// construction.
inline ReducedCoefficients reduce(const PotentialParams& p, double energy) {
    if (energy > 0.0)
        throw std::domain_error("reduce: requires E <= 0");
    ReducedCoefficients rc;
    rc.s = shape_constant(p.v1, p.v3, p.g);
    const double root1 = std::sqrt(1.0 - 4.0 * p.v1);
    const double root3 = std::sqrt(1.0 + p.v3 / (1.0 + p.g));
    const double root_e = std::sqrt(-energy);
    rc.alpha = 0.25 * (rc.s + 2.0 * root_e);
    rc.beta = 0.25 * (rc.s - 2.0 * root_e);
    rc.gamma = 0.5;
    rc.delta = 1.0 + 0.5 * root1;
    rc.lambda = (1.0 + p.g) / p.g;
    const double gp1 = 1.0 + p.g; // = g*lambda
    rc.sigma = 0.25 * rc.lambda *
               (0.5 + 0.5 * root1 + 1.0 / rc.lambda - root3 / rc.lambda - p.v1 -
                p.v2 / gp1 - p.v3 / (gp1 * gp1) + energy);
    rc.epsilon = rc.alpha + rc.beta + 1.0 - rc.gamma - rc.delta;
    return rc;
}

inline OdeOperator ode_operator(const ReducedCoefficients& rc) {
    OdeOperator op;
    op.p = {0.0, rc.lambda, -(rc.lambda + 1.0), 1.0};
    op.q = {rc.drift_constant(), -rc.drift_linear(), rc.drift_quadratic()};
    op.r = {-rc.sigma, rc.alpha * rc.beta};
    return op;
}

inline Wavefunction assemble_wavefunction(const PotentialParams& p, std::vector<double> poly_coeffs) {
    if (poly_coeffs.empty())
        throw std::invalid_argument("assemble_wavefunction: empty polynomial");
    const double rad1 = 1.0 - 4.0 * p.v1;
    const double rad3 = 1.0 + p.v3 / (1.0 + p.g);
    if (rad1 < 0.0 || rad3 < 0.0)
        throw std::domain_error("assemble_wavefunction: negative exponent radicand");
    Wavefunction wf;
    wf.cosh_exponent = 0.5 * (1.0 + std::sqrt(rad1));
    wf.bracket_exponent = 0.5 * (1.0 - std::sqrt(rad3));
    wf.g = p.g;
    wf.poly = std::move(poly_coeffs);
    return wf;
}

/// psi(x). Direct evaluation for |x| <= 30; log-magnitude beyond, where
/// cosh^2 would overflow (excited states grow like cosh^(2n) there).
inline double evaluate_wavefunction(const Wavefunction& wf, double x) {
    const double ax = std::abs(x);
    if (ax <= 30.0) {
        const double c = std::cosh(x);
        const double sh2 = std::sinh(x) * std::sinh(x);
        const double z = -sh2;
        double poly = 0.0;
        for (std::size_t i = wf.poly.size(); i-- > 0;)
            poly = poly * z + wf.poly[i];
        return std::pow(c, wf.cosh_exponent) * std::pow(1.0 + wf.g * c * c, wf.bracket_exponent) * poly;
    }
    // log cosh and friends; u = sech^2 is ~1e-26 or smaller out here
    const double u = sech_squared(x);
    const double log_cosh = ax - std::log(2.0) + std::log1p(std::exp(-2.0 * ax));
    const double log_bracket = std::log(wf.g) + 2.0 * log_cosh + std::log1p(u / wf.g);
    const double log_abs_z = 2.0 * log_cosh + std::log1p(-u); // z = -cosh^2 (1 - u)
    const double inv_z = -std::exp(-log_abs_z);
    // poly(z) = z^deg * t, t evaluated by Horner in 1/z
    const std::size_t deg = wf.poly.size() - 1;
    double t = 0.0;
    for (std::size_t i = 0; i <= deg; ++i)
        t = t * inv_z + wf.poly[i];
    if (t == 0.0)
        return 0.0;
    const double log_mag = wf.cosh_exponent * log_cosh + wf.bracket_exponent * log_bracket +
                           static_cast<double>(deg) * log_abs_z + std::log(std::abs(t));
    double sign = (t > 0.0) ? 1.0 : -1.0;
    if (deg % 2 == 1)
        sign = -sign; // z < 0
    return sign * std::exp(log_mag);
}

} // namespace qesdw
