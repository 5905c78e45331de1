#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qesdw/lie.hpp"
#include "qesdw/reduction.hpp"

namespace qesdw {

using Complex = std::complex<double>;

/// One solution of the coupled root equations
///   -sum_{j != k} 2/(z_k - z_j) - gamma/z_k - delta/(z_k - 1) - epsilon/(z_k - lambda) = 0.
/// Roots are kept sorted by (real, imag). v2 is filled by the extraction
/// step; is_physical requires a conjugation-closed root set and a real v2.
struct BetheState {
    int n = 0;
    std::vector<Complex> roots;
    double residual = 0.0;
    double v2 = std::numeric_limits<double>::quiet_NaN();
    double v2_imag = 0.0;
    bool conjugation_closed = false;
    bool is_physical = false;
};

struct SolveReport {
    std::vector<BetheState> solutions;
    int starts_attempted = 0;
    int starts_converged = 0;
    int starts_failed = 0;
};

/// Multistart policy. The seed sequence is a deterministic function of n,
/// so repeated runs produce identical reports.
struct MultistartOptions {
    int grid_starts = 140;    // real tuples in (0,1) u (1,lambda) u (lambda, 4 lambda)
    int circle_starts = 100;  // conjugate pairs on circles around the centroid of {0,1,lambda}
    bool warm_starts = true;  // polynomial roots from the algebraic route
    int max_iterations = 120;
    double accept_residual = 1e-10;
    double dedup_tolerance = 1e-6;
};

struct V2Extraction {
    double value = 0.0;
    double imag_part = 0.0; // leftover imaginary part before discarding
    bool is_real = false;   // |imag_part| < 1e-8
};

/// Level report: closed-form energy plus every root configuration found.
struct QesLevel {
    int n = 0;
    double energy = 0.0;
    SolveReport report;
};

namespace detail {

struct BaeContext {
    double gamma, delta, epsilon, lambda;
};

inline BaeContext bae_context(const ReducedCoefficients& rc) {
    return {rc.gamma, rc.delta, rc.epsilon, rc.lambda};
}

constexpr double kSingularGuard = 1e-12;

inline bool configuration_ok(std::span<const Complex> z, const BaeContext& c) {
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (!std::isfinite(z[k].real()) || !std::isfinite(z[k].imag()))
            return false;
        if (std::abs(z[k]) < kSingularGuard || std::abs(z[k] - 1.0) < kSingularGuard ||
            std::abs(z[k] - c.lambda) < kSingularGuard)
            return false;
        for (std::size_t j = k + 1; j < z.size(); ++j)
            if (std::abs(z[k] - z[j]) < kSingularGuard)
                return false;
    }
    return true;
}

inline std::vector<Complex> residual_unchecked(std::span<const Complex> z, const BaeContext& c) {
    std::vector<Complex> f(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j)
            if (j != k)
                acc -= 2.0 / (z[k] - z[j]);
        acc -= c.gamma / z[k];
        acc -= c.delta / (z[k] - 1.0);
        acc -= c.epsilon / (z[k] - c.lambda);
        f[k] = acc;
    }
    return f;
}

inline double max_abs(std::span<const Complex> v) {
    double m = 0.0;
    for (const auto& x : v)
        m = std::max(m, std::abs(x));
    return m;
}

inline Eigen::MatrixXcd jacobian(std::span<const Complex> z, const BaeContext& c) {
    const auto n = static_cast<Eigen::Index>(z.size());
    Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Complex diag = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == k)
                continue;
            const Complex d = z[static_cast<std::size_t>(k)] - z[static_cast<std::size_t>(j)];
            const Complex w = 2.0 / (d * d);
            diag += w;
            jac(k, j) = -w;
        }
        const Complex zk = z[static_cast<std::size_t>(k)];
        diag += c.gamma / (zk * zk);
        diag += c.delta / ((zk - 1.0) * (zk - 1.0));
        diag += c.epsilon / ((zk - c.lambda) * (zk - c.lambda));
        jac(k, k) = diag;
    }
    return jac;
}

/// Damped Newton from one seed. Returns the converged configuration, or
/// nothing if the iteration stalls, diverges, or hits a singular set.
inline std::optional<std::vector<Complex>> newton_from(std::vector<Complex> z, const BaeContext& c,
                                                       int max_iterations) {
    if (!configuration_ok(z, c))
        return std::nullopt;
    std::vector<Complex> f = residual_unchecked(z, c);
    double fnorm = max_abs(f);
    const double diverged = 1e9 * std::max(1.0, c.lambda);
    for (int iter = 0; iter < max_iterations; ++iter) {
        if (fnorm < 1e-14)
            break;
        const auto dim = static_cast<Eigen::Index>(z.size());
        Eigen::VectorXcd rhs(dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            rhs(i) = -f[static_cast<std::size_t>(i)];
        const Eigen::VectorXcd step = jacobian(z, c).partialPivLu().solve(rhs);
        if (!step.allFinite())
            return std::nullopt;
        bool accepted = false;
        double t = 1.0;
        for (int halving = 0; halving < 10; ++halving, t *= 0.5) {
            std::vector<Complex> trial = z;
            for (Eigen::Index i = 0; i < dim; ++i)
                trial[static_cast<std::size_t>(i)] += t * step(i);
            if (!configuration_ok(trial, c))
                continue;
            const std::vector<Complex> ftrial = residual_unchecked(trial, c);
            const double fnew = max_abs(ftrial);
            if (fnew < fnorm || (t == 1.0 && fnew < 10.0 * fnorm && fnorm > 1e-2)) {
                z = std::move(trial);
                f = ftrial;
                fnorm = fnew;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break; // stalled; the residual decides below (it may sit at the noise floor)
        for (const auto& zk : z)
            if (std::abs(zk) > diverged)
                return std::nullopt;
    }
    if (fnorm > 1e-10)
        return std::nullopt;
    return z;
}

inline void sort_roots(std::vector<Complex>& roots) {
    std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real())
            return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

/// Set equality up to permutation: greedy matching is safe because distinct
/// solutions differ by far more than the tolerance while sort order can flip
/// between near-identical configurations.
inline bool same_configuration(std::span<const Complex> a, std::span<const Complex> b, double tol) {
    if (a.size() != b.size())
        return false;
    double scale = 1.0;
    for (const auto& z : a)
        scale = std::max(scale, std::abs(z));
    std::vector<bool> used(b.size(), false);
    for (const auto& za : a) {
        bool found = false;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!used[j] && std::abs(za - b[j]) <= tol * scale) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found)
            return false;
    }
    return true;
}

inline bool conjugation_closed(std::span<const Complex> roots, double tol) {
    double scale = 1.0;
    for (const auto& z : roots)
        scale = std::max(scale, std::abs(z));
    std::vector<bool> used(roots.size(), false);
    for (std::size_t k = 0; k < roots.size(); ++k) {
        const Complex want = std::conj(roots[k]);
        bool found = false;
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (used[j])
                continue;
            if (std::abs(roots[j] - want) <= tol * scale) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found)
            return false;
    }
    return true;
}

/// BetheState invariants: roots pairwise distinct (relative to the largest
/// root) and away from the singular points 0, 1, lambda.
inline bool state_invariants_ok(std::span<const Complex> roots, const BaeContext& c) {
    double scale = 0.0;
    for (const auto& z : roots)
        scale = std::max(scale, std::abs(z));
    for (std::size_t k = 0; k < roots.size(); ++k) {
        if (std::abs(roots[k]) < 1e-8 || std::abs(roots[k] - 1.0) < 1e-8 ||
            std::abs(roots[k] - c.lambda) < 1e-8)
            return false;
        for (std::size_t j = k + 1; j < roots.size(); ++j)
            if (std::abs(roots[k] - roots[j]) < 1e-8 * std::max(scale, 1.0))
                return false;
    }
    return true;
}

} // namespace detail

/// Left-hand sides of the root equations at the given configuration.
/// Throws if any denominator is below the singular guard.
inline std::vector<Complex> bae_residual(std::span<const Complex> roots,
                                         const ReducedCoefficients& rc) {
    const detail::BaeContext c = detail::bae_context(rc);
    if (!detail::configuration_ok(roots, c))
        throw std::domain_error("bae_residual: root configuration touches a singular point");
    return detail::residual_unchecked(roots, c);
}

/// Both branches of the closed-form n = 1 root
///   z1 = (lambda delta + lambda gamma + gamma + epsilon +- sqrt(disc)) / (2(gamma+delta+epsilon)),
///   disc = (lambda-1)^2 gamma^2 + 2(lambda-1)(lambda delta - epsilon) gamma + (lambda delta + epsilon)^2.
inline std::array<Complex, 2> n1_closed_form(const ReducedCoefficients& rc) {
    const double den = 2.0 * (rc.gamma + rc.delta + rc.epsilon);
    if (std::abs(den) < 1e-12)
        throw std::domain_error("n1_closed_form: gamma + delta + epsilon is (numerically) zero");
    const double lam = rc.lambda;
    const double num = lam * rc.delta + lam * rc.gamma + rc.gamma + rc.epsilon;
    const double disc = (lam - 1.0) * (lam - 1.0) * rc.gamma * rc.gamma +
                        2.0 * (lam - 1.0) * (lam * rc.delta - rc.epsilon) * rc.gamma +
                        (lam * rc.delta + rc.epsilon) * (lam * rc.delta + rc.epsilon);
    const Complex root = std::sqrt(Complex(disc, 0.0));
    return {(num + root) / den, (num - root) / den};
}

/// Rearranges the parameter constraint for v2. sigma enters linearly through
/// -v2/(g lambda) with g lambda = 1+g; the root sum fixes sigma as
///   sigma = (2(n-1) + q2) sum_k z_k - n(n-1)(lambda+1) - n q1.
inline V2Extraction v2_from_roots(int n, std::span<const Complex> roots, double v1, double v3,
                                  double g, double e_level) {
    const ReducedCoefficients rc = reduce(PotentialParams{v1, 0.0, v3, g}, e_level);
    Complex root_sum = 0.0;
    for (const auto& z : roots)
        root_sum += z;
    const Complex sigma = (2.0 * (n - 1) + rc.drift_quadratic()) * root_sum -
                          static_cast<double>(n * (n - 1)) * (rc.lambda + 1.0) -
                          n * rc.drift_linear();
    // v2_from_sigma is affine with slope -4g; apply it to the complex sigma
    const double at_zero = v2_from_sigma(0.0, v1, v3, g, e_level);
    const Complex v2 = at_zero - 4.0 * g * sigma;
    V2Extraction out;
    out.value = v2.real();
    out.imag_part = v2.imag();
    out.is_real = std::abs(v2.imag()) < 1e-8;
    return out;
}

/// Electrostatic interpretation of the root equations: n unit charges at the
/// z_k with pair repulsion and three fixed charges gamma, delta, epsilon at
/// 0, 1, lambda. Principal-branch logarithms; the pair sum runs over
/// unordered pairs so that dU/dz_k reproduces the root equations exactly.
struct ElectrostaticEnergy {
    Complex value{0.0, 0.0};
    bool branch_cut_warning = false; // some log argument within 1e-6 of the cut
};

inline ElectrostaticEnergy electrostatic_energy(std::span<const Complex> roots,
                                                const ReducedCoefficients& rc) {
    const detail::BaeContext c = detail::bae_context(rc);
    if (!detail::configuration_ok(roots, c))
        throw std::domain_error("electrostatic_energy: root configuration touches a singular point");
    ElectrostaticEnergy out;
    auto near_cut = [](const Complex& w) { return w.real() < 0.0 && std::abs(w.imag()) < 1e-6; };
    for (std::size_t k = 0; k < roots.size(); ++k) {
        for (std::size_t j = k + 1; j < roots.size(); ++j) {
            const Complex d = roots[k] - roots[j];
            out.value -= 2.0 * std::log(d);
            out.branch_cut_warning |= near_cut(d);
        }
        const Complex z0 = roots[k];
        const Complex z1 = roots[k] - 1.0;
        const Complex zl = roots[k] - c.lambda;
        out.value -= c.gamma * std::log(z0) + c.delta * std::log(z1) + c.epsilon * std::log(zl);
        out.branch_cut_warning |= near_cut(z0) || near_cut(z1) || near_cut(zl);
    }
    return out;
}

/// Multistart damped Newton over the n coupled root equations. Returns every
/// distinct converged configuration with residual below the acceptance
/// threshold; an empty solution list is a legal outcome (reported via the
/// start counters), not an error.
inline SolveReport solve_bae(int n, const ReducedCoefficients& rc,
                             const MultistartOptions& opts = {}) {
    if (n < 0)
        throw std::invalid_argument("solve_bae: n must be >= 0");
    SolveReport report;
    if (n == 0) {
        // phi_0 = 1; nothing to solve
        BetheState st;
        st.n = 0;
        st.conjugation_closed = true;
        report.solutions.push_back(std::move(st));
        return report;
    }
    const detail::BaeContext c = detail::bae_context(rc);
    const double lam = rc.lambda;
    const double scale = std::max(1.0, lam);

    std::vector<std::vector<Complex>> seeds;
    std::mt19937 rng(0x51e2b7a5u + 1000003u * static_cast<unsigned>(n));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto real_point = [&]() {
        const int interval = static_cast<int>(rng() % 3u);
        const double t = 0.02 + 0.96 * unit(rng);
        if (interval == 0)
            return t;
        if (interval == 1)
            return 1.0 + t * (lam - 1.0);
        return lam + t * 3.0 * lam;
    };
    for (int s = 0; s < opts.grid_starts; ++s) {
        std::vector<Complex> seed(static_cast<std::size_t>(n));
        for (auto& z : seed)
            z = real_point();
        seeds.push_back(std::move(seed));
    }
    const double centroid = (0.0 + 1.0 + lam) / 3.0;
    for (int s = 0; s < opts.circle_starts; ++s) {
        std::vector<Complex> seed;
        seed.reserve(static_cast<std::size_t>(n));
        int remaining = n;
        if (n % 2 == 1) {
            // odd root goes on the circle's real axis, alternating side to
            // also cover configurations far on the negative axis
            const double r = scale * std::exp(std::log(0.05) + unit(rng) * std::log(30.0 / 0.05));
            seed.push_back(centroid + ((s % 2 == 0) ? r : -r));
            --remaining;
        }
        for (int p = 0; p < remaining / 2; ++p) {
            const double r = scale * std::exp(std::log(0.05) + unit(rng) * std::log(30.0 / 0.05));
            const double theta = (0.05 + 0.9 * unit(rng)) * 3.14159265358979323846;
            const Complex zp = centroid + r * Complex(std::cos(theta), std::sin(theta));
            seed.push_back(zp);
            seed.push_back(std::conj(zp));
        }
        seeds.push_back(std::move(seed));
    }
    if (opts.warm_starts) {
        const QesMatrix qm = direct_matrix(n, rc);
        for (const Complex& sigma : polynomial_roots(characteristic_polynomial(qm))) {
            if (!is_near_real(sigma))
                continue;
            const std::vector<double> a = expansion_coefficients(n, rc, sigma.real());
            std::vector<Complex> roots = polynomial_roots(a);
            if (roots.size() == static_cast<std::size_t>(n))
                seeds.push_back(std::move(roots));
        }
    }

    for (auto& seed : seeds) {
        ++report.starts_attempted;
        auto converged = detail::newton_from(std::move(seed), c, opts.max_iterations);
        if (!converged) {
            ++report.starts_failed;
            continue;
        }
        ++report.starts_converged;
        std::vector<Complex> roots = std::move(*converged);
        if (!detail::state_invariants_ok(roots, c))
            continue;
        detail::sort_roots(roots);
        bool duplicate = false;
        for (const auto& known : report.solutions)
            if (detail::same_configuration(known.roots, roots, opts.dedup_tolerance)) {
                duplicate = true;
                break;
            }
        if (duplicate)
            continue;
        BetheState st;
        st.n = n;
        st.residual = detail::max_abs(detail::residual_unchecked(roots, c));
        if (st.residual > opts.accept_residual)
            continue;
        st.conjugation_closed = detail::conjugation_closed(roots, 1e-7);
        st.roots = std::move(roots);
        report.solutions.push_back(std::move(st));
    }
    std::sort(report.solutions.begin(), report.solutions.end(),
              [](const BetheState& a, const BetheState& b) {
                  for (std::size_t i = 0; i < std::min(a.roots.size(), b.roots.size()); ++i) {
                      if (a.roots[i].real() != b.roots[i].real())
                          return a.roots[i].real() < b.roots[i].real();
                      if (a.roots[i].imag() != b.roots[i].imag())
                          return a.roots[i].imag() < b.roots[i].imag();
                  }
                  return a.roots.size() < b.roots.size();
              });
    return report;
}

/// End-to-end level solve on the Bethe route: fixes E, solves the root
/// equations, and extracts v2 for every solution (physical or not).
inline QesLevel solve_level(int n, double v1, double v3, double g,
                            const MultistartOptions& opts = {}) {
    QesLevel level;
    level.n = n;
    level.energy = energy(n, v1, v3, g);
    const ReducedCoefficients rc = reduce(PotentialParams{v1, 0.0, v3, g}, level.energy);
    level.report = solve_bae(n, rc, opts);
    for (BetheState& st : level.report.solutions) {
        const V2Extraction ext = v2_from_roots(n, st.roots, v1, v3, g, level.energy);
        st.v2 = ext.value;
        st.v2_imag = ext.imag_part;
        st.is_physical = st.conjugation_closed && ext.is_real;
    }
    return level;
}

} // namespace qesdw
