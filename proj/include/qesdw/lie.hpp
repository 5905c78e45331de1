#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qesdw/poly.hpp"
#include "qesdw/reduction.hpp"

namespace qesdw {

/// sl(2) generators restricted to the invariant space span{1, z, ..., z^n},
/// as (n+1)x(n+1) matrices on monomial coefficients:
///   raising * z^m = (n-m) z^(m+1),  weight * z^m = (m - n/2) z^m,
///   lowering * z^m = m z^(m-1).
struct GeneratorSet {
    Eigen::MatrixXd raising;  // J+
    Eigen::MatrixXd weight;   // J0
    Eigen::MatrixXd lowering; // J-
};

inline GeneratorSet generator_matrices(int n) {
    if (n < 0)
        throw std::invalid_argument("generator_matrices: n must be >= 0");
    const Eigen::Index dim = n + 1;
    GeneratorSet gen{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim),
                     Eigen::MatrixXd::Zero(dim, dim)};
    for (Eigen::Index m = 0; m < dim; ++m) {
        if (m + 1 < dim)
            gen.raising(m + 1, m) = static_cast<double>(n - m);
        gen.weight(m, m) = static_cast<double>(m) - 0.5 * n;
        if (m > 0)
            gen.lowering(m - 1, m) = static_cast<double>(m);
    }
    return gen;
}

/// Tridiagonal matrix of the reduced operator on span{1, ..., z^n} after the
/// series-termination substitution alpha*beta = -n(n-1) - n(gamma+delta+epsilon).
/// Row k couples a_{k-1}, a_k, a_{k+1}:
///   sub[k-1]  = A_k = (k-1)(k-2) - n(n-1) + (k-1-n)(gamma+delta+epsilon)
///   diag_base[k] = b_k = -k(k-1)(lambda+1) - k(lambda gamma + gamma + lambda delta + epsilon)
///   super[k]  = C_k = k(k+1) lambda + (k+1) lambda gamma
/// The spectral unknown sigma sits on the diagonal as b_k - sigma.
struct QesMatrix {
    int n = 0;
    std::vector<double> sub;       // A_k for k = 1..n
    std::vector<double> diag_base; // b_k for k = 0..n
    std::vector<double> super;     // C_k for k = 0..n-1

    Eigen::MatrixXd dense(double sigma) const {
        const Eigen::Index dim = n + 1;
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            m(k, k) = diag_base[static_cast<std::size_t>(k)] - sigma;
            if (k > 0)
                m(k, k - 1) = sub[static_cast<std::size_t>(k - 1)];
            if (k + 1 < dim)
                m(k, k + 1) = super[static_cast<std::size_t>(k)];
        }
        return m;
    }
};

/// One row of the three-term recurrence A_m a_{m-1} + (b_m - sigma) a_m + C_m a_{m+1} = 0.
struct RecurrenceTerm {
    double sub = 0.0;       // A_m
    double diag_base = 0.0; // b_m
    double super = 0.0;     // C_m
};

inline RecurrenceTerm recurrence_coefficients(int m, int n, const ReducedCoefficients& rc) {
    if (m < 0 || m > n + 1)
        throw std::out_of_range("recurrence_coefficients: need 0 <= m <= n+1");
    const double q2 = rc.drift_quadratic();
    const double q1 = rc.drift_linear();
    RecurrenceTerm t;
    t.sub = static_cast<double>((m - 1) * (m - 2) - n * (n - 1)) + (m - 1 - n) * q2;
    t.diag_base = -static_cast<double>(m * (m - 1)) * (rc.lambda + 1.0) - m * q1;
    t.super = static_cast<double>(m * (m + 1)) * rc.lambda + (m + 1) * rc.lambda * rc.gamma;
    return t;
}

inline QesMatrix direct_matrix(int n, const ReducedCoefficients& rc) {
    if (n < 0)
        throw std::invalid_argument("direct_matrix: n must be >= 0");
    QesMatrix qm;
    qm.n = n;
    qm.diag_base.resize(static_cast<std::size_t>(n) + 1);
    qm.sub.resize(static_cast<std::size_t>(n));
    qm.super.resize(static_cast<std::size_t>(n));
    for (int k = 0; k <= n; ++k) {
        const RecurrenceTerm t = recurrence_coefficients(k, n, rc);
        qm.diag_base[static_cast<std::size_t>(k)] = t.diag_base;
        if (k >= 1)
            qm.sub[static_cast<std::size_t>(k - 1)] = t.sub;
        if (k < n)
            qm.super[static_cast<std::size_t>(k)] = t.super;
    }
    return qm;
}

/// Residual of the series-termination (quasi-solvability) condition for the
/// energy baked into rc: alpha*beta + n(n-1) + n(gamma+delta+epsilon).
inline double termination_residual(int n, const ReducedCoefficients& rc) {
    return rc.alpha * rc.beta + static_cast<double>(n * (n - 1)) + n * rc.drift_quadratic();
}

/// The reduced operator as the quadratic sl(2) combination
///   -J+J0 + (lambda+1) J+J- + lambda J0J- + ... (linear terms and a constant)
/// evaluated as matrices. Equals direct_matrix(n, rc).dense(rc.sigma)
/// entrywise; the undetermined coefficient of J0J- is lambda, the unique
/// value reproducing the lambda z d^2/dz^2 term.
inline Eigen::MatrixXd qes_hamiltonian(int n, const ReducedCoefficients& rc) {
    if (std::abs(termination_residual(n, rc)) > 1e-8)
        throw std::domain_error("qes_hamiltonian: quasi-solvability condition violated for this n and E");
    const GeneratorSet gen = generator_matrices(n);
    const double q2 = rc.drift_quadratic();
    const double q1 = rc.drift_linear();
    const double lam = rc.lambda;
    const Eigen::Index dim = n + 1;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    return -gen.raising * gen.weight + (lam + 1.0) * gen.raising * gen.lowering +
           lam * gen.weight * gen.lowering + ((1.0 - 1.5 * n) - q2) * gen.raising +
           (-q1 - n * (lam + 1.0)) * gen.weight + (lam * rc.gamma + 0.5 * n * lam) * gen.lowering +
           (-rc.sigma - 0.5 * n * q1 - 0.5 * n * n * (lam + 1.0)) * id;
}

/// Characteristic polynomial det(T0 - sigma I) in sigma, lowest degree
/// first, via the tridiagonal continuant
///   D_{k+1} = (b_k - sigma) D_k - A_k C_{k-1} D_{k-1}.
inline std::vector<double> characteristic_polynomial(const QesMatrix& qm) {
    std::vector<double> prev{1.0};                                    // D_0
    std::vector<double> cur{qm.diag_base[0], -1.0};                   // D_1
    for (int k = 1; k <= qm.n; ++k) {
        std::vector<double> next(cur.size() + 1, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            next[i] += qm.diag_base[static_cast<std::size_t>(k)] * cur[i];
            next[i + 1] -= cur[i];
        }
        const double offdiag = qm.sub[static_cast<std::size_t>(k - 1)] *
                               qm.super[static_cast<std::size_t>(k - 1)];
        for (std::size_t i = 0; i < prev.size(); ++i)
            next[i] -= offdiag * prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// det(T0 - sigma I) evaluated at one (possibly complex) sigma.
inline std::complex<double> characteristic_value(const QesMatrix& qm, std::complex<double> sigma) {
    std::complex<double> prev = 1.0;
    std::complex<double> cur = qm.diag_base[0] - sigma;
    for (int k = 1; k <= qm.n; ++k) {
        const std::complex<double> next =
            (qm.diag_base[static_cast<std::size_t>(k)] - sigma) * cur -
            qm.sub[static_cast<std::size_t>(k - 1)] * qm.super[static_cast<std::size_t>(k - 1)] * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Near-real acceptance used when reporting sigma roots and v2 extractions.
inline bool is_near_real(std::complex<double> z, double tol = 1e-8) {
    return std::abs(z.imag()) <= tol * (1.0 + std::abs(z.real()));
}

/// The n+1 admissible sigma values at level n: roots of det(T0 - sigma I),
/// sorted ascending by real part (then imaginary part). Roots with a
/// non-negligible imaginary part are returned as-is; callers flag them via
/// is_near_real rather than dropping them.
inline std::vector<std::complex<double>> sigma_spectrum(int n, double v1, double v3, double g) {
    const double e_level = energy(n, v1, v3, g);
    const ReducedCoefficients rc = reduce(PotentialParams{v1, 0.0, v3, g}, e_level);
    const QesMatrix qm = direct_matrix(n, rc);
    const std::vector<double> charpoly = characteristic_polynomial(qm);
    std::vector<std::complex<double>> roots = polynomial_roots(charpoly);
    if (roots.size() != static_cast<std::size_t>(n) + 1)
        throw std::runtime_error("sigma_spectrum: lost roots of the characteristic polynomial");
    return roots;
}

/// Inverts the linear-in-v2 definition of sigma:
///   v2 = (1+g) [ 1/2 + (1/2)sqrt(1-4v1) + 1/lambda - (1/lambda)sqrt(1+v3/(1+g))
///                - v1 - v3/(1+g)^2 + E ] - 4 g sigma.
/// Affine in sigma with slope -4(1+g)/lambda = -4g exactly.
inline double v2_from_sigma(double sigma, double v1, double v3, double g, double e_level) {
    const double gp1 = 1.0 + g;
    const double lam = gp1 / g;
    const double c0 = 0.5 + 0.5 * std::sqrt(1.0 - 4.0 * v1) + 1.0 / lam -
                      std::sqrt(1.0 + v3 / gp1) / lam - v1 - v3 / (gp1 * gp1) + e_level;
    return gp1 * c0 - 4.0 * g * sigma;
}

/// Forward three-term recurrence from a_0 = 1 at a given sigma; returns
/// a_0..a_n. For sigma in sigma_spectrum the row n is consistent and row
/// n+1 vanishes identically (A_{n+1} = 0).
inline std::vector<double> expansion_coefficients(int n, const ReducedCoefficients& rc, double sigma) {
    std::vector<double> a(static_cast<std::size_t>(n) + 1);
    a[0] = 1.0;
    for (int k = 0; k < n; ++k) {
        const RecurrenceTerm t = recurrence_coefficients(k, n, rc);
        const double am1 = (k >= 1) ? a[static_cast<std::size_t>(k - 1)] : 0.0;
        a[static_cast<std::size_t>(k + 1)] =
            -(t.sub * am1 + (t.diag_base - sigma) * a[static_cast<std::size_t>(k)]) / t.super;
    }
    return a;
}

struct ConstraintResidual {
    double residual = 0.0;
    double scale = 0.0; // sum of |term| over the polynomial terms
    double relative() const { return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual); }
};

/// Regression check against the explicit constraint polynomials for the
/// first (n=1) and second (n=2) excited levels. The explicit polynomials
/// embed sqrt(25 + 20 v3) and are valid only at g = 1/4.
inline ConstraintResidual constraint_polynomial_check(int n, double e_level, double v1, double v2,
                                                      double v3, double g) {
    if (g != 0.25)
        throw std::invalid_argument("constraint_polynomial_check: supported only at g = 1/4");
    if (n != 1 && n != 2)
        throw std::invalid_argument("constraint_polynomial_check: polynomial known only for n = 1, 2");
    const double r1 = std::sqrt(1.0 - 4.0 * v1);
    const double r2 = std::sqrt(25.0 + 20.0 * v3);
    const double e = e_level;
    std::vector<double> terms;
    if (n == 1) {
        terms = {
            (-300.0 * e + 300.0 * v1 + 240.0 * v2 + 192.0 * v3 - 250.0 * r1 - 970.0) * r2,
            (3750.0 * e - 3750.0 * v1 - 3000.0 * v2 - 2400.0 * v3 + 8125.0) * r1,
            (-2500.0 * e + 2000.0 * v2 + 1600.0 * v3 - 17000.0) * v1,
            (-2000.0 * e + 1280.0 * v3 - 8600.0) * v2,
            (-1600.0 * e - 6680.0) * v3,
            1250.0 * e * e,
            10750.0 * e,
            13725.0,
            1250.0 * v1 * v1,
            800.0 * v2 * v2,
            512.0 * v3 * v3,
        };
    } else {
        terms = {
            -125.0 / 64.0 * e * e * e,
            (375.0 / 64.0 * v1 - 8325.0 / 128.0 + 75.0 / 64.0 * r2 + 75.0 / 16.0 * v2 +
             15.0 / 4.0 * v3 - 1875.0 / 128.0 * r1) * e * e,
            e / 16000.0 * (-150000.0 * v2 - 120000.0 * v3 + 3925000.0) * v1,
            e / 16000.0 * (375000.0 * v2 + 468750.0 * v1 + 300000.0 * v3 - 3903125.0) * r1,
            e / 16000.0 * (-30000.0 * v2 - 37500.0 * v1 - 24000.0 * v3 + 376250.0 + 73750.0 * r1) * r2,
            (-15.0 / 4.0 * v2 * v2 + (-96000.0 * v3 + 1665000.0) / 16000.0 * v2 -
             375.0 / 64.0 * v1 * v1 + 1273.0 / 16.0 * v3 - 12.0 / 5.0 * v3 * v3 - 72365.0 / 128.0) * e,
            -32895.0 / 32.0,
            (30720.0 * v3 * v3 - 1018400.0 * v3 + 7236500.0) / 16000.0 * v2,
            r2 / 16000.0 * ((426625.0 - 73750.0 * v1 - 59000.0 * v2 - 47200.0 * v3) * r1 +
                            12000.0 * v2 * v2 + 18750.0 * v1 * v1),
            ((30000.0 * v2 + 24000.0 * v3 - 545000.0) * v1 + 7680.0 * v3 * v3 - 239000.0 * v3) /
                16000.0 * r2,
            ((19200.0 * v3 - 301000.0) * v2 + 1174625.0) / 16000.0 * r2,
            (-234375.0 * v1 * v1 + (-375000.0 * v2 - 300000.0 * v3 + 4606250.0) * v1 -
             96000.0 * v3 * v3) / 16000.0 * r1,
            (-150000.0 * v2 * v2 + (-240000.0 * v3 + 3122500.0) * v2 + 2430500.0 * v3 - 9027500.0) /
                16000.0 * r1,
            53711.0 / 160.0 * v3,
            64.0 / 125.0 * v3 * v3 * v3,
            125.0 / 64.0 * v1 * v1 * v1,
            (75000.0 * v2 + 60000.0 * v3 - 2884375.0) / 16000.0 * v1 * v1,
            v2 * v2 * v2,
            (60000.0 * v2 * v2 + (96000.0 * v3 - 3140000.0) * v2 + 38400.0 * v3 * v3 -
             2453000.0 * v3 + 17311250.0) / 16000.0 * v1,
            -607.0 / 25.0 * v3 * v3,
            (38400.0 * v3 - 666000.0) / 16000.0 * v2 * v2,
        };
    }
    ConstraintResidual out;
    for (double t : terms) {
        out.residual += t;
        out.scale += std::abs(t);
    }
    return out;
}

/// One admissible state at level n on the algebraic route.
struct LieState {
    std::complex<double> sigma;
    bool sigma_near_real = false;
    double v2 = 0.0;                         // image of Re(sigma)
    std::vector<double> poly;                // a_0..a_n at Re(sigma)
    std::vector<std::complex<double>> roots; // roots of that polynomial
    double det_residual = 0.0;               // |det(T0 - sigma I)| at sigma
};

/// Full level report on the algebraic route: level energy, the sigma
/// spectrum, and the per-sigma states.
struct LieLevel {
    int n = 0;
    double energy = 0.0;
    std::vector<LieState> states;
};

inline LieLevel lie_level(int n, double v1, double v3, double g) {
    LieLevel out;
    out.n = n;
    out.energy = energy(n, v1, v3, g);
    const ReducedCoefficients rc = reduce(PotentialParams{v1, 0.0, v3, g}, out.energy);
    const QesMatrix qm = direct_matrix(n, rc);
    for (const std::complex<double>& sigma : sigma_spectrum(n, v1, v3, g)) {
        LieState st;
        st.sigma = sigma;
        st.sigma_near_real = is_near_real(sigma);
        st.v2 = v2_from_sigma(sigma.real(), v1, v3, g, out.energy);
        st.poly = expansion_coefficients(n, rc, sigma.real());
        st.roots = polynomial_roots(st.poly);
        st.det_residual = std::abs(characteristic_value(qm, sigma));
        out.states.push_back(std::move(st));
    }
    return out;
}

} // namespace qesdw
