#pragma once

#include <algorithm>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace qesdw {

/// Horner evaluation; coefficients lowest degree first.
template <typename Scalar>
Scalar polyval(std::span<const double> coeffs, Scalar z) {
    Scalar acc{};
    for (std::size_t i = coeffs.size(); i-- > 0;)
        acc = acc * z + coeffs[i];
    return acc;
}

/// Monic product over the given roots; imaginary parts of the result are
/// dropped, so the root set should be closed under conjugation.
inline std::vector<double> polynomial_from_roots(std::span<const std::complex<double>> roots) {
    std::vector<std::complex<double>> acc{1.0};
    for (const auto& r : roots) {
        acc.push_back(0.0);
        for (std::size_t i = acc.size() - 1; i > 0; --i)
            acc[i] = acc[i - 1] - r * acc[i];
        acc[0] *= -r;
    }
    std::vector<double> out(acc.size());
    std::transform(acc.begin(), acc.end(), out.begin(), [](auto c) { return c.real(); });
    return out;
}

/// All complex roots, with multiplicity, via the companion matrix.
/// Deterministic for fixed input. Results sorted by (real, imag).
inline std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
    std::size_t degree = coeffs.empty() ? 0 : coeffs.size() - 1;
    while (degree > 0 && coeffs[degree] == 0.0)
        --degree;
    if (degree == 0)
        return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(degree),
                                                      static_cast<Eigen::Index>(degree));
    for (std::size_t i = 1; i < degree; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (std::size_t i = 0; i < degree; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(degree - 1)) =
            -coeffs[i] / coeffs[degree];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("polynomial_roots: eigensolver failed");
    std::vector<std::complex<double>> roots(degree);
    for (std::size_t i = 0; i < degree; ++i)
        roots[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real())
            return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

} // namespace qesdw
