#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qesdw/potential.hpp"
#include "qesdw/reduction.hpp"

namespace qesdw {

/// Finite-difference discretization of -d^2/dx^2 + V on [-x_max, x_max]
/// with Dirichlet walls. n_points counts interior nodes.
struct FdConfig {
    double x_max = 8.0;
    int n_points = 4000;
    int n_eigen = 6;
    bool richardson_check = true; // re-solve at 2*n_points and compare
};

struct FdResult {
    std::vector<double> eigenvalues; // lowest n_eigen, ascending
    double richardson_shift = 0.0;   // |E0(n) - E0(2n)| when checked
    bool coarse_warning = false;     // shift > 1e-3
};

namespace detail {

inline std::vector<double> fd_spectrum(const PotentialParams& p, double x_max, int n_points,
                                       int n_eigen) {
    const double h = 2.0 * x_max / (n_points + 1);
    Eigen::VectorXd diag(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double x = -x_max + h * (i + 1);
        diag(i) = 2.0 / (h * h) + evaluate(p, x);
    }
    const Eigen::VectorXd off = Eigen::VectorXd::Constant(n_points - 1, -1.0 / (h * h));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("fd_eigenvalues: tridiagonal eigensolver failed");
    std::vector<double> out(static_cast<std::size_t>(n_eigen));
    for (int i = 0; i < n_eigen; ++i)
        out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return out;
}

/// 5-point second derivative at step h.
template <typename F>
double second_derivative(F&& f, double x, double h) {
    return (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) /
           (12.0 * h * h);
}

} // namespace detail

/// Lowest eigenvalues of the three-point discretization, sorted ascending.
/// Only the normalizable part of the spectrum is trustworthy; excited
/// quasi-solvable states need not appear here.
inline FdResult fd_eigenvalues(const PotentialParams& p, const FdConfig& cfg) {
    if (cfg.n_points < 200)
        throw std::invalid_argument("fd_eigenvalues: need n_points >= 200");
    if (cfg.x_max < 6.0)
        throw std::invalid_argument("fd_eigenvalues: need x_max >= 6");
    if (cfg.n_eigen < 1 || cfg.n_eigen > cfg.n_points)
        throw std::invalid_argument("fd_eigenvalues: n_eigen out of range");
    FdResult result;
    result.eigenvalues = detail::fd_spectrum(p, cfg.x_max, cfg.n_points, cfg.n_eigen);
    if (cfg.richardson_check) {
        const std::vector<double> fine = detail::fd_spectrum(p, cfg.x_max, 2 * cfg.n_points, 1);
        result.richardson_shift = std::abs(result.eigenvalues[0] - fine[0]);
        result.coarse_warning = result.richardson_shift > 1e-3;
    }
    return result;
}

/// Pointwise residual of the Schrödinger equation for an assembled
/// wavefunction, relative to |E psi| with a floor against nodes.
struct OdeResidualScan {
    std::vector<double> x;
    std::vector<double> psi;
    std::vector<double> residual;
    double max_residual = 0.0;
    bool step_warning = false; // h-refinement disagreement above budget
};

/// psi'' by 5-point differences at steps h and h/2, Richardson-combined to
/// O(h^6). Differentiation is numeric on purpose: the check stays
/// independent of the algebra that produced psi.
inline OdeResidualScan ode_residual_scan(const PotentialParams& p, double e_level,
                                         const Wavefunction& wf, std::span<const double> grid,
                                         double h = 1e-2) {
    if (grid.empty())
        throw std::invalid_argument("ode_residual_scan: empty grid");
    if (!(h > 0.0))
        throw std::invalid_argument("ode_residual_scan: step must be positive");
    OdeResidualScan scan;
    scan.x.assign(grid.begin(), grid.end());
    scan.psi.resize(grid.size());
    scan.residual.resize(grid.size());
    double scale = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        scan.psi[i] = evaluate_wavefunction(wf, grid[i]);
        scale = std::max(scale, std::abs(e_level * scan.psi[i]));
    }
    const double floor = std::max(scale * 1e-8, 1e-300);
    auto psi_at = [&wf](double x) { return evaluate_wavefunction(wf, x); };
    double worst_step_disagreement = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        const double d_h = detail::second_derivative(psi_at, x, h);
        const double d_h2 = detail::second_derivative(psi_at, x, 0.5 * h);
        const double d2 = (16.0 * d_h2 - d_h) / 15.0;
        worst_step_disagreement = std::max(worst_step_disagreement, std::abs(d_h - d_h2));
        const double lhs = -d2 + (evaluate(p, x) - e_level) * scan.psi[i];
        scan.residual[i] = std::abs(lhs) / std::max(std::abs(e_level * scan.psi[i]), floor);
        scan.max_residual = std::max(scan.max_residual, scan.residual[i]);
    }
    scan.step_warning = worst_step_disagreement > 1e-6 * std::max(scale, 1.0);
    return scan;
}

inline double ode_residual(const PotentialParams& p, double e_level, const Wavefunction& wf,
                           std::span<const double> grid, double h = 1e-2) {
    return ode_residual_scan(p, e_level, wf, grid, h).max_residual;
}

} // namespace qesdw
