#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qesdw/bethe.hpp"
#include "qesdw/lie.hpp"
#include "qesdw/oracle.hpp"
#include "qesdw/poly.hpp"

using qesdw::Complex;
using qesdw::PotentialParams;

namespace {

constexpr double kV1 = 0.09, kV3 = 10.0, kG = 0.25;

std::vector<double> scan_grid() {
    std::vector<double> g;
    for (double x = -3.0; x <= 3.0 + 1e-12; x += 0.05)
        g.push_back(x);
    return g;
}

qesdw::Wavefunction state_from_v2(int n, double v2) {
    const double e = qesdw::energy(n, kV1, kV3, kG);
    const auto rc = qesdw::reduce(PotentialParams{kV1, 0.0, kV3, kG}, e);
    const double sigma = (qesdw::v2_from_sigma(0.0, kV1, kV3, kG, e) - v2) / (4.0 * kG);
    return qesdw::assemble_wavefunction(PotentialParams{kV1, v2, kV3, kG},
                                        qesdw::expansion_coefficients(n, rc, sigma));
}

} // namespace

TEST_CASE("finite-difference spectrum of the empty box") {
    const qesdw::FdConfig cfg{8.0, 2000, 3, false};
    const auto fd = qesdw::fd_eigenvalues(PotentialParams{0.0, 0.0, 0.0, 1.0}, cfg);
    REQUIRE(fd.eigenvalues.size() == 3);
    const double k1 = std::numbers::pi / 16.0;
    REQUIRE(fd.eigenvalues[0] == Catch::Approx(k1 * k1).epsilon(1e-5));
    REQUIRE(fd.eigenvalues[1] == Catch::Approx(4.0 * k1 * k1).epsilon(1e-5));
    REQUIRE(std::is_sorted(fd.eigenvalues.begin(), fd.eigenvalues.end()));
}

TEST_CASE("finite-difference ground state of the benchmark well") {
    const qesdw::FdConfig cfg{8.0, 4000, 4, true};
    const auto fd = qesdw::fd_eigenvalues(PotentialParams{kV1, -9.0, kV3, kG}, cfg);
    REQUIRE(fd.eigenvalues[0] == Catch::Approx(-1.21).margin(1e-3));
    REQUIRE_FALSE(fd.coarse_warning);
    // only the normalizable n = 0 state is required to appear; nothing in
    // the low spectrum should sit near the non-normalizable -8.41 state
    for (double e : fd.eigenvalues)
        REQUIRE(std::abs(e - (-8.41)) > 0.5);
}

TEST_CASE("finite-difference eigenvalues converge at second order") {
    const PotentialParams p{kV1, -9.0, kV3, kG};
    auto lowest = [&](int n_points) {
        return qesdw::fd_eigenvalues(p, {8.0, n_points, 1, false}).eigenvalues[0];
    };
    const double e1 = lowest(500), e2 = lowest(1000), e3 = lowest(2000);
    const double ratio = (e1 - e2) / (e2 - e3);
    REQUIRE(ratio == Catch::Approx(4.0).epsilon(0.2));
}

TEST_CASE("coarse discretizations raise the Richardson warning") {
    const qesdw::FdConfig coarse{30.0, 200, 1, true};
    const auto fd = qesdw::fd_eigenvalues(PotentialParams{kV1, -9.0, kV3, kG}, coarse);
    REQUIRE(fd.richardson_shift > 1e-3);
    REQUIRE(fd.coarse_warning);
}

TEST_CASE("config guards") {
    const PotentialParams p{kV1, -9.0, kV3, kG};
    REQUIRE_THROWS_AS(qesdw::fd_eigenvalues(p, {8.0, 100, 1, false}), std::invalid_argument);
    REQUIRE_THROWS_AS(qesdw::fd_eigenvalues(p, {4.0, 1000, 1, false}), std::invalid_argument);
    REQUIRE_THROWS_AS(qesdw::fd_eigenvalues(p, {8.0, 1000, 0, false}), std::invalid_argument);
}

TEST_CASE("Schrödinger residual of the closed-form states") {
    const auto grid = scan_grid();
    SECTION("ground state") {
        const auto wf = state_from_v2(0, -9.0);
        const double res =
            qesdw::ode_residual(PotentialParams{kV1, -9.0, kV3, kG}, -1.21, wf, grid);
        REQUIRE(res < 1e-6);
    }
    SECTION("non-normalizable n = 2 state still solves the equation pointwise") {
        const double v2 = 8.471121770;
        const auto wf = state_from_v2(2, v2);
        const double res = qesdw::ode_residual(PotentialParams{kV1, v2, kV3, kG}, -8.41, wf, grid);
        REQUIRE(res < 1e-5);
    }
    SECTION("assembled from tabulated roots instead of the recurrence") {
        const std::vector<Complex> roots{{0.6953879418, 0.0}, {0.1092848103, 0.0}};
        const double v2 = 8.471121770;
        const auto wf = qesdw::assemble_wavefunction(PotentialParams{kV1, v2, kV3, kG},
                                                     qesdw::polynomial_from_roots(roots));
        const double res = qesdw::ode_residual(PotentialParams{kV1, v2, kV3, kG}, -8.41, wf, grid);
        REQUIRE(res < 1e-5);
    }
    SECTION("detector: a perturbed energy is flagged") {
        const auto wf = state_from_v2(0, -9.0);
        const double res =
            qesdw::ode_residual(PotentialParams{kV1, -9.0, kV3, kG}, -1.21 + 0.01, wf, grid);
        REQUIRE(res > 1e-3);
    }
    SECTION("scan output is aligned with the grid") {
        const auto wf = state_from_v2(0, -9.0);
        const auto scan =
            qesdw::ode_residual_scan(PotentialParams{kV1, -9.0, kV3, kG}, -1.21, wf, grid);
        REQUIRE(scan.x.size() == grid.size());
        REQUIRE(scan.psi.size() == grid.size());
        REQUIRE(scan.residual.size() == grid.size());
        REQUIRE_FALSE(scan.step_warning);
    }
    SECTION("guards") {
        const auto wf = state_from_v2(0, -9.0);
        REQUIRE_THROWS_AS(
            qesdw::ode_residual(PotentialParams{kV1, -9.0, kV3, kG}, -1.21, wf, {}),
            std::invalid_argument);
        REQUIRE_THROWS_AS(
            qesdw::ode_residual(PotentialParams{kV1, -9.0, kV3, kG}, -1.21, wf, grid, -0.1),
            std::invalid_argument);
    }
}
