#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "qesdw/bethe.hpp"
#include "qesdw/lie.hpp"

using qesdw::PotentialParams;
using qesdw::ReducedCoefficients;

namespace {

constexpr double kV1 = 0.09, kV3 = 10.0, kG = 0.25;

ReducedCoefficients bench_coeffs(int n, double v2 = 0.0) {
    return qesdw::reduce(PotentialParams{kV1, v2, kV3, kG}, qesdw::energy(n, kV1, kV3, kG));
}

std::vector<double> sorted_v2(int n) {
    std::vector<double> out;
    const double e = qesdw::energy(n, kV1, kV3, kG);
    for (const auto& sigma : qesdw::sigma_spectrum(n, kV1, kV3, kG)) {
        REQUIRE(qesdw::is_near_real(sigma));
        out.push_back(qesdw::v2_from_sigma(sigma.real(), kV1, kV3, kG, e));
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct RandomValid {
    std::mt19937 rng{777};
    std::uniform_real_distribution<double> u{0.0, 1.0};
    PotentialParams next() {
        const double g = 0.1 + 1.9 * u(rng);
        return {-1.5 + 1.7 * u(rng), -20.0 + 40.0 * u(rng), -(1.0 + g) * 0.8 + 12.0 * u(rng), g};
    }
};

} // namespace

TEST_CASE("generator matrices") {
    SECTION("n = 1 raising action") {
        const auto gen = qesdw::generator_matrices(1);
        // 1 -> z, z -> 0
        REQUIRE(gen.raising(1, 0) == 1.0);
        REQUIRE(gen.raising(0, 0) == 0.0);
        REQUIRE(gen.raising(0, 1) == 0.0);
        REQUIRE(gen.raising(1, 1) == 0.0);
    }
    SECTION("weight is diagonal m - n/2") {
        const auto gen = qesdw::generator_matrices(4);
        for (int m = 0; m <= 4; ++m)
            REQUIRE(gen.weight(m, m) == m - 2.0);
    }
    SECTION("commutators hold exactly for n = 0..10") {
        for (int n = 0; n <= 10; ++n) {
            const auto gen = qesdw::generator_matrices(n);
            const Eigen::MatrixXd c1 = gen.weight * gen.raising - gen.raising * gen.weight;
            const Eigen::MatrixXd c2 = gen.weight * gen.lowering - gen.lowering * gen.weight;
            const Eigen::MatrixXd c3 = gen.raising * gen.lowering - gen.lowering * gen.raising;
            REQUIRE((c1 - gen.raising).cwiseAbs().maxCoeff() <= 1e-13);
            REQUIRE((c2 + gen.lowering).cwiseAbs().maxCoeff() <= 1e-13);
            REQUIRE((c3 - 2.0 * gen.weight).cwiseAbs().maxCoeff() <= 1e-13);
        }
    }
    SECTION("raising annihilates the top monomial") {
        for (int n : {0, 1, 3, 7}) {
            const auto gen = qesdw::generator_matrices(n);
            Eigen::VectorXd top = Eigen::VectorXd::Zero(n + 1);
            top(n) = 1.0;
            REQUIRE((gen.raising * top).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("direct matrix") {
    SECTION("n = 0 is the 1x1 matrix [-sigma]") {
        const auto qm = qesdw::direct_matrix(0, bench_coeffs(0));
        REQUIRE(qm.sub.empty());
        REQUIRE(qm.super.empty());
        REQUIRE(qm.diag_base == std::vector<double>{0.0});
        REQUIRE(qm.dense(2.5)(0, 0) == -2.5);
    }
    SECTION("subdiagonal entry A_1 at n = 2") {
        // A_1 = -n(n-1) - n(gamma+delta+epsilon) = -2 + 0.2
        const auto qm = qesdw::direct_matrix(2, bench_coeffs(2));
        REQUIRE(qm.sub[0] == Catch::Approx(-1.8).margin(1e-13));
    }
    SECTION("corner entries match their closed forms") {
        const auto rc = bench_coeffs(3);
        const auto qm = qesdw::direct_matrix(3, rc);
        const int n = 3;
        const double q1 = rc.drift_linear(), q2 = rc.drift_quadratic();
        REQUIRE(qm.super[0] == Catch::Approx(rc.lambda * rc.gamma));
        REQUIRE(qm.sub[0] == Catch::Approx((n - n * n) - n * q2));
        REQUIRE(qm.sub[n - 1] == Catch::Approx((2 - 2 * n) - q2));
        REQUIRE(qm.super[n - 1] == Catch::Approx(n * (n - 1) * rc.lambda + n * rc.lambda * rc.gamma));
        REQUIRE(qm.diag_base[n] == Catch::Approx(-n * (n - 1) * (rc.lambda + 1.0) - n * q1));
    }
    SECTION("truncation row vanishes identically for n = 0..8") {
        RandomValid gen;
        for (int n = 0; n <= 8; ++n) {
            const PotentialParams p = gen.next();
            const auto rc = qesdw::reduce(p, qesdw::energy(n, p.v1, p.v3, p.g));
            REQUIRE(qesdw::recurrence_coefficients(n + 1, n, rc).sub ==
                    Catch::Approx(0.0).margin(1e-12));
        }
    }
}

TEST_CASE("recurrence coefficients") {
    const auto rc = bench_coeffs(2);
    SECTION("row 0 reduces to -sigma a0 + lambda gamma a1 = 0") {
        const auto t = qesdw::recurrence_coefficients(0, 2, rc);
        REQUIRE(t.diag_base == 0.0);
        REQUIRE(t.super == Catch::Approx(rc.lambda * rc.gamma));
    }
    SECTION("out of range throws") {
        REQUIRE_THROWS_AS(qesdw::recurrence_coefficients(-1, 2, rc), std::out_of_range);
        REQUIRE_THROWS_AS(qesdw::recurrence_coefficients(4, 2, rc), std::out_of_range);
    }
}

TEST_CASE("quadratic sl(2) combination equals the direct matrix") {
    SECTION("n = 0") {
        const auto rc = bench_coeffs(0, -9.0);
        const auto h = qesdw::qes_hamiltonian(0, rc);
        REQUIRE(h.rows() == 1);
        REQUIRE(h(0, 0) == Catch::Approx(-rc.sigma).margin(1e-13));
    }
    SECTION("n = 1 benchmark") {
        const auto rc = bench_coeffs(1);
        const auto h = qesdw::qes_hamiltonian(1, rc);
        const auto direct = qesdw::direct_matrix(1, rc).dense(rc.sigma);
        REQUIRE((h - direct).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SECTION("entrywise over random valid coefficient sets, n = 0..8") {
        RandomValid gen;
        for (int n = 0; n <= 8; ++n) {
            for (int trial = 0; trial < 100; ++trial) {
                const PotentialParams p = gen.next();
                const auto rc = qesdw::reduce(p, qesdw::energy(n, p.v1, p.v3, p.g));
                const auto h = qesdw::qes_hamiltonian(n, rc);
                const auto direct = qesdw::direct_matrix(n, rc).dense(rc.sigma);
                const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
                REQUIRE((h - direct).cwiseAbs().maxCoeff() <= 1e-12 * scale);
            }
        }
    }
    SECTION("sigma shift: matrix + sigma I does not depend on v2") {
        const double e = qesdw::energy(2, kV1, kV3, kG);
        const auto rc_a = qesdw::reduce(PotentialParams{kV1, -9.0, kV3, kG}, e);
        const auto rc_b = qesdw::reduce(PotentialParams{kV1, 4.0, kV3, kG}, e);
        const Eigen::MatrixXd ha =
            qesdw::qes_hamiltonian(2, rc_a) + rc_a.sigma * Eigen::MatrixXd::Identity(3, 3);
        const Eigen::MatrixXd hb =
            qesdw::qes_hamiltonian(2, rc_b) + rc_b.sigma * Eigen::MatrixXd::Identity(3, 3);
        REQUIRE((ha - hb).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SECTION("rejects an energy violating the termination condition") {
        const auto rc = qesdw::reduce(PotentialParams{kV1, 0.0, kV3, kG}, -1.0);
        REQUIRE_THROWS_AS(qesdw::qes_hamiltonian(2, rc), std::domain_error);
    }
}

TEST_CASE("sigma spectrum and v2 images at the benchmark point") {
    SECTION("n = 0: sigma = 0 maps to v2 = -9") {
        const auto sigmas = qesdw::sigma_spectrum(0, kV1, kV3, kG);
        REQUIRE(sigmas.size() == 1);
        REQUIRE(std::abs(sigmas[0]) <= 1e-12);
        REQUIRE(sorted_v2(0)[0] == Catch::Approx(-9.0).epsilon(1e-10));
    }
    SECTION("n = 2 images") {
        const auto v2 = sorted_v2(2);
        REQUIRE(v2.size() == 3);
        REQUIRE(v2[0] == Catch::Approx(-17.47112177).epsilon(1e-6));
        REQUIRE(v2[1] == Catch::Approx(-9.0).epsilon(1e-6));
        REQUIRE(v2[2] == Catch::Approx(8.471121770).epsilon(1e-6));
    }
    SECTION("n = 3 images include the configuration the root solver cannot see") {
        const auto v2 = sorted_v2(3);
        REQUIRE(v2.size() == 4);
        REQUIRE(v2[0] == Catch::Approx(-36.0).epsilon(1e-6));
        REQUIRE(v2[1] == Catch::Approx(-26.41460700).epsilon(1e-6));
        REQUIRE(v2[2] == Catch::Approx(-9.0).epsilon(1e-6));
        REQUIRE(v2[3] == Catch::Approx(17.41460700).epsilon(1e-6));
    }
    SECTION("near-real acceptance window") {
        REQUIRE(qesdw::is_near_real({-20.0, 1e-9}));
        REQUIRE_FALSE(qesdw::is_near_real({-20.0, 1e-3}));
    }
    SECTION("completeness: n+1 roots, counting multiplicity") {
        RandomValid gen;
        for (int n = 0; n <= 6; ++n) {
            const PotentialParams p = gen.next();
            REQUIRE(qesdw::sigma_spectrum(n, p.v1, p.v3, p.g).size() ==
                    static_cast<std::size_t>(n) + 1);
        }
    }
    SECTION("determinant recurrence vanishes at every spectrum point") {
        for (int n = 0; n <= 6; ++n) {
            const auto rc = bench_coeffs(n);
            const auto qm = qesdw::direct_matrix(n, rc);
            const double norm = qm.dense(0.0).cwiseAbs().rowwise().sum().maxCoeff();
            const double bound = 1e-8 * std::pow(std::max(norm, 1.0), n + 1);
            for (const auto& sigma : qesdw::sigma_spectrum(n, kV1, kV3, kG))
                REQUIRE(std::abs(qesdw::characteristic_value(qm, sigma)) < bound);
        }
    }
}

TEST_CASE("v2 from sigma") {
    const double e0 = qesdw::energy(0, kV1, kV3, kG);
    SECTION("benchmark point") {
        REQUIRE(qesdw::v2_from_sigma(0.0, kV1, kV3, kG, e0) == Catch::Approx(-9.0).epsilon(1e-12));
    }
    SECTION("affine with slope -4g exactly") {
        std::mt19937 rng(4);
        std::uniform_real_distribution<double> u(-50.0, 50.0);
        const double base = qesdw::v2_from_sigma(0.0, kV1, kV3, kG, e0);
        for (int i = 0; i < 50; ++i) {
            const double sigma = u(rng);
            REQUIRE(qesdw::v2_from_sigma(sigma, kV1, kV3, kG, e0) ==
                    Catch::Approx(base - 4.0 * kG * sigma).margin(1e-11));
        }
    }
    SECTION("round trip through reduce") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(-30.0, 30.0);
        for (int i = 0; i < 20; ++i) {
            const double sigma = u(rng);
            const double v2 = qesdw::v2_from_sigma(sigma, kV1, kV3, kG, e0);
            const auto rc = qesdw::reduce(PotentialParams{kV1, v2, kV3, kG}, e0);
            REQUIRE(rc.sigma == Catch::Approx(sigma).margin(1e-10));
        }
    }
}

TEST_CASE("expansion coefficients reproduce the root solver's polynomials") {
    SECTION("n = 1") {
        const auto rc = bench_coeffs(1);
        const auto closed = qesdw::n1_closed_form(rc);
        for (const auto& sigma : qesdw::sigma_spectrum(1, kV1, kV3, kG)) {
            const auto a = qesdw::expansion_coefficients(1, rc, sigma.real());
            const auto roots = qesdw::polynomial_roots(a);
            REQUIRE(roots.size() == 1);
            const bool matches_plus = std::abs(roots[0] - closed[0]) < 1e-6 * std::abs(closed[0]);
            const bool matches_minus = std::abs(roots[0] - closed[1]) < 1e-6;
            REQUIRE((matches_plus || matches_minus));
        }
    }
    SECTION("n = 2: coefficients factor over the Bethe roots") {
        const auto rc = bench_coeffs(2);
        const auto report = qesdw::solve_bae(2, rc);
        REQUIRE(report.solutions.size() == 3);
        int matched = 0;
        for (const auto& sigma : qesdw::sigma_spectrum(2, kV1, kV3, kG)) {
            const auto a = qesdw::expansion_coefficients(2, rc, sigma.real());
            // monic normalization for comparison against the root product
            std::vector<double> monic(a.size());
            for (std::size_t i = 0; i < a.size(); ++i)
                monic[i] = a[i] / a.back();
            for (const auto& st : report.solutions) {
                const auto from_roots = qesdw::polynomial_from_roots(st.roots);
                bool same = true;
                for (std::size_t i = 0; i < monic.size(); ++i)
                    same = same && std::abs(monic[i] - from_roots[i]) <=
                                       1e-6 * std::max(1.0, std::abs(from_roots[i]));
                if (same)
                    ++matched;
            }
        }
        REQUIRE(matched == 3);
    }
}

TEST_CASE("constraint polynomial regression") {
    SECTION("first excited level at the benchmark couplings") {
        for (double v2 : {-8.531128874, -0.4688711258}) {
            const auto res = qesdw::constraint_polynomial_check(1, -0.81, kV1, v2, kV3, kG);
            REQUIRE(res.relative() < 1e-3);
        }
    }
    SECTION("second excited level") {
        for (double v2 : {-9.0, 8.471121770, -17.47112177}) {
            const auto res = qesdw::constraint_polynomial_check(2, -8.41, kV1, v2, kV3, kG);
            REQUIRE(res.relative() < 1e-3);
        }
    }
    SECTION("detects a wrong coupling") {
        REQUIRE(qesdw::constraint_polynomial_check(1, -0.81, kV1, 0.0, kV3, kG).relative() > 1e-3);
        REQUIRE(qesdw::constraint_polynomial_check(2, -8.41, kV1, 1.0, kV3, kG).relative() > 1e-3);
    }
    SECTION("guards") {
        REQUIRE_THROWS_AS(qesdw::constraint_polynomial_check(1, -0.81, kV1, -9.0, kV3, 0.5),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(qesdw::constraint_polynomial_check(3, -24.01, kV1, -9.0, kV3, kG),
                          std::invalid_argument);
    }
}

TEST_CASE("lie level report") {
    const auto level = qesdw::lie_level(3, kV1, kV3, kG);
    REQUIRE(level.energy == Catch::Approx(-24.01).margin(1e-12));
    REQUIRE(level.states.size() == 4);
    for (const auto& st : level.states) {
        REQUIRE(st.sigma_near_real);
        REQUIRE(st.poly.size() == 4);
        REQUIRE(st.roots.size() == 3);
    }
}
