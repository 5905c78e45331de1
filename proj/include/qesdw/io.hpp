#pragma once

#include <complex>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qesdw/bethe.hpp"
#include "qesdw/lie.hpp"
#include "qesdw/oracle.hpp"
#include "qesdw/potential.hpp"

namespace qesdw {

/// %.*g formatting; digits = significant digits.
inline std::string format_significant(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
    return buf;
}

/// Accepts a plain decimal or an exact rational "a/b" (used for g = 1/4).
inline double parse_real_or_rational(const std::string& text) {
    const auto slash = text.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument("not a number: " + text);
        return v;
    }
    const double num = std::stod(text.substr(0, slash), &used);
    if (used != slash)
        throw std::invalid_argument("not a rational: " + text);
    const std::string den_text = text.substr(slash + 1);
    const double den = std::stod(den_text, &used);
    if (used != den_text.size() || den == 0.0)
        throw std::invalid_argument("not a rational: " + text);
    return num / den;
}

inline void write_grid_csv(std::ostream& os, const GridSample& grid) {
    os << "x,V\n";
    for (std::size_t i = 0; i < grid.x.size(); ++i)
        os << format_significant(grid.x[i], 17) << ',' << format_significant(grid.v[i], 17) << '\n';
}

inline void write_wavefunction_csv(std::ostream& os, std::span<const double> x,
                                   std::span<const double> psi) {
    os << "x,psi\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        os << format_significant(x[i], 17) << ',' << format_significant(psi[i], 17) << '\n';
}

inline void write_scan_csv(std::ostream& os, const OdeResidualScan& scan) {
    os << "x,psi,residual\n";
    for (std::size_t i = 0; i < scan.x.size(); ++i)
        os << format_significant(scan.x[i], 17) << ',' << format_significant(scan.psi[i], 17) << ','
           << format_significant(scan.residual[i], 17) << '\n';
}

inline void write_spectrum_csv(std::ostream& os, std::span<const std::pair<int, double>> rows) {
    os << "n,E\n";
    for (const auto& [n, e] : rows)
        os << n << ',' << format_significant(e, 17) << '\n';
}

/// Tridiagonal dump, one row per index k. Absent entries (sub at k=0,
/// super at k=n) are left empty.
inline void write_matrix_csv(std::ostream& os, const QesMatrix& qm) {
    os << "k,sub,diag_base,super\n";
    for (int k = 0; k <= qm.n; ++k) {
        os << k << ',';
        if (k >= 1)
            os << format_significant(qm.sub[static_cast<std::size_t>(k - 1)], 17);
        os << ',' << format_significant(qm.diag_base[static_cast<std::size_t>(k)], 17) << ',';
        if (k < qm.n)
            os << format_significant(qm.super[static_cast<std::size_t>(k)], 17);
        os << '\n';
    }
}

/// Per-level union of the two routes: the admissible couplings with a tag
/// saying which solver produced each. At most n+1 distinct values.
struct MergedLevel {
    enum class Route { bethe, lie, both };
    int n = 0;
    double energy = 0.0;
    std::vector<double> v2_values;
    std::vector<Route> provenance; // parallel to v2_values
};

inline MergedLevel merge_levels(const QesLevel& bethe, const LieLevel& lie) {
    MergedLevel merged;
    merged.n = lie.n;
    merged.energy = lie.energy;
    auto near = [](double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); };
    for (const LieState& st : lie.states) {
        if (!st.sigma_near_real)
            continue;
        merged.v2_values.push_back(st.v2);
        merged.provenance.push_back(MergedLevel::Route::lie);
    }
    for (const BetheState& st : bethe.report.solutions) {
        if (!st.is_physical)
            continue;
        bool matched = false;
        for (std::size_t i = 0; i < merged.v2_values.size(); ++i)
            if (near(st.v2, merged.v2_values[i])) {
                merged.provenance[i] = MergedLevel::Route::both;
                matched = true;
                break;
            }
        if (!matched) {
            merged.v2_values.push_back(st.v2);
            merged.provenance.push_back(MergedLevel::Route::bethe);
        }
    }
    return merged;
}

inline nlohmann::json roots_json(std::span<const Complex> roots) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& z : roots)
        arr.push_back({z.real(), z.imag()});
    return arr;
}

/// Level report on the Bethe route:
/// {n, E, solutions: [{roots: [[re, im], ...], residual, v2, is_physical}]}
inline nlohmann::json bethe_level_json(const QesLevel& level) {
    nlohmann::json solutions = nlohmann::json::array();
    for (const BetheState& st : level.report.solutions) {
        solutions.push_back({{"roots", roots_json(st.roots)},
                             {"residual", st.residual},
                             {"v2", st.v2},
                             {"is_physical", st.is_physical}});
    }
    return {{"n", level.n},
            {"E", level.energy},
            {"solutions", solutions},
            {"starts", {{"attempted", level.report.starts_attempted},
                        {"converged", level.report.starts_converged},
                        {"failed", level.report.starts_failed}}}};
}

/// Mirrors the Bethe schema and adds the raw sigma list.
inline nlohmann::json lie_level_json(const LieLevel& level) {
    nlohmann::json sigmas = nlohmann::json::array();
    nlohmann::json solutions = nlohmann::json::array();
    for (const LieState& st : level.states) {
        sigmas.push_back({st.sigma.real(), st.sigma.imag()});
        solutions.push_back({{"roots", roots_json(st.roots)},
                             {"residual", st.det_residual},
                             {"sigma", st.sigma.real()},
                             {"v2", st.v2},
                             {"is_physical", st.sigma_near_real}});
    }
    return {{"n", level.n}, {"E", level.energy}, {"sigma", sigmas}, {"solutions", solutions}};
}

} // namespace qesdw
