// Command-line front end: single-level solves by either method, Table-1 style
// reports, cross-validation, the finite-difference oracle, and CSV data for
// potential/spectrum plots.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qesdw/bethe.hpp"
#include "qesdw/io.hpp"
#include "qesdw/lie.hpp"
#include "qesdw/oracle.hpp"
#include "qesdw/potential.hpp"

namespace {

constexpr int kExitInvalidParams = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kDigits = 10; // default print precision

struct Options {
    std::string v1 = "0.09";
    std::string v3 = "10";
    std::string g = "1/4";
    std::string v2;
    int n = 0;
    int n_max = 3;
    std::string method = "both";
    std::string output = "-";
    std::string format = "json";
    int grid_starts = 140;
    int circle_starts = 100;
    bool no_warm_starts = false;
    double x_min = -4.0;
    double x_max = 4.0;
    int n_points = 401;
    // oracle
    double fd_x_max = 8.0;
    int fd_points = 4000;
    int fd_eigen = 6;
    int scan_level = -1;
    std::string scan_output;
    std::string psi_output;
    std::string matrix_output;
};

int emit(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return 0;
    }
    std::ofstream file(path);
    if (!file) {
        std::cerr << "cannot open output file: " << path << "\n";
        return 1;
    }
    file << content;
    return 0;
}

qesdw::MultistartOptions multistart(const Options& opt) {
    qesdw::MultistartOptions ms;
    ms.grid_starts = opt.grid_starts;
    ms.circle_starts = opt.circle_starts;
    ms.warm_starts = !opt.no_warm_starts;
    return ms;
}

/// Gate on the real-spectrum conditions; prints the report on failure.
bool check_validity(const qesdw::PotentialParams& p) {
    try {
        const qesdw::ValidityReport vr = qesdw::validate(p);
        if (vr.valid())
            return true;
        std::cerr << "invalid parameters: need v1 < 1/4 (margin " << vr.v1_margin
                  << ") and v3 > -(1+g) (margin " << vr.v3_margin << ")\n";
    } catch (const std::exception& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
    }
    return false;
}

std::vector<double> lie_v2_set(const qesdw::LieLevel& level) {
    std::vector<double> out;
    for (const auto& st : level.states)
        if (st.sigma_near_real)
            out.push_back(st.v2);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> bethe_v2_set(const qesdw::QesLevel& level) {
    std::vector<double> out;
    for (const auto& st : level.report.solutions)
        if (st.is_physical)
            out.push_back(st.v2);
    std::sort(out.begin(), out.end());
    return out;
}

struct MatchedRow {
    std::optional<double> bethe;
    std::optional<double> lie;
};

/// Pairs values from the two routes within a 1e-6 scaled tolerance;
/// unmatched entries keep their side only.
std::vector<MatchedRow> match_sets(const std::vector<double>& bethe, const std::vector<double>& lie) {
    std::vector<MatchedRow> rows;
    std::vector<bool> used(bethe.size(), false);
    for (double lv : lie) {
        std::size_t best = bethe.size();
        double best_d = 1e-6 * std::max(1.0, std::abs(lv));
        for (std::size_t i = 0; i < bethe.size(); ++i) {
            if (used[i])
                continue;
            const double d = std::abs(bethe[i] - lv);
            if (d <= best_d) {
                best_d = d;
                best = i;
            }
        }
        MatchedRow row;
        row.lie = lv;
        if (best < bethe.size()) {
            used[best] = true;
            row.bethe = bethe[best];
        }
        rows.push_back(row);
    }
    for (std::size_t i = 0; i < bethe.size(); ++i)
        if (!used[i])
            rows.push_back({bethe[i], std::nullopt});
    return rows;
}

nlohmann::json matches_json(const std::vector<MatchedRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json item;
        item["bethe"] = row.bethe ? nlohmann::json(*row.bethe) : nlohmann::json();
        item["lie"] = row.lie ? nlohmann::json(*row.lie) : nlohmann::json();
        if (row.bethe && row.lie)
            item["abs_delta"] = std::abs(*row.bethe - *row.lie);
        arr.push_back(item);
    }
    return arr;
}

std::string csv_rows(const std::optional<qesdw::QesLevel>& bethe,
                     const std::optional<qesdw::LieLevel>& lie) {
    std::ostringstream os;
    os << "route,n,E,v2,residual,is_physical\n";
    if (bethe)
        for (const auto& st : bethe->report.solutions)
            os << "bethe," << bethe->n << ',' << qesdw::format_significant(bethe->energy, 17) << ','
               << qesdw::format_significant(st.v2, 17) << ','
               << qesdw::format_significant(st.residual, 17) << ',' << (st.is_physical ? 1 : 0)
               << '\n';
    if (lie)
        for (const auto& st : lie->states)
            os << "lie," << lie->n << ',' << qesdw::format_significant(lie->energy, 17) << ','
               << qesdw::format_significant(st.v2, 17) << ','
               << qesdw::format_significant(st.det_residual, 17) << ','
               << (st.sigma_near_real ? 1 : 0) << '\n';
    return os.str();
}

int cmd_solve(const Options& opt) {
    const double v1 = qesdw::parse_real_or_rational(opt.v1);
    const double v3 = qesdw::parse_real_or_rational(opt.v3);
    const double g = qesdw::parse_real_or_rational(opt.g);
    if (!check_validity({v1, 0.0, v3, g}))
        return kExitInvalidParams;

    std::optional<qesdw::QesLevel> bethe;
    std::optional<qesdw::LieLevel> lie;
    if (opt.method == "bethe" || opt.method == "both")
        bethe = qesdw::solve_level(opt.n, v1, v3, g, multistart(opt));
    if (opt.method == "lie" || opt.method == "both")
        lie = qesdw::lie_level(opt.n, v1, v3, g);

    if (!opt.matrix_output.empty()) {
        const auto rc =
            qesdw::reduce(qesdw::PotentialParams{v1, 0.0, v3, g}, qesdw::energy(opt.n, v1, v3, g));
        std::ofstream file(opt.matrix_output);
        if (!file) {
            std::cerr << "cannot open matrix output: " << opt.matrix_output << "\n";
            return 1;
        }
        qesdw::write_matrix_csv(file, qesdw::direct_matrix(opt.n, rc));
    }

    std::string content;
    if (opt.format == "csv") {
        content = csv_rows(bethe, lie);
    } else {
        nlohmann::json j;
        j["n"] = opt.n;
        j["E"] = bethe ? bethe->energy : lie->energy;
        if (bethe)
            j["bethe"] = qesdw::bethe_level_json(*bethe);
        if (lie)
            j["lie"] = qesdw::lie_level_json(*lie);
        if (bethe && lie)
            j["matches"] = matches_json(match_sets(bethe_v2_set(*bethe), lie_v2_set(*lie)));
        content = j.dump(2) + "\n";
    }
    const int rc = emit(opt.output, content);
    if (rc != 0)
        return rc;
    if (bethe && opt.n >= 1 && bethe->report.solutions.empty())
        return kExitNoConvergence;
    return 0;
}

int cmd_table1(const Options& opt) {
    const double v1 = 0.09, v3 = 10.0, g = 0.25;
    std::ostringstream os;
    os << "First four quasi-solvable levels at v1 = 0.09, v3 = 10, g = 1/4\n";
    os << "  n  E             v2 (Bethe)       v2 (algebraic)   |delta|\n";
    for (int n = 0; n <= 3; ++n) {
        const auto bethe = qesdw::solve_level(n, v1, v3, g, multistart(opt));
        const auto lie = qesdw::lie_level(n, v1, v3, g);
        const auto rows = match_sets(bethe_v2_set(bethe), lie_v2_set(lie));
        bool first = true;
        for (const auto& row : rows) {
            if (first)
                os << "  " << n << "  " << std::left << std::setw(13)
                   << qesdw::format_significant(bethe.energy, kDigits);
            else
                os << "     " << std::setw(13) << "";
            os << std::left << "  " << std::setw(15)
               << (row.bethe ? qesdw::format_significant(*row.bethe, kDigits) : "MISSING") << "  "
               << std::setw(15)
               << (row.lie ? qesdw::format_significant(*row.lie, kDigits) : "MISSING") << "  ";
            if (row.bethe && row.lie)
                os << qesdw::format_significant(std::abs(*row.bethe - *row.lie), 3);
            else
                os << "-";
            os << '\n';
            first = false;
        }
    }
    return emit(opt.output, os.str());
}

int cmd_cross_check(const Options& opt) {
    const double v1 = qesdw::parse_real_or_rational(opt.v1);
    const double v3 = qesdw::parse_real_or_rational(opt.v3);
    const double g = qesdw::parse_real_or_rational(opt.g);
    if (!check_validity({v1, 0.0, v3, g}))
        return kExitInvalidParams;
    nlohmann::json levels = nlohmann::json::array();
    for (int n = 1; n <= opt.n_max; ++n) {
        const auto bethe = qesdw::solve_level(n, v1, v3, g, multistart(opt));
        const auto lie = qesdw::lie_level(n, v1, v3, g);
        const auto bset = bethe_v2_set(bethe);
        const auto lset = lie_v2_set(lie);
        bool subset_ok = true;
        for (double bv : bset) {
            bool found = false;
            for (double lv : lset)
                if (std::abs(bv - lv) <= 1e-8 * (1.0 + std::abs(lv)))
                    found = true;
            subset_ok = subset_ok && found;
        }
        levels.push_back({{"n", n},
                          {"E", bethe.energy},
                          {"bethe_v2", bset},
                          {"lie_v2", lset},
                          {"matches", matches_json(match_sets(bset, lset))},
                          {"subset_ok", subset_ok}});
    }
    nlohmann::json j{{"v1", v1}, {"v3", v3}, {"g", g}, {"levels", levels}};
    return emit(opt.output, j.dump(2) + "\n");
}

int cmd_oracle(const Options& opt) {
    const double v1 = qesdw::parse_real_or_rational(opt.v1);
    const double v3 = qesdw::parse_real_or_rational(opt.v3);
    const double g = qesdw::parse_real_or_rational(opt.g);
    const double v2 = qesdw::parse_real_or_rational(opt.v2);
    const qesdw::PotentialParams params{v1, v2, v3, g};
    if (!check_validity(params))
        return kExitInvalidParams;
    qesdw::FdConfig cfg;
    cfg.x_max = opt.fd_x_max;
    cfg.n_points = opt.fd_points;
    cfg.n_eigen = opt.fd_eigen;
    const qesdw::FdResult fd = qesdw::fd_eigenvalues(params, cfg);
    nlohmann::json j{{"eigenvalues", fd.eigenvalues},
                     {"richardson_shift", fd.richardson_shift},
                     {"coarse_warning", fd.coarse_warning}};
    if (opt.scan_level >= 0) {
        // rebuild the claimed QES state at this v2 and scan its residual
        const int n = opt.scan_level;
        const double e_level = qesdw::energy(n, v1, v3, g);
        const auto rc = qesdw::reduce(qesdw::PotentialParams{v1, 0.0, v3, g}, e_level);
        const double sigma = (qesdw::v2_from_sigma(0.0, v1, v3, g, e_level) - v2) / (4.0 * g);
        const auto coeffs = qesdw::expansion_coefficients(n, rc, sigma);
        const auto wf = qesdw::assemble_wavefunction(params, coeffs);
        std::vector<double> grid;
        for (double x = -3.0; x <= 3.0 + 1e-12; x += 0.05)
            grid.push_back(x);
        const auto scan = qesdw::ode_residual_scan(params, e_level, wf, grid);
        j["scan"] = {{"E", e_level},
                     {"sigma", sigma},
                     {"max_residual", scan.max_residual},
                     {"step_warning", scan.step_warning}};
        if (!opt.scan_output.empty()) {
            std::ofstream file(opt.scan_output);
            if (!file) {
                std::cerr << "cannot open scan output: " << opt.scan_output << "\n";
                return 1;
            }
            qesdw::write_scan_csv(file, scan);
        }
        if (!opt.psi_output.empty()) {
            std::ofstream file(opt.psi_output);
            if (!file) {
                std::cerr << "cannot open wavefunction output: " << opt.psi_output << "\n";
                return 1;
            }
            qesdw::write_wavefunction_csv(file, scan.x, scan.psi);
        }
    }
    return emit(opt.output, j.dump(2) + "\n");
}

int cmd_plot_potential(const Options& opt) {
    const double v1 = qesdw::parse_real_or_rational(opt.v1);
    const double v3 = qesdw::parse_real_or_rational(opt.v3);
    const double g = qesdw::parse_real_or_rational(opt.g);
    const double v2 = qesdw::parse_real_or_rational(opt.v2);
    if (!(g > 0.0)) {
        std::cerr << "invalid parameters: g must be > 0\n";
        return kExitInvalidParams;
    }
    const auto grid = qesdw::sample_grid({v1, v2, v3, g}, opt.x_min, opt.x_max, opt.n_points);
    std::ostringstream os;
    qesdw::write_grid_csv(os, grid);
    return emit(opt.output, os.str());
}

int cmd_plot_spectrum(const Options& opt) {
    const double v1 = qesdw::parse_real_or_rational(opt.v1);
    const double v3 = qesdw::parse_real_or_rational(opt.v3);
    const double g = qesdw::parse_real_or_rational(opt.g);
    if (!check_validity({v1, 0.0, v3, g}))
        return kExitInvalidParams;
    std::vector<std::pair<int, double>> rows;
    for (int n = 0; n <= opt.n_max; ++n)
        rows.emplace_back(n, qesdw::energy(n, v1, v3, g));
    std::ostringstream os;
    qesdw::write_spectrum_csv(os, rows);
    return emit(opt.output, os.str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-exactly-solvable double-well spectrum solver"};
    app.require_subcommand(1);
    Options opt;

    auto add_shape = [&opt](CLI::App* cmd) {
        cmd->add_option("--v1", opt.v1, "sech^2 coupling");
        cmd->add_option("--v3", opt.v3, "squared-bracket coupling");
        cmd->add_option("--g", opt.g, "shape parameter (decimal or rational like 1/4)");
    };
    auto add_output = [&opt](CLI::App* cmd) {
        cmd->add_option("--output", opt.output, "output path, or - for stdout");
    };
    auto add_multistart = [&opt](CLI::App* cmd) {
        cmd->add_option("--grid-starts", opt.grid_starts, "real-grid Newton starts");
        cmd->add_option("--circle-starts", opt.circle_starts, "complex-pair Newton starts");
        cmd->add_flag("--no-warm-starts", opt.no_warm_starts,
                      "disable seeding from the algebraic route");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve one level by either or both methods");
    solve->add_option("--n", opt.n, "level index")->required()->check(CLI::NonNegativeNumber);
    add_shape(solve);
    solve->add_option("--method", opt.method, "bethe | lie | both")
        ->check(CLI::IsMember({"bethe", "lie", "both"}));
    solve->add_option("--format", opt.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    solve->add_option("--dump-matrix", opt.matrix_output,
                      "CSV path for the level's tridiagonal matrix (sub/diag/super)");
    add_multistart(solve);
    add_output(solve);

    CLI::App* table1 = app.add_subcommand("table1", "reproduce the benchmark table (first four states)");
    add_multistart(table1);
    add_output(table1);

    CLI::App* cross = app.add_subcommand("cross-check", "compare the two routes level by level");
    cross->add_option("--n-max", opt.n_max, "highest level")->check(CLI::PositiveNumber);
    add_shape(cross);
    add_multistart(cross);
    add_output(cross);

    CLI::App* oracle = app.add_subcommand("oracle", "finite-difference eigenvalues and residual scans");
    add_shape(oracle);
    oracle->add_option("--v2", opt.v2, "middle-term coupling")->required();
    oracle->add_option("--x-max", opt.fd_x_max, "half-width of the truncated domain");
    oracle->add_option("--n-points", opt.fd_points, "interior grid points");
    oracle->add_option("--n-eigen", opt.fd_eigen, "number of lowest eigenvalues");
    oracle->add_option("--scan-level", opt.scan_level,
                       "also scan the Schrödinger residual of the level-n state at this v2");
    oracle->add_option("--scan-output", opt.scan_output, "CSV path for the residual scan");
    oracle->add_option("--psi-output", opt.psi_output, "CSV path for the scanned wavefunction");
    add_output(oracle);

    CLI::App* plotpot = app.add_subcommand("plot-potential", "CSV samples of V(x)");
    add_shape(plotpot);
    plotpot->add_option("--v2", opt.v2, "middle-term coupling")->required();
    plotpot->add_option("--x-min", opt.x_min, "grid start");
    plotpot->add_option("--x-max", opt.x_max, "grid end");
    plotpot->add_option("--n-points", opt.n_points, "grid size");
    add_output(plotpot);

    CLI::App* plotspec = app.add_subcommand("plot-spectrum", "CSV of (n, E)");
    add_shape(plotspec);
    plotspec->add_option("--n-max", opt.n_max, "highest level")->check(CLI::NonNegativeNumber);
    add_output(plotspec);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed())
            return cmd_solve(opt);
        if (table1->parsed())
            return cmd_table1(opt);
        if (cross->parsed())
            return cmd_cross_check(opt);
        if (oracle->parsed())
            return cmd_oracle(opt);
        if (plotpot->parsed())
            return cmd_plot_potential(opt);
        if (plotspec->parsed())
            return cmd_plot_spectrum(opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kExitInvalidParams;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kExitInvalidParams;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
