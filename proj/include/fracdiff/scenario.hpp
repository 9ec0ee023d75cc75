#pragma once

#include "checks.hpp"
#include "csv.hpp"
#include "picard.hpp"
#include "problem.hpp"
#include "solver_l1.hpp"
#include "solver_mild.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fracdiff {

using ordered_json = nlohmann::ordered_json;

/// Declarative problem description plus solver settings and a check list.
/// Physical functions are named built-ins with parameters or per-node CSV
/// tables; there is no expression language.
struct Scenario {
    std::string name;
    ordered_json raw;
    std::string base_dir; // for resolving table paths
};

namespace scenario_detail {

inline double num_or(const ordered_json& j, const char* key, double dflt) {
    return j.contains(key) ? j.at(key).get<double>() : dflt;
}

inline ScalarField parse_scalar(const ordered_json& spec, const Scenario& sc);

inline ScalarField table_field(const ordered_json& spec, const Scenario& sc) {
    const std::string path =
        (std::filesystem::path(sc.base_dir) / spec.at("path").get<std::string>()).string();
    const CsvTable t = read_csv(path);
    const std::size_t cx = t.column("x");
    const std::size_t cv = t.column("value");
    auto xs = std::make_shared<std::vector<double>>();
    auto vs = std::make_shared<std::vector<double>>();
    for (const auto& row : t.rows) {
        xs->push_back(row[cx]);
        vs->push_back(row[cv]);
    }
    return [xs, vs](const Point& p) {
        // nearest tabulated node; tables are expected to match the grid
        std::size_t best = 0;
        double bd = std::abs((*xs)[0] - p.x);
        for (std::size_t i = 1; i < xs->size(); ++i) {
            const double d = std::abs((*xs)[i] - p.x);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        return (*vs)[best];
    };
}

inline ScalarField parse_scalar(const ordered_json& spec, const Scenario& sc) {
    const std::string name = spec.at("name").get<std::string>();
    if (name == "constant") return const_field(num_or(spec, "value", 0.0));
    if (name == "zero") return const_field(0.0);
    if (name == "affine") {
        const double c = num_or(spec, "intercept", 0.0);
        const double sx = num_or(spec, "slope_x", 0.0);
        const double sy = num_or(spec, "slope_y", 0.0);
        return [=](const Point& p) { return c + sx * p.x + sy * p.y; };
    }
    if (name == "sin") {
        const double amp = num_or(spec, "amplitude", 1.0);
        const double freq = num_or(spec, "frequency", 1.0);
        const double off = num_or(spec, "offset", 0.0);
        return [=](const Point& p) { return off + amp * std::sin(M_PI * freq * p.x); };
    }
    if (name == "cos") {
        const double amp = num_or(spec, "amplitude", 1.0);
        const double freq = num_or(spec, "frequency", 1.0);
        const double off = num_or(spec, "offset", 0.0);
        return [=](const Point& p) { return off + amp * std::cos(M_PI * freq * p.x); };
    }
    if (name == "bump") {
        const double c = num_or(spec, "center", 0.5);
        const double w = num_or(spec, "width", 0.1);
        const double amp = num_or(spec, "amplitude", 1.0);
        return [=](const Point& p) {
            const double r = (p.x - c) / w;
            return amp * std::exp(-r * r);
        };
    }
    if (name == "table") return table_field(spec, sc);
    if (name == "sum") {
        std::vector<ScalarField> terms;
        for (const auto& t : spec.at("terms")) terms.push_back(parse_scalar(t, sc));
        return [terms](const Point& p) {
            double s = 0.0;
            for (const auto& f : terms) s += f(p);
            return s;
        };
    }
    throw std::invalid_argument("scenario: unknown scalar field '" + name + "'");
}

inline TimeField parse_time_field(const ordered_json& spec, const Scenario& sc) {
    const std::string name = spec.at("name").get<std::string>();
    if (name == "constant") {
        const double v = num_or(spec, "value", 0.0);
        return const_tfield(v);
    }
    if (name == "zero") return const_tfield(0.0);
    if (name == "power_time") {
        const double scale = num_or(spec, "scale", 1.0);
        const double expo = num_or(spec, "exponent", 0.0);
        return [=](const Point&, double t) {
            return scale * (expo == 0.0 ? 1.0 : std::pow(t, expo));
        };
    }
    if (name == "separable") {
        const ScalarField space = spec.contains("space")
                                      ? parse_scalar(spec.at("space"), sc)
                                      : const_field(1.0);
        const double scale = num_or(spec, "scale", 1.0);
        const double expo = num_or(spec, "exponent", 0.0);
        const double decay = num_or(spec, "decay", 0.0);
        return [=](const Point& p, double t) {
            const double tt = expo == 0.0 ? 1.0 : std::pow(t, expo);
            return space(p) * scale * tt * std::exp(-decay * t);
        };
    }
    if (name == "sum") {
        std::vector<TimeField> terms;
        for (const auto& t : spec.at("terms")) terms.push_back(parse_time_field(t, sc));
        return [terms](const Point& p, double t) {
            double s = 0.0;
            for (const auto& f : terms) s += f(p, t);
            return s;
        };
    }
    throw std::invalid_argument("scenario: unknown time field '" + name + "'");
}

} // namespace scenario_detail

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("scenario: cannot open " + path);
    Scenario sc;
    try {
        sc.raw = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("scenario: parse error in " + path + ": " + e.what());
    }
    sc.name = sc.raw.value("name", std::filesystem::path(path).stem().string());
    sc.base_dir = std::filesystem::path(path).parent_path().string();
    return sc;
}

/// Builds the discrete problem from the declarative form.
inline ProblemSpec build_problem(const Scenario& sc) {
    using scenario_detail::num_or;
    const ordered_json& pj = sc.raw.at("problem");
    const double alpha = pj.at("alpha").get<double>();

    const ordered_json& sj = pj.at("space");
    SpaceGrid grid;
    if (sj.value("dimension", 1) == 1)
        grid = SpaceGrid::interval(sj.at("length")[0].get<double>(),
                                   sj.at("nodes")[0].get<std::size_t>());
    else
        grid = SpaceGrid::rectangle(sj.at("length")[0].get<double>(),
                                    sj.at("length")[1].get<double>(),
                                    sj.at("nodes")[0].get<std::size_t>(),
                                    sj.at("nodes")[1].get<std::size_t>());

    const ordered_json& tj = pj.at("time");
    const double T = tj.at("horizon").get<double>();
    const std::size_t steps = tj.at("steps").get<std::size_t>();
    TimeGrid tgrid;
    if (tj.contains("grading")) {
        double gamma;
        if (tj.at("grading").is_string() && tj.at("grading").get<std::string>() == "auto")
            gamma = 2.0 / alpha;
        else
            gamma = tj.at("grading").get<double>();
        tgrid = gamma == 1.0 ? TimeGrid::uniform(T, steps) : TimeGrid::graded(T, steps, gamma);
    } else {
        tgrid = TimeGrid::uniform(T, steps);
    }

    CoefficientSet co;
    if (pj.contains("coefficients")) {
        const ordered_json& cj = pj.at("coefficients");
        if (cj.contains("a")) co.a = scenario_detail::parse_scalar(cj.at("a"), sc);
        if (cj.contains("b")) {
            const auto& bj = cj.at("b");
            co.b[0] = scenario_detail::parse_time_field(bj.at(0), sc);
            if (bj.size() > 1) co.b[1] = scenario_detail::parse_time_field(bj.at(1), sc);
        }
        if (cj.contains("c")) co.c = scenario_detail::parse_time_field(cj.at("c"), sc);
        if (cj.contains("b0")) co.b0 = scenario_detail::parse_time_field(cj.at("b0"), sc);
        if (cj.contains("sigma")) co.sigma = scenario_detail::parse_scalar(cj.at("sigma"), sc);
        co.c0 = num_or(cj, "c0", 0.0);
    }

    const ScalarField init = pj.contains("initial")
                                 ? scenario_detail::parse_scalar(pj.at("initial"), sc)
                                 : const_field(0.0);
    const TimeField source = pj.contains("source")
                                 ? scenario_detail::parse_time_field(pj.at("source"), sc)
                                 : const_tfield(0.0);
    return ProblemSpec::build(alpha, grid, tgrid, co, init, source);
}

struct SolverSettings {
    std::size_t m_modes = 32;
    double tol = 1e-10;
    std::size_t max_sweeps = 40;
};

inline SolverSettings solver_settings(const Scenario& sc) {
    SolverSettings s;
    if (!sc.raw.contains("solver")) return s;
    const ordered_json& j = sc.raw.at("solver");
    if (j.contains("m_modes")) s.m_modes = j.at("m_modes").get<std::size_t>();
    if (j.contains("tol")) s.tol = j.at("tol").get<double>();
    if (j.contains("max_sweeps")) s.max_sweeps = j.at("max_sweeps").get<std::size_t>();
    return s;
}

inline ordered_json report_json(const CheckReport& r) {
    ordered_json j;
    j["check_name"] = r.check_name;
    j["pass"] = r.pass;
    j["worst_violation"] = r.worst_violation;
    j["witness"] = ordered_json{{"ix", r.witness.ix}, {"it", r.witness.it}};
    j["tolerance"] = r.tolerance;
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(r.fingerprint));
    j["fingerprint"] = std::string(buf);
    return j;
}

struct RunResult {
    int exit_code = 0;
    ordered_json report;
};

/// Executes a scenario: solves with the requested solvers, runs the declared
/// checks in order, writes CSV solutions and the JSON report. Exit code 0
/// when every check passes, 2 on a check failure, 1 on solver, config, or
/// hypothesis errors.
inline RunResult run_scenario(const Scenario& sc, const std::string& out_dir,
                              const std::string& solver_choice = "") {
    using scenario_detail::num_or;
    RunResult res;
    ordered_json& rep = res.report;
    rep["scenario"] = sc.name;
    rep["checks"] = ordered_json::array();

    try {
        const ProblemSpec p = build_problem(sc);
        const SolverSettings ss = solver_settings(sc);
        std::string choice = solver_choice;
        if (choice.empty()) choice = sc.raw.value("solvers", std::string("l1"));

        std::filesystem::create_directories(out_dir);
        std::optional<Field> spectral, l1;
        const auto get_field = [&](const std::string& which) -> const Field& {
            if (which == "spectral") {
                if (!spectral) spectral = solve_mild(p, ss.m_modes, ss.tol, ss.max_sweeps);
                return *spectral;
            }
            if (!l1) l1 = solve_l1(p);
            return *l1;
        };
        if (choice == "spectral" || choice == "both") get_field("spectral");
        if (choice == "l1" || choice == "both") get_field("l1");

        const auto solve_variant = [&](ProblemSpec q, const std::string& which) {
            return which == "spectral" ? solve_mild(q, ss.m_modes, ss.tol, ss.max_sweeps)
                                       : solve_l1(q);
        };

        bool any_fail = false;
        if (sc.raw.contains("checks")) {
            for (const ordered_json& cj : sc.raw.at("checks")) {
                const std::string type = cj.at("type").get<std::string>();
                const std::string which = cj.value("solver", std::string("l1"));
                const double tol = num_or(cj, "tolerance", 1e-6);
                CheckReport r;
                if (type == "positivity") {
                    r = check_positivity(get_field(which), tol);
                    r.fingerprint = fingerprint(p);
                } else if (type == "comparison") {
                    ProblemSpec p2 = p;
                    if (cj.contains("source_bump")) {
                        const TimeField bump =
                            scenario_detail::parse_time_field(cj.at("source_bump"), sc);
                        for (std::size_t i = 0; i < p2.grid.size(); ++i)
                            for (std::size_t k = 0; k <= p2.tgrid.steps(); ++k)
                                p2.F(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) +=
                                    bump(p2.grid.node(i), p2.tgrid.t(k));
                    }
                    if (cj.contains("initial_bump")) {
                        const ScalarField bump =
                            scenario_detail::parse_scalar(cj.at("initial_bump"), sc);
                        for (std::size_t i = 0; i < p2.grid.size(); ++i)
                            p2.a(static_cast<Eigen::Index>(i)) += bump(p2.grid.node(i));
                    }
                    r = check_comparison(solve_variant(p2, which), get_field(which), tol);
                    r.fingerprint = fingerprint(p);
                } else if (type == "c-mono") {
                    r = check_c_monotonicity(p, scenario_detail::parse_time_field(cj.at("c1"), sc),
                                             scenario_detail::parse_time_field(cj.at("c2"), sc),
                                             tol);
                } else if (type == "sigma-mono") {
                    r = check_sigma_monotonicity(
                        p, scenario_detail::parse_scalar(cj.at("sigma1"), sc),
                        scenario_detail::parse_scalar(cj.at("sigma2"), sc),
                        cj.at("sigma0").get<double>(), tol);
                } else if (type == "example-bound") {
                    r = check_example_bound(p, get_field(which), cj.at("delta").get<double>(),
                                            cj.value("beta", 0.0), tol);
                } else if (type == "barrier") {
                    const BarrierParams bp = make_barrier_params(p, num_or(cj, "epsilon", 1e-3));
                    r = barrier_certificate(get_field(which), p, bp, tol);
                } else if (type == "extremum") {
                    const std::size_t ix = cj.value("ix", p.grid.size() / 2);
                    const Field& f = get_field(which);
                    TimeSignal y(p.tgrid,
                                 std::vector<double>(static_cast<std::size_t>(f.values.cols())));
                    for (Eigen::Index k = 0; k < f.values.cols(); ++k)
                        y[static_cast<std::size_t>(k)] = f.values(static_cast<Eigen::Index>(ix), k);
                    r = extremum_principle_probe(y, p.alpha, tol);
                    r.fingerprint = fingerprint(p);
                } else {
                    throw std::runtime_error("scenario: unknown check type '" + type + "'");
                }
                rep["checks"].push_back(report_json(r));
                if (!r.pass) any_fail = true;
            }
        }

        const std::string stem = sc.raw.contains("output") &&
                                         sc.raw.at("output").contains("solution")
                                     ? sc.raw.at("output").at("solution").get<std::string>()
                                     : std::string("u");
        ordered_json solvers_j;
        if (spectral) {
            write_field_csv((std::filesystem::path(out_dir) / (stem + "_spectral.csv")).string(),
                            *spectral);
            ordered_json s;
            s["iteration_report"] = spectral->iteration_report;
            s["truncation_warning"] = spectral->truncation_warning;
            s["truncation_loss"] = spectral->truncation_loss;
            s["tol"] = ss.tol;
            s["m_modes"] = ss.m_modes;
            solvers_j["spectral"] = s;
        }
        if (l1) {
            write_field_csv((std::filesystem::path(out_dir) / (stem + "_l1.csv")).string(), *l1);
            solvers_j["l1"] = ordered_json::object();
        }
        rep["solvers"] = solvers_j;
        res.exit_code = any_fail ? 2 : 0;
    } catch (const PreconditionError& e) {
        rep["error"] = std::string("precondition: ") + e.what();
        res.exit_code = 1;
    } catch (const std::exception& e) {
        rep["error"] = e.what();
        res.exit_code = 1;
    }

    std::filesystem::create_directories(out_dir);
    const std::string rep_name = sc.raw.contains("output") &&
                                         sc.raw.at("output").contains("report")
                                     ? sc.raw.at("output").at("report").get<std::string>()
                                     : std::string("report.json");
    std::ofstream out(std::filesystem::path(out_dir) / rep_name, std::ios::binary);
    out << rep.dump(2) << "\n";
    return res;
}

/// Runs the scenario once per value of a scalar parameter (dot path into
/// the config), aggregating the reports and a plot-ready CSV.
inline int sweep_scenario(const Scenario& sc, const std::string& param,
                          const std::vector<double>& values, const std::string& out_dir) {
    std::string pointer = "/" + param;
    for (auto& ch : pointer)
        if (ch == '.') ch = '/';
    ordered_json probe = sc.raw;
    if (!values.empty()) {
        try {
            probe.at(nlohmann::json_pointer<std::string>(pointer));
        } catch (const std::exception&) {
            std::cerr << "sweep: unknown parameter path '" << param << "'\n";
            return 1;
        }
    }

    std::filesystem::create_directories(out_dir);
    ordered_json all = ordered_json::array();
    std::ofstream csv(std::filesystem::path(out_dir) / "sweep.csv", std::ios::binary);
    csv << "value,check_name,worst_violation\n";
    int worst_exit = 0;
    for (double v : values) {
        Scenario s2 = sc;
        s2.raw[nlohmann::json_pointer<std::string>(pointer)] = v;
        const std::string sub =
            (std::filesystem::path(out_dir) / (param + "=" + format_double(v))).string();
        RunResult r = run_scenario(s2, sub);
        ordered_json entry;
        entry["value"] = v;
        entry["report"] = r.report;
        all.push_back(entry);
        if (r.report.contains("checks"))
            for (const auto& c : r.report.at("checks"))
                csv << format_double(v) << ',' << c.at("check_name").get<std::string>() << ','
                    << format_double(c.at("worst_violation").get<double>()) << "\n";
        worst_exit = std::max(worst_exit, r.exit_code);
    }
    std::ofstream out(std::filesystem::path(out_dir) / "sweep.json", std::ios::binary);
    out << all.dump(2) << "\n";
    return worst_exit;
}

} // namespace fracdiff
