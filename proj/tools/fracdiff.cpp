// Scenario-driven front end: Mittag-Leffler evaluation, fractional
// operators on tabulated signals, solves, checks, and parameter sweeps.

#include <fracdiff/csv.hpp>
#include <fracdiff/fractional.hpp>
#include <fracdiff/mittag_leffler.hpp>
#include <fracdiff/scenario.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

int cmd_ml(double alpha, double beta, double z) {
    std::cout << fracdiff::format_double(fracdiff::ml(alpha, beta, z)) << "\n";
    return 0;
}

int cmd_frac_op(const std::string& op, double alpha, const std::string& input,
                const std::string& output) {
    const fracdiff::CsvTable t = fracdiff::read_csv(input);
    const std::size_t ct = t.column("t"), cy = t.column("y");
    fracdiff::TimeGrid g;
    std::vector<double> y;
    for (const auto& row : t.rows) {
        g.nodes.push_back(row[ct]);
        y.push_back(row[cy]);
    }
    if (g.nodes.size() < 3 || g.nodes.front() != 0.0)
        throw std::invalid_argument("frac-op: signal must start at t = 0");
    g.horizon = g.nodes.back();
    const fracdiff::TimeSignal sig(g, y);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!output.empty()) {
        file.open(output, std::ios::binary);
        out = &file;
    }
    *out << "t,y\n";
    if (op == "jint") {
        const fracdiff::TimeSignal r = fracdiff::rl_integral(sig, alpha);
        for (std::size_t k = 0; k < r.size(); ++k)
            *out << fracdiff::format_double(g.t(k)) << ',' << fracdiff::format_double(r[k]) << "\n";
    } else {
        const fracdiff::CaputoDerivative d = fracdiff::caputo_l1(sig, alpha);
        for (std::size_t k = 1; k <= g.steps(); ++k)
            *out << fracdiff::format_double(g.t(k)) << ',' << fracdiff::format_double(d.at(k))
                 << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for time-fractional diffusion with Robin boundary data"};
    app.require_subcommand(1);

    double alpha = 0.5, beta = 1.0, z = 0.0;
    auto* ml_cmd = app.add_subcommand("ml", "evaluate E_{alpha,beta}(z)");
    ml_cmd->add_option("--alpha", alpha, "order alpha in (0,1]")->required();
    ml_cmd->add_option("--beta", beta, "parameter beta > 0")->required();
    ml_cmd->add_option("--z", z, "real argument")->required();

    std::string op = "jint", input, output;
    auto* fo_cmd = app.add_subcommand("frac-op", "apply J^alpha or the L1 Caputo derivative");
    fo_cmd->add_option("--op", op, "jint or caputo")
        ->check(CLI::IsMember({"jint", "caputo"}))
        ->required();
    fo_cmd->add_option("--alpha", alpha, "fractional order")->required();
    fo_cmd->add_option("--input", input, "CSV with columns t,y")->required();
    fo_cmd->add_option("--out", output, "output CSV (default stdout)");

    std::string config, solver = "both", out_path = "out";
    auto* solve_cmd = app.add_subcommand("solve", "solve a scenario and write CSV fields");
    solve_cmd->add_option("--config", config, "scenario JSON")->required();
    solve_cmd->add_option("--solver", solver, "spectral, l1, or both")
        ->check(CLI::IsMember({"spectral", "l1", "both"}));
    solve_cmd->add_option("--out", out_path, "output directory");

    std::string check_name, report = "report.json";
    auto* check_cmd = app.add_subcommand("check", "run one check type from a scenario");
    check_cmd->add_option("name", check_name, "check type")
        ->check(CLI::IsMember({"positivity", "comparison", "c-mono", "sigma-mono",
                               "example-bound", "barrier", "extremum", "all"}));
    check_cmd->add_option("--config", config, "scenario JSON")->required();
    check_cmd->add_option("--report", report, "report JSON path");
    check_cmd->add_option("--out", out_path, "output directory");

    std::string param;
    std::vector<double> values;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a scenario over parameter values");
    sweep_cmd->add_option("--config", config, "scenario JSON")->required();
    sweep_cmd->add_option("--param", param, "dot path of a scalar in the scenario")->required();
    sweep_cmd->add_option("--values", values, "parameter values");
    sweep_cmd->add_option("--out", out_path, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ml_cmd->parsed()) return cmd_ml(alpha, beta, z);
        if (fo_cmd->parsed()) return cmd_frac_op(op, alpha, input, output);
        if (solve_cmd->parsed()) {
            const fracdiff::Scenario sc = fracdiff::load_scenario(config);
            const fracdiff::RunResult r = fracdiff::run_scenario(sc, out_path, solver);
            if (r.report.contains("error"))
                std::cerr << r.report.at("error").get<std::string>() << "\n";
            return r.exit_code;
        }
        if (check_cmd->parsed()) {
            fracdiff::Scenario sc = fracdiff::load_scenario(config);
            if (!check_name.empty() && check_name != "all" && sc.raw.contains("checks")) {
                // keep only the requested check type
                fracdiff::ordered_json kept = fracdiff::ordered_json::array();
                for (const auto& c : sc.raw.at("checks"))
                    if (c.at("type").get<std::string>() == check_name) kept.push_back(c);
                sc.raw["checks"] = kept;
            }
            sc.raw["output"]["report"] = report;
            const fracdiff::RunResult r = fracdiff::run_scenario(sc, out_path);
            if (r.report.contains("error"))
                std::cerr << r.report.at("error").get<std::string>() << "\n";
            return r.exit_code;
        }
        if (sweep_cmd->parsed()) {
            const fracdiff::Scenario sc = fracdiff::load_scenario(config);
            return fracdiff::sweep_scenario(sc, param, values, out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
