#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fracdiff/csv.hpp>
#include <fracdiff/gamma.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string cli = FRACDIFF_CLI_PATH;
const std::string scenario_dir = FRACDIFF_SCENARIO_DIR;
const std::string fixture_dir = FRACDIFF_FIXTURE_DIR;

// run through sh, return the process exit code
int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string capture(const std::string& cmd) {
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[256];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    pclose(pipe);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() / ("fracdiff_cli_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("ml subcommand evaluates the kernel function") {
    const std::string out = capture("'" + cli + "' ml --alpha 0.5 --beta 1 --z -1");
    CHECK(std::abs(fracdiff::parse_double(out.substr(0, out.find('\n'))) -
                   0.42758357615580700) < 1e-13);
    // invalid subcommand arguments fail fast
    CHECK(run("'" + cli + "' ml --alpha 0.5 >/dev/null 2>&1") != 0);
}

TEST_CASE("frac-op integrates a tabulated quadratic") {
    const fs::path dir = fresh_dir("fracop");
    const fs::path out = dir / "jint.csv";
    CHECK(run("'" + cli + "' frac-op --op jint --alpha 0.5 --input '" + fixture_dir +
              "/signal_t2.csv' --out '" + out.string() + "'") == 0);
    const fracdiff::CsvTable t = fracdiff::read_csv(out.string());
    const std::size_t ct = t.column("t"), cy = t.column("y");
    for (const auto& row : t.rows) {
        const double exact = fracdiff::gamma_fn(3.0) / fracdiff::gamma_fn(3.5) *
                             std::pow(row[ct], 2.5);
        CHECK(std::abs(row[cy] - exact) < 1e-2);
    }
    // the dump uses LF endings only
    CHECK(slurp(out).find('\r') == std::string::npos);
}

TEST_CASE("solve writes both fields and a report") {
    const fs::path dir = fresh_dir("solve");
    CHECK(run("'" + cli + "' solve --config '" + scenario_dir + "/example1.json' --out '" +
              dir.string() + "'") == 0);
    CHECK(fs::exists(dir / "u_spectral.csv"));
    CHECK(fs::exists(dir / "u_l1.csv"));
    CHECK(fs::exists(dir / "report.json"));

    // round trip: parse the dump and rewrite it bitwise identically
    const fs::path copy = dir / "copy.csv";
    fracdiff::Field u = fracdiff::read_field_csv((dir / "u_spectral.csv").string());
    CHECK(u.values.rows() == 21);
    CHECK(u.values.cols() == 65);
    fracdiff::write_field_csv(copy.string(), u);
    CHECK(slurp(copy) == slurp(dir / "u_spectral.csv"));
}

TEST_CASE("check subcommand exit codes") {
    const fs::path dir = fresh_dir("check");
    SUBCASE("a passing check exits 0") {
        CHECK(run("'" + cli + "' check positivity --config '" + scenario_dir +
                  "/example1.json' --out '" + dir.string() + "' >/dev/null") == 0);
        const std::string rep = slurp(dir / "report.json");
        CHECK(rep.find("\"check_name\": \"positivity\"") != std::string::npos);
        CHECK(rep.find("\"pass\": true") != std::string::npos);
    }
    SUBCASE("a violated hypothesis exits 1") {
        CHECK(run("'" + cli + "' check sigma-mono --config '" + fixture_dir +
                  "/sigma_reversed.json' --out '" + dir.string() + "' 2>/dev/null") == 1);
        CHECK(slurp(dir / "report.json").find("precondition") != std::string::npos);
    }
    SUBCASE("a failed check exits 2") {
        CHECK(run("'" + cli + "' check comparison --config '" + fixture_dir +
                  "/comparison_violation.json' --out '" + dir.string() + "'") == 2);
        CHECK(slurp(dir / "report.json").find("\"pass\": false") != std::string::npos);
    }
}

TEST_CASE("outputs do not depend on the worker count") {
    const fs::path d1 = fresh_dir("thr1");
    const fs::path d2 = fresh_dir("thr2");
    CHECK(run("FRACDIFF_THREADS=1 '" + cli + "' solve --config '" + scenario_dir +
              "/example1.json' --out '" + d1.string() + "'") == 0);
    CHECK(run("FRACDIFF_THREADS=2 '" + cli + "' solve --config '" + scenario_dir +
              "/example1.json' --out '" + d2.string() + "'") == 0);
    CHECK(slurp(d1 / "u_spectral.csv") == slurp(d2 / "u_spectral.csv"));
    CHECK(slurp(d1 / "u_l1.csv") == slurp(d2 / "u_l1.csv"));
    CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
}

TEST_CASE("sweep subcommand") {
    SUBCASE("a scalar path sweeps cleanly") {
        const fs::path dir = fresh_dir("sweep");
        CHECK(run("'" + cli + "' sweep --config '" + scenario_dir +
                  "/example1.json' --param problem.alpha --values 0.5 0.6 --out '" +
                  dir.string() + "'") == 0);
        CHECK(fs::exists(dir / "sweep.json"));
        CHECK(fs::exists(dir / "problem.alpha=0.5" / "report.json"));
        CHECK(fs::exists(dir / "problem.alpha=0.6" / "report.json"));
        const std::string csv = slurp(dir / "sweep.csv");
        CHECK(csv.rfind("value,check_name,worst_violation", 0) == 0);
        CHECK(csv.find("0.6,example_bound,") != std::string::npos);
    }
    SUBCASE("an unknown parameter path exits 1") {
        const fs::path dir = fresh_dir("sweep_bad");
        CHECK(run("'" + cli + "' sweep --config '" + scenario_dir +
                  "/example1.json' --param problem.nonsense --values 1 --out '" + dir.string() +
                  "' 2>/dev/null") == 1);
    }
    SUBCASE("an empty value list is a no-op") {
        const fs::path dir = fresh_dir("sweep_empty");
        CHECK(run("'" + cli + "' sweep --config '" + scenario_dir +
                  "/example1.json' --param problem.alpha --out '" + dir.string() + "'") == 0);
    }
}

TEST_CASE("malformed configuration exits 1") {
    const fs::path dir = fresh_dir("badcfg");
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(run("'" + cli + "' solve --config '" + bad.string() + "' --out '" + dir.string() +
              "' 2>/dev/null") == 1);
    CHECK(run("'" + cli + "' solve --config '" + (dir / "missing.json").string() + "' --out '" +
              dir.string() + "' 2>/dev/null") == 1);
}
