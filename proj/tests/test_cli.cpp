#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "driven/propagator.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code{-1};
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / "driven_cli_test";
    fs::create_directories(dir);
    const fs::path out_file = dir / ("out" + std::to_string(counter) + ".txt");
    const fs::path err_file = dir / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string(DRIVEN_CLI_PATH) + " " + args + " > " +
                            out_file.string() + " 2> " + err_file.string();
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WEXITSTATUS(raw);
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

std::vector<std::string> data_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    bool seen_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header) {
            seen_header = true;  // column header
            continue;
        }
        rows.push_back(line);
    }
    return rows;
}

int column_count(const std::string& row) {
    return static_cast<int>(std::count(row.begin(), row.end(), ',')) + 1;
}

const char* kFastRun = "--set t_end_over_ts=0.5 --set store_stride=100";

}  // namespace

TEST_CASE("simulate emits a deterministic well-formed CSV") {
    const std::string args = std::string("simulate --engine unitary ") + kFastRun;
    const CliResult first = run_cli(args);
    REQUIRE(first.exit_code == 0);
    const CliResult second = run_cli(args);
    CHECK(first.out == second.out);  // byte-identical

    const auto rows = data_rows(first.out);
    REQUIRE(rows.size() == 6);  // t = 0 plus 5 strides
    for (const std::string& row : rows) CHECK(column_count(row) == 7);
    // >= 12 significant digits in scientific notation
    CHECK(rows.front().find("0.000000000000e+00") != std::string::npos);
    // resolved config echoed, defaults included
    CHECK(first.out.find("# lambda_Omega = ") != std::string::npos);
    CHECK(first.out.find("# tn_chi_max = 64") != std::string::npos);
}

TEST_CASE("unknown keys and bad values exit with a config error") {
    CHECK(run_cli("simulate --set nonsense_key=1").exit_code == 1);
    CHECK(run_cli("simulate --set lambda_Omega=abc").exit_code == 1);
    const CliResult r = run_cli("simulate --set nonsense_key=1");
    CHECK(r.err.find("nonsense_key") != std::string::npos);
}

TEST_CASE("config file parsing") {
    const fs::path dir = fs::temp_directory_path() / "driven_cli_test";
    fs::create_directories(dir);
    const fs::path cfg = dir / "run.conf";
    {
        std::ofstream f(cfg);
        f << "# comment line\n";
        f << "engine = unitary\n";
        f << "t_end_over_ts = 0.3   # trailing comment\n";
        f << "dt_over_ts = 1e-3\n";
        f << "store_stride = 300\n";
    }
    const CliResult r = run_cli("simulate --config " + cfg.string());
    CHECK(r.exit_code == 0);
    CHECK(data_rows(r.out).size() == 2);

    const fs::path bad = dir / "bad.conf";
    {
        std::ofstream f(bad);
        f << "no equals sign here\n";
    }
    CHECK(run_cli("simulate --config " + bad.string()).exit_code == 1);
}

TEST_CASE("unitary engine warns when bath keys are set explicitly") {
    const CliResult r =
        run_cli(std::string("simulate --engine unitary --set a=0.1 ") + kFastRun);
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("ignores the bath keys") != std::string::npos);

    const CliResult quiet = run_cli(std::string("simulate --engine unitary ") + kFastRun);
    CHECK(quiet.err.find("ignores") == std::string::npos);
}

TEST_CASE("analytic engine requires the interaction picture") {
    CHECK(run_cli("simulate --engine analytic").exit_code == 1);
    const CliResult ok = run_cli(
        std::string("simulate --engine analytic --set picture=interaction ") + kFastRun);
    CHECK(ok.exit_code == 0);
    CHECK(data_rows(ok.out).size() == 6);
}

TEST_CASE("tn engine emits bond diagnostics columns") {
    const CliResult r = run_cli(
        "simulate --engine tn --set tn_modes=3 --set tn_wmax_over_omega0=3 "
        "--set tn_dt_over_ts=5e-3 --set t_end_over_ts=0.25 --set store_stride=25 "
        "--set TB_over_omega0=0.5 --set tn_gibbs_weight_tol=1e-2");
    REQUIRE(r.exit_code == 0);
    const auto rows = data_rows(r.out);
    REQUIRE(!rows.empty());
    for (const std::string& row : rows) CHECK(column_count(row) == 9);
}

TEST_CASE("check-validity reports and exit codes") {
    CHECK(run_cli("check-validity").exit_code == 0);  // reference defaults pass
    const CliResult strong = run_cli("check-validity --set a=0.5");
    CHECK(strong.exit_code == 3);
    CHECK(strong.out.find("weak_coupling: fail") != std::string::npos);
    const CliResult undriven = run_cli("check-validity --set lambda_Omega=0");
    CHECK(undriven.exit_code == 0);
    CHECK(undriven.out.find("driving: pass") != std::string::npos);
}

TEST_CASE("sweep writes per-value files and an ordered summary") {
    const fs::path dir = fs::temp_directory_path() / "driven_cli_test";
    fs::create_directories(dir);
    const std::string prefix = (dir / "sw").string();
    const CliResult r = run_cli("sweep --key lambda_omega --values 5,10,20 --out " + prefix +
                                " --set engine=unitary " + kFastRun);
    REQUIRE(r.exit_code == 0);
    for (const char* v : {"5", "10", "20"})
        CHECK(fs::exists(prefix + "_lambda_omega=" + std::string(v) + ".csv"));
    const std::string summary = slurp(prefix + "_summary.csv");
    const auto rows = data_rows(summary);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].rfind("5,", 0) == 0);
    CHECK(rows[1].rfind("10,", 0) == 0);
    CHECK(rows[2].rfind("20,", 0) == 0);
    for (const auto& row : rows) CHECK(row.find(",ok") != std::string::npos);
}

TEST_CASE("sweep records failed runs without stopping the rest") {
    const fs::path dir = fs::temp_directory_path() / "driven_cli_test";
    const std::string prefix = (dir / "swf").string();
    const CliResult r = run_cli("sweep --key a --values 5e-3,0 --out " + prefix + " " +
                                std::string(kFastRun));
    REQUIRE(r.exit_code == 0);
    const auto rows = data_rows(slurp(prefix + "_summary.csv"));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].find(",ok") != std::string::npos);
    CHECK(rows[1].find("ok") == std::string::npos);  // the a = 0 run fails validation

    CHECK(run_cli("sweep --key a --values , --out " + prefix).exit_code == 1);
    CHECK(run_cli("sweep --key engine --values tdme --out " + prefix).exit_code == 1);
}

TEST_CASE("strong-driving expansion error falls off with the swept frequency") {
    // the sweep exposes the runs; the error column itself comes from the RK4 oracle
    const double horizon = 2.0 * M_PI / 5.0;
    std::vector<double> errors;
    for (double lw : {5.0, 10.0, 20.0}) {
        const driven::DriveParams p{1.0, 1.0, lw};
        const driven::PropagatorTrajectory exact = driven::propagate_closed(p, horizon, 1e-4, 20);
        double worst = 0.0;
        for (const driven::PropagatorEntries& e : exact.samples) {
            const driven::PropagatorEntries approx =
                driven::strong_driving_expansion(e.t, p, driven::StrongForm::first_order);
            worst = std::max(worst, std::abs(e.beta - approx.beta));
        }
        errors.push_back(worst);
    }
    CHECK(errors[0] > errors[1]);
    CHECK(errors[1] > errors[2]);
    CHECK(errors[0] / errors[1] > 1.4);
    CHECK(errors[0] / errors[1] < 3.2);
    CHECK(errors[1] / errors[2] > 1.4);
    CHECK(errors[1] / errors[2] < 3.2);
}
