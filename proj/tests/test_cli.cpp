// End-to-end checks of the command-line tool: spawns the real binary.
// argv[1]: path to the binary; argv[2]: path to the repo data/ directory.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string g_binary;
std::string g_data_dir;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = g_binary + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), n);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

struct Csv {
    std::map<std::string, std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        REQUIRE_MESSAGE(false, "missing column ", name);
        return 0;
    }
    double num(std::size_t row, const std::string& name) const {
        return std::stod(rows[row][col(name)]);
    }
};

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::istringstream in(text);
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string k = line.substr(2, eq - 3);
                while (!k.empty() && k.back() == ' ') k.pop_back();
                csv.meta[k] = line.substr(eq + 2);
            }
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (!header_done) {
            csv.columns = fields;
            header_done = true;
        } else {
            csv.rows.push_back(fields);
        }
    }
    return csv;
}

}  // namespace

TEST_CASE("bound sweep over the delay target: monotone, well-formed table") {
    const auto res = run_cli(
        "bound --scheme mrt -M 2 --snr-db 5 --rho-kbps 24 --T-ms 1 -n 168 "
        "--sweep w --range 1:10:10");
    REQUIRE(res.exit_code == 0);
    const auto csv = parse_csv(res.out);
    CHECK(csv.meta.count("rho_nats_per_slot") == 1);
    CHECK(csv.meta.count("B") == 1);
    CHECK(csv.meta.count("version") == 1);
    CHECK(csv.meta.at("seed") == "1");
    REQUIRE(csv.rows.size() == 10);
    double prev = 2.0;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const double pv = csv.num(r, "p_v");
        CHECK(pv <= prev);
        CHECK(csv.rows[r][csv.col("status")] == "ok");
        prev = pv;
    }
}

TEST_CASE("CSV and JSONL encodings hold identical values") {
    const std::string args =
        "bound --scheme tas -M 3 --snr-db 2 --rho-kbps 24 --sweep w --range 1:5:5";
    const auto csv_run = run_cli(args + " --format csv");
    const auto json_run = run_cli(args + " --format jsonl");
    REQUIRE(csv_run.exit_code == 0);
    REQUIRE(json_run.exit_code == 0);
    const auto csv = parse_csv(csv_run.out);

    // pull p_v values out of the JSON lines (one object per row)
    std::vector<double> json_pv;
    std::istringstream in(json_run.out);
    std::string line;
    std::getline(in, line);  // meta object
    CHECK(line.find("\"meta\"") != std::string::npos);
    while (std::getline(in, line)) {
        const auto key = line.find("\"p_v\":");
        REQUIRE(key != std::string::npos);
        json_pv.push_back(std::stod(line.substr(key + 6)));
    }
    REQUIRE(json_pv.size() == csv.rows.size());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        CHECK(csv.num(r, "p_v") == json_pv[r]);  // bit-identical round trip
    }
}

TEST_CASE("simulate: deterministic output, bound column present") {
    const std::string args =
        "simulate --scheme mrt -M 1 --snr-db -2 --rho-kbps 24 --horizon 200000 "
        "--warmup 20000 --seed 42 --sweep w --range 1:6:6";
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);  // byte-identical reruns
    const auto c = run_cli(args + " --seed 43");
    CHECK(a.out != c.out);

    const auto csv = parse_csv(a.out);
    REQUIRE(csv.rows.size() == 6);
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        CHECK(csv.num(r, "p_v_bound") >= csv.num(r, "p_v_empirical"));
        CHECK(csv.num(r, "ci_high") >= csv.num(r, "p_v_empirical"));
        CHECK(csv.num(r, "ci_low") <= csv.num(r, "p_v_empirical") + 1e-15);
    }
}

TEST_CASE("simulate refuses an unstable configuration with exit code 3") {
    const auto res = run_cli(
        "simulate --scheme mrt -M 1 --snr-db -2 --rho-kbps 500 --horizon 100000");
    CHECK(res.exit_code == 3);
}

TEST_CASE("remaining sweep axes produce coherent tables") {
    SUBCASE("antenna sweep: p_v nonincreasing in M") {
        const auto res = run_cli(
            "bound --scheme mrt --snr-db 5 --rho-kbps 256 --w-ms 1 --sweep M --range 1:5");
        REQUIRE(res.exit_code == 0);
        const auto csv = parse_csv(res.out);
        REQUIRE(csv.rows.size() == 5);
        double prev = 2.0;
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            CHECK(csv.num(r, "p_v") <= prev);
            prev = csv.num(r, "p_v");
        }
    }
    SUBCASE("snr sweep: p_v nonincreasing in snr") {
        const auto res = run_cli(
            "bound --scheme mrt -M 2 --rho-kbps 200 --w-ms 2 --sweep snr --range 0:20:5");
        REQUIRE(res.exit_code == 0);
        const auto csv = parse_csv(res.out);
        double prev = 2.0;
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            CHECK(csv.num(r, "p_v") <= prev);
            prev = csv.num(r, "p_v");
        }
    }
    SUBCASE("CSI error sweep: p_v nondecreasing in sigma_e2") {
        const auto res = run_cli(
            "bound --scheme mrt -M 3 --snr-db 5 --rho-kbps 24 --w-ms 1 "
            "--sweep sigma_e2 --range 0:0.4:5");
        REQUIRE(res.exit_code == 0);
        const auto csv = parse_csv(res.out);
        double prev = 0.0;
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            CHECK(csv.num(r, "p_v") >= prev);
            CHECK(csv.num(r, "zeta") <= csv.num(0, "zeta"));
            prev = csv.num(r, "p_v");
        }
    }
    SUBCASE("blocklength sweep keeps the symbol time fixed") {
        const auto res = run_cli(
            "bound --scheme mrt -M 2 --snr-db 10 --rho-kbps 150 --w-ms 2 --fb --eps 1e-3 "
            "--nm 64 --sweep n --range 48:336:7");
        REQUIRE(res.exit_code == 0);
        const auto csv = parse_csv(res.out);
        REQUIRE(csv.rows.size() == 7);
        // arrival per slot grows with the slot airtime (n + n_m symbols)
        CHECK(csv.num(6, "rho_nats") > csv.num(0, "rho_nats"));
    }
}

TEST_CASE("sweep output does not depend on the worker pool size") {
    const std::string args =
        "epsopt --scheme mrt --snr-db 5 --rho-kbps 24 --w-ms 3 --fb --M-list 1,2 "
        "--range 1e-6:1e-1:8:log";
    const auto serial = run_cli(args + " --threads 1");
    const auto parallel = run_cli(args + " --threads 4");
    REQUIRE(serial.exit_code == 0);
    CHECK(serial.out == parallel.out);
}

TEST_CASE("config errors exit with code 2") {
    CHECK(run_cli("bound --scheme nosuch").exit_code == 2);
    CHECK(run_cli("bound --scheme mrt --sweep eps --range 1e-4:1e-2:5:log").exit_code == 2);
    CHECK(run_cli("bound --scheme mimo -M 2 -N 2").exit_code == 2);  // table missing
    CHECK(run_cli("nosuchcommand").exit_code == 2);
}

TEST_CASE("scenario file with flag overrides") {
    const std::string path = "/tmp/snc_cli_scenario_test.txt";
    {
        std::ofstream f(path);
        f << "# test scenario\n"
          << "scheme = mrt\n"
          << "M = 2\n"
          << "snr_db = 5\n"
          << "rho_kbps = 24\n"
          << "sweep = w\n"
          << "range = 1:4:4\n";
    }
    const auto base = run_cli("bound --scenario " + path);
    REQUIRE(base.exit_code == 0);
    const auto base_csv = parse_csv(base.out);
    CHECK(base_csv.meta.at("M") == "2");
    REQUIRE(base_csv.rows.size() == 4);

    const auto overridden = run_cli("bound --scenario " + path + " -M 3");
    REQUIRE(overridden.exit_code == 0);
    CHECK(parse_csv(overridden.out).meta.at("M") == "3");
    // more antennas, smaller violation bound
    CHECK(parse_csv(overridden.out).num(0, "p_v") < base_csv.num(0, "p_v"));

    const auto broken = run_cli("bound --scenario /nonexistent/file");
    CHECK(broken.exit_code == 2);
}

TEST_CASE("mimo scheme loads the shipped coefficient table") {
    const std::string table = g_data_dir + "/mimo_2x2.tbl";
    const auto res = run_cli("bound --scheme mimo -M 2 -N 2 --table " + table +
                             " --snr-db 3 --rho-kbps 24 --sweep w --range 1:3:3");
    REQUIRE(res.exit_code == 0);
    const auto csv = parse_csv(res.out);
    CHECK(csv.rows.size() == 3);

    // corrupted table: normalization check must reject it
    const std::string bad_path = "/tmp/snc_cli_bad_table.tbl";
    {
        std::ofstream f(bad_path);
        f << "1 0 2\n1 1 -2\n1 2 1\n2 0 -1.5\n";
    }
    CHECK(run_cli("bound --scheme mimo -M 2 -N 2 --table " + bad_path).exit_code == 2);
}

TEST_CASE("epsopt marks an interior argmin per antenna count") {
    const auto res = run_cli(
        "epsopt --scheme mrt --snr-db 5 --rho-kbps 24 --w-ms 3 --fb "
        "--M-list 1,2 --range 1e-7:0.3:10:log");
    REQUIRE(res.exit_code == 0);
    const auto csv = parse_csv(res.out);
    REQUIRE(csv.rows.size() == 20);
    int argmins = 0;
    for (std::size_t r = 0; r < csv.rows.size(); ++r)
        argmins += static_cast<int>(csv.num(r, "is_argmin"));
    CHECK(argmins == 2);
}

TEST_CASE("effcap: gaussian closed form is exact; columns converge to ergodic capacity") {
    const auto res = run_cli(
        "effcap --scheme gauss --gauss-mu 1.7 --gauss-sigma2 0.3 --theta 1e-3:1:7:log");
    REQUIRE(res.exit_code == 0);
    const auto csv = parse_csv(res.out);
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const double theta = csv.num(r, "theta");
        CHECK(std::fabs(csv.num(r, "effcap_npcu") - (1.7 - 0.5 * theta * 0.3)) < 1e-11);
        CHECK(std::fabs(csv.num(r, "effcap_gauss_npcu") - (1.7 - 0.5 * theta * 0.3)) < 1e-12);
    }
}

TEST_CASE("validate suite passes and is byte-deterministic") {
    const auto a = run_cli("validate");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out.find("VALIDATE OK") != std::string::npos);
    const auto b = run_cli("validate");
    CHECK(a.out == b.out);
}

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: test_cli <binary> <data-dir>\n");
        return 1;
    }
    g_binary = argv[1];
    g_data_dir = argv[2];
    doctest::Context ctx;
    return ctx.run();
}
