#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "scenario.hpp"
#include "snc/errors.hpp"

namespace {

void add_scenario_options(CLI::App* app, cli::Scenario& sc) {
    app->add_option("--scenario", "scenario file (key = value lines; loaded before flags)")
        ->type_name("FILE");
    app->add_option("--scheme", sc.scheme,
                    "mrt | mrt-sum | ostbc | tas | nakagami | gauss | lowsnr | highsnr | mimo | "
                    "hardening");
    app->add_option("-M,--antennas", sc.antennas, "transmit antennas");
    app->add_option("-N,--rx-antennas", sc.rx_antennas, "receive antennas (mimo)");
    app->add_option("--snr-db", sc.snr_db, "average SNR in dB");
    app->add_option("--sigma-e2", sc.sigma_e2, "CSI error variance");
    app->add_option("--nakagami-m", sc.nakagami_m, "Nakagami shape");
    app->add_option("--gauss-mu", sc.gauss_mu, "Gaussian service mean, nats");
    app->add_option("--gauss-sigma2", sc.gauss_sigma2, "Gaussian service variance, nats^2");
    app->add_option("--table", sc.table_path, "coefficient table for the mimo scheme");
    app->add_option("--rho-kbps", sc.rho_kbps, "arrival rate, kbit/s");
    app->add_option("--T-ms", sc.T_ms, "data-portion slot duration, ms");
    app->add_option("-n,--blocklength", sc.n, "data symbols per slot");
    app->add_option("--nm", sc.n_m, "metadata symbols per slot");
    app->add_flag("--fb,!--no-fb", sc.use_fb, "finite-blocklength service model");
    app->add_option("--eps", sc.eps, "block error probability");
    app->add_flag("--half-log", sc.half_log, "include the half-log blocklength rate term");
    app->add_option("--w-ms", sc.w_ms, "target delay, ms");
    app->add_option("--theta", sc.theta_range, "theta grid for effcap, lo:hi:count[:log]");
    app->add_option_function<std::string>(
           "--sweep", [&sc](const std::string& v) { sc.apply_key("sweep", v, "--sweep"); },
           "sweep axis: w | M | snr | eps | n | sigma_e2");
    app->add_option("--range", sc.range, "sweep range lo:hi:count[:log]");
    app->add_option_function<std::string>(
           "--M-list", [&sc](const std::string& v) { sc.apply_key("M_list", v, "--M-list"); },
           "comma-separated antenna counts (epsopt)");
    app->add_option("--format", sc.format, "csv | jsonl");
    app->add_option("-o,--output", sc.output, "output path, - for stdout");
    app->add_option("--seed", sc.seed, "simulation seed");
    app->add_option("--horizon", sc.horizon, "simulated slots");
    app->add_option("--warmup", sc.warmup, "warmup slots (-1: 10% of horizon)");
    app->add_option("--threads", sc.threads, "worker threads (0: auto)");
}

int emit(const cli::Table& table, const cli::Scenario& sc) {
    if (sc.output == "-") {
        cli::write_table(std::cout, table, sc.format);
        return cli::kOk;
    }
    std::ofstream out(sc.output, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file " << sc.output << "\n";
        return cli::kConfigError;
    }
    cli::write_table(out, table, sc.format);
    return cli::kOk;
}

// The scenario file establishes the defaults, flags override: the file is
// loaded before CLI11 writes any bound value.
std::string find_scenario_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--scenario" && i + 1 < argc) return argv[i + 1];
        if (a.rfind("--scenario=", 0) == 0) return a.substr(11);
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    cli::Scenario sc;
    try {
        const std::string path = find_scenario_path(argc, argv);
        if (!path.empty()) sc.apply_file(path);
    } catch (const snc::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::kConfigError;
    }

    CLI::App app{"Delay-violation bounds for multi-antenna fading channels"};
    app.require_subcommand(1);
    auto* bound = app.add_subcommand("bound", "analytic delay-violation bound over a sweep");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo queue next to the bound");
    auto* effcap = app.add_subcommand("effcap", "effective capacity over a theta grid");
    auto* epsopt = app.add_subcommand("epsopt", "block-error-rate optimization per antenna count");
    auto* validate = app.add_subcommand("validate", "oracle-equivalence and ordering suite");
    for (auto* cmd : {bound, simulate, effcap, epsopt, validate}) add_scenario_options(cmd, sc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kOk : cli::kConfigError;
    } catch (const snc::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::kConfigError;
    }

    try {
        if (validate->parsed()) {
            const bool ok = cli::cmd_validate(sc, std::cout);
            return ok ? cli::kOk : cli::kNumericFailure;
        }
        cli::Table table;
        if (bound->parsed()) table = cli::cmd_bound(sc);
        else if (simulate->parsed()) table = cli::cmd_simulate(sc);
        else if (effcap->parsed()) table = cli::cmd_effcap(sc);
        else if (epsopt->parsed()) table = cli::cmd_epsopt(sc);

        if ((bound->parsed() || epsopt->parsed()) && cli::all_rows_unstable(table)) {
            emit(table, sc);
            std::cerr << "error: queue unstable at every sweep point\n";
            return cli::kUnstable;
        }
        return emit(table, sc);
    } catch (const snc::unstable_error& e) {
        std::cerr << "unstable queue: " << e.what() << "\n";
        return cli::kUnstable;
    } catch (const snc::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::kConfigError;
    } catch (const snc::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::kConfigError;
    } catch (const snc::numeric_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return cli::kNumericFailure;
    }
}
