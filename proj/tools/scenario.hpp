#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snc/bound.hpp"
#include "snc/channel.hpp"

namespace cli {

enum class SweepAxis { None, W, Antennas, SnrDb, Eps, Blocklength, SigmaE2 };

const char* sweep_axis_name(SweepAxis axis);

/// One experiment description: a scheme, traffic, slot geometry, optional
/// finite-blocklength model and exactly one sweep axis. Assembled from a
/// flat key=value scenario file plus command-line overrides.
struct Scenario {
    std::string scheme = "mrt";
    int antennas = 1;        // M
    int rx_antennas = 1;     // N
    double snr_db = 0.0;
    double sigma_e2 = 0.0;
    double nakagami_m = 1.0;
    double gauss_mu = 0.0;
    double gauss_sigma2 = 0.0;
    std::string table_path;

    double rho_kbps = 24.0;
    double T_ms = 1.0;
    int n = 168;
    int n_m = 0;

    bool use_fb = false;
    double eps = 1e-3;
    bool half_log = false;

    double w_ms = 1.0;
    std::vector<double> w_ms_grid;   // simulate/bound sweep over w
    std::string theta_range = "1e-4:1:25:log";

    SweepAxis sweep = SweepAxis::None;
    std::string range;               // "lo:hi:count[:log]"
    std::vector<int> antenna_list;   // epsopt curves

    std::string format = "csv";      // csv | jsonl
    std::string output = "-";
    std::uint64_t seed = 1;
    long horizon = 10'000'000;
    long warmup = -1;                // -1: 10% of horizon
    int threads = 0;                 // 0: hardware default

    /// Parse `key = value` lines; '#' starts a comment.
    void apply_file(const std::string& path);
    void apply_key(const std::string& key, const std::string& value, const std::string& where);
    void finalize() const;  // cross-field validation; throws config_error

    snc::SchemeSpec scheme_spec() const;
    snc::SlotSpec slot_spec() const;
    double snr_linear() const;
    /// Arrival rate accumulated over the full slot airtime, nats/slot.
    double rho_nats(const snc::SlotSpec& slot) const;
    long w_slots(const snc::SlotSpec& slot, double w_ms_target) const;
    std::optional<snc::FiniteBlocklengthSpec> fb_spec() const;

    /// Resolved parameters for output headers, insertion-ordered.
    std::vector<std::pair<std::string, std::string>> metadata() const;
};

/// "lo:hi:count" (linear) or "lo:hi:count:log" (geometric), inclusive.
std::vector<double> parse_range(const std::string& text);

}  // namespace cli
