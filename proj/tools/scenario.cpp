#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "snc/errors.hpp"
#include "snc/version.hpp"

namespace cli {

namespace {

constexpr double kLn2 = 0.6931471805599453;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw snc::config_error("bad numeric value for " + what + ": `" + v + "`");
    }
}

long to_long(const std::string& v, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw snc::config_error("bad integer value for " + what + ": `" + v + "`");
    }
}

bool to_bool(const std::string& v, const std::string& what) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw snc::config_error("bad boolean value for " + what + ": `" + v + "`");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const char* sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::None: return "none";
        case SweepAxis::W: return "w";
        case SweepAxis::Antennas: return "M";
        case SweepAxis::SnrDb: return "snr";
        case SweepAxis::Eps: return "eps";
        case SweepAxis::Blocklength: return "n";
        case SweepAxis::SigmaE2: return "sigma_e2";
    }
    return "?";
}

std::vector<double> parse_range(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    bool log_spaced = false;
    if (!parts.empty() && (parts.back() == "log" || parts.back() == "lin")) {
        log_spaced = parts.back() == "log";
        parts.pop_back();
    }
    if (parts.size() == 2) parts.push_back("");  // integer-style lo:hi
    if (parts.size() != 3) throw snc::config_error("range must be `lo:hi:count[:log]`: " + text);
    const double lo = to_double(parts[0], "range lo");
    const double hi = to_double(parts[1], "range hi");
    long count;
    if (parts[2].empty()) {
        count = std::lround(hi - lo) + 1;  // unit-step integer range
    } else {
        count = to_long(parts[2], "range count");
    }
    if (count < 1 || count > 100000) throw snc::config_error("range count out of bounds: " + text);
    if (count == 1) return {lo};
    if (log_spaced && !(lo > 0.0 && hi > 0.0))
        throw snc::config_error("log range needs positive endpoints: " + text);
    std::vector<double> out;
    out.reserve(count);
    for (long k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(count - 1);
        out.push_back(log_spaced ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
    }
    return out;
}

void Scenario::apply_key(const std::string& key, const std::string& value,
                         const std::string& where) {
    const std::string v = trim(value);
    if (key == "scheme") scheme = v;
    else if (key == "M" || key == "antennas") antennas = static_cast<int>(to_long(v, key));
    else if (key == "N" || key == "rx_antennas") rx_antennas = static_cast<int>(to_long(v, key));
    else if (key == "snr_db") snr_db = to_double(v, key);
    else if (key == "sigma_e2") sigma_e2 = to_double(v, key);
    else if (key == "nakagami_m") nakagami_m = to_double(v, key);
    else if (key == "gauss_mu") gauss_mu = to_double(v, key);
    else if (key == "gauss_sigma2") gauss_sigma2 = to_double(v, key);
    else if (key == "table") table_path = v;
    else if (key == "rho_kbps") rho_kbps = to_double(v, key);
    else if (key == "T_ms") T_ms = to_double(v, key);
    else if (key == "n") n = static_cast<int>(to_long(v, key));
    else if (key == "n_m" || key == "nm") n_m = static_cast<int>(to_long(v, key));
    else if (key == "fb") use_fb = to_bool(v, key);
    else if (key == "eps") eps = to_double(v, key);
    else if (key == "half_log") half_log = to_bool(v, key);
    else if (key == "w_ms") w_ms = to_double(v, key);
    else if (key == "theta") theta_range = v;
    else if (key == "sweep") {
        if (v == "w") sweep = SweepAxis::W;
        else if (v == "M") sweep = SweepAxis::Antennas;
        else if (v == "snr") sweep = SweepAxis::SnrDb;
        else if (v == "eps") sweep = SweepAxis::Eps;
        else if (v == "n") sweep = SweepAxis::Blocklength;
        else if (v == "sigma_e2") sweep = SweepAxis::SigmaE2;
        else if (v == "none") sweep = SweepAxis::None;
        else throw snc::config_error(where + ": unknown sweep axis `" + v + "`");
    } else if (key == "range") range = v;
    else if (key == "M_list") {
        antenna_list.clear();
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            antenna_list.push_back(static_cast<int>(to_long(trim(item), key)));
        }
    } else if (key == "format") format = v;
    else if (key == "output") output = v;
    else if (key == "seed") seed = static_cast<std::uint64_t>(to_long(v, key));
    else if (key == "horizon") horizon = to_long(v, key);
    else if (key == "warmup") warmup = to_long(v, key);
    else if (key == "threads") threads = static_cast<int>(to_long(v, key));
    else throw snc::config_error(where + ": unknown key `" + key + "`");
}

void Scenario::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw snc::config_error("cannot open scenario file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw snc::config_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        apply_key(trim(t.substr(0, eq)), trim(t.substr(eq + 1)),
                  path + ":" + std::to_string(lineno));
    }
}

double Scenario::snr_linear() const { return std::pow(10.0, snr_db / 10.0); }

snc::SchemeSpec Scenario::scheme_spec() const {
    snc::SchemeSpec spec;
    if (scheme == "mrt") spec.kind = snc::SchemeKind::MrtExact;
    else if (scheme == "mrt-sum") spec.kind = snc::SchemeKind::MrtSumForm;
    else if (scheme == "ostbc") spec.kind = snc::SchemeKind::Ostbc;
    else if (scheme == "tas") spec.kind = snc::SchemeKind::Tas;
    else if (scheme == "nakagami") spec.kind = snc::SchemeKind::Nakagami;
    else if (scheme == "gauss") spec.kind = snc::SchemeKind::GaussianApprox;
    else if (scheme == "lowsnr") spec.kind = snc::SchemeKind::LowSnrApprox;
    else if (scheme == "highsnr") spec.kind = snc::SchemeKind::HighSnrApprox;
    else if (scheme == "mimo") spec.kind = snc::SchemeKind::MimoEigen;
    else if (scheme == "hardening") spec.kind = snc::SchemeKind::HardeningLimit;
    else throw snc::config_error("unknown scheme: " + scheme);

    spec.params = snc::ChannelParams::with_csi_error(antennas, snr_linear(), sigma_e2,
                                                     rx_antennas);
    spec.nakagami_m = nakagami_m;
    spec.gauss_mu = gauss_mu;
    spec.gauss_sigma2 = gauss_sigma2;
    if (spec.kind == snc::SchemeKind::MimoEigen) {
        if (table_path.empty())
            throw snc::config_error("mimo scheme needs a coefficient table (table = path)");
        spec.table = snc::load_coefficient_table(table_path);
    }
    spec.validate();
    return spec;
}

snc::SlotSpec Scenario::slot_spec() const { return snc::SlotSpec::make(n, T_ms * 1e-3, n_m); }

double Scenario::rho_nats(const snc::SlotSpec& slot) const {
    return rho_kbps * 1000.0 * slot.slot_seconds() * kLn2;
}

long Scenario::w_slots(const snc::SlotSpec& slot, double w_ms_target) const {
    const long w = static_cast<long>(std::ceil(w_ms_target * 1e-3 / slot.slot_seconds() - 1e-9));
    return std::max<long>(w, 1);
}

std::optional<snc::FiniteBlocklengthSpec> Scenario::fb_spec() const {
    if (!use_fb) return std::nullopt;
    return snc::FiniteBlocklengthSpec::make(n, eps, half_log);
}

void Scenario::finalize() const {
    if (antennas < 1 || rx_antennas < 1) throw snc::config_error("antenna counts must be >= 1");
    if (n < 1) throw snc::config_error("n must be >= 1");
    if (n_m < 0) throw snc::config_error("n_m must be >= 0");
    if (!(T_ms > 0.0)) throw snc::config_error("T_ms must be > 0");
    if (!(rho_kbps >= 0.0)) throw snc::config_error("rho_kbps must be >= 0");
    if (use_fb && !(eps > 0.0 && eps < 1.0)) throw snc::config_error("eps must be in (0,1)");
    if (format != "csv" && format != "jsonl")
        throw snc::config_error("format must be csv or jsonl");
    if (horizon < 10) throw snc::config_error("horizon too small");
    if (warmup >= horizon) throw snc::config_error("warmup must be < horizon");
}

std::vector<std::pair<std::string, std::string>> Scenario::metadata() const {
    const auto slot = slot_spec();
    std::vector<std::pair<std::string, std::string>> meta;
    meta.emplace_back("version", snc::kVersion);
    meta.emplace_back("scheme", scheme);
    meta.emplace_back("M", std::to_string(antennas));
    meta.emplace_back("N", std::to_string(rx_antennas));
    meta.emplace_back("snr_db", fmt(snr_db));
    meta.emplace_back("snr_linear", fmt(snr_linear()));
    meta.emplace_back("sigma_e2", fmt(sigma_e2));
    if (scheme == "nakagami") meta.emplace_back("nakagami_m", fmt(nakagami_m));
    if (scheme == "gauss") {
        meta.emplace_back("gauss_mu", fmt(gauss_mu));
        meta.emplace_back("gauss_sigma2", fmt(gauss_sigma2));
    }
    if (!table_path.empty()) meta.emplace_back("table", table_path);
    meta.emplace_back("rho_kbps", fmt(rho_kbps));
    meta.emplace_back("T_ms", fmt(T_ms));
    meta.emplace_back("n", std::to_string(n));
    meta.emplace_back("n_m", std::to_string(n_m));
    meta.emplace_back("slot_ms", fmt(slot.slot_seconds() * 1e3));
    meta.emplace_back("B", fmt(slot.B));
    meta.emplace_back("rho_nats_per_slot", fmt(rho_nats(slot)));
    meta.emplace_back("rho_conversion", "rho_kbps * 1000 * slot_seconds * ln2");
    if (use_fb) {
        meta.emplace_back("fb", "1");
        meta.emplace_back("eps", fmt(eps));
        meta.emplace_back("half_log", half_log ? "1" : "0");
        meta.emplace_back("F", fmt(fb_spec()->effective_F()));
    }
    meta.emplace_back("sweep", sweep_axis_name(sweep));
    if (!range.empty()) meta.emplace_back("range", range);
    meta.emplace_back("seed", std::to_string(seed));
    return meta;
}

}  // namespace cli
