#include "snc/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "snc/errors.hpp"
#include "snc/specfun.hpp"

namespace snc {

ChannelParams ChannelParams::perfect_csi(int tx, double snr_linear, int rx) {
    if (tx < 1 || rx < 1) throw domain_error("ChannelParams: antenna counts must be >= 1");
    if (!(snr_linear > 0.0)) throw domain_error("ChannelParams: snr must be > 0");
    ChannelParams p;
    p.tx_antennas = tx;
    p.rx_antennas = rx;
    p.snr = snr_linear;
    p.sigma_e2 = 0.0;
    p.zeta = snr_linear;
    return p;
}

ChannelParams ChannelParams::with_csi_error(int tx, double snr_linear, double sigma_e2, int rx) {
    if (sigma_e2 < 0.0) throw domain_error("ChannelParams: sigma_e2 must be >= 0");
    if (sigma_e2 == 0.0) return perfect_csi(tx, snr_linear, rx);
    ChannelParams p = perfect_csi(tx, snr_linear, rx);
    p.sigma_e2 = sigma_e2;
    p.zeta = 1.0 / (sigma_e2 + (1.0 + sigma_e2) / snr_linear);
    return p;
}

const char* scheme_kind_name(SchemeKind k) {
    switch (k) {
        case SchemeKind::MrtExact: return "mrt";
        case SchemeKind::MrtSumForm: return "mrt-sum";
        case SchemeKind::Ostbc: return "ostbc";
        case SchemeKind::Tas: return "tas";
        case SchemeKind::Nakagami: return "nakagami";
        case SchemeKind::GaussianApprox: return "gauss";
        case SchemeKind::LowSnrApprox: return "lowsnr";
        case SchemeKind::HighSnrApprox: return "highsnr";
        case SchemeKind::MimoEigen: return "mimo";
        case SchemeKind::HardeningLimit: return "hardening";
    }
    return "?";
}

CoefficientTable parse_coefficient_table(const std::string& text, std::string source) {
    CoefficientTable table;
    table.source = std::move(source);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        CoefficientEntry e;
        if (!(fields >> e.i)) continue;  // blank / comment-only line
        if (!(fields >> e.m >> e.c)) {
            throw config_error("coefficient table " + table.source + " line " +
                               std::to_string(lineno) + ": expected `i m c`");
        }
        std::string extra;
        if (fields >> extra) {
            throw config_error("coefficient table " + table.source + " line " +
                               std::to_string(lineno) + ": trailing content `" + extra + "`");
        }
        table.entries.push_back(e);
    }
    if (table.entries.empty())
        throw config_error("coefficient table " + table.source + ": no entries");
    return table;
}

CoefficientTable load_coefficient_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open coefficient table: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_coefficient_table(buf.str(), path);
}

void validate_coefficient_table(const CoefficientTable& table, int tx, int rx) {
    if (table.entries.empty()) throw config_error("coefficient table is empty");
    double norm = 0.0;
    for (const auto& e : table.entries) {
        if (e.i < 1 || e.i > rx)
            throw config_error("coefficient table " + table.source + ": index i=" +
                               std::to_string(e.i) + " outside [1, " + std::to_string(rx) + "]");
        const int m_lo = tx - rx;
        const int m_hi = (tx + rx) * e.i - 2 * e.i * e.i;
        if (e.m < m_lo || e.m > m_hi)
            throw config_error("coefficient table " + table.source + ": index m=" +
                               std::to_string(e.m) + " outside [" + std::to_string(m_lo) + ", " +
                               std::to_string(m_hi) + "] for i=" + std::to_string(e.i));
        if (!std::isfinite(e.c))
            throw config_error("coefficient table " + table.source + ": non-finite coefficient");
        norm += e.c * std::exp(std::lgamma(e.m + 1.0) - (e.m + 1.0) * std::log(double(e.i)));
    }
    double log_r = 0.0;
    for (int k = 1; k <= rx; ++k)
        log_r -= std::lgamma(double(rx - k + 1)) + std::lgamma(double(tx - k + 1));
    const double total = std::exp(log_r) * norm;
    // The expansion must integrate to one: sum R c m! / i^{m+1} = 1. This
    // doubles as the convention check that m! is not folded into c.
    if (std::fabs(total - 1.0) > 1e-6)
        throw config_error("coefficient table " + table.source +
                           ": density normalizes to " + std::to_string(total) +
                           ", expected 1 (wrong convention or wrong (M, N)?)");
}

FiniteBlocklengthSpec FiniteBlocklengthSpec::make(int n, double eps, bool include_half_log_term) {
    if (n < 1) throw domain_error("FiniteBlocklengthSpec: n must be >= 1");
    if (!(eps > 0.0) || !(eps < 1.0))
        throw domain_error("FiniteBlocklengthSpec: eps must be in (0,1)");
    FiniteBlocklengthSpec fb;
    fb.n = n;
    fb.eps = eps;
    fb.include_half_log_term = include_half_log_term;
    fb.F = specfun::gaussian_q_inv(eps) / std::sqrt(static_cast<double>(n));
    return fb;
}

double FiniteBlocklengthSpec::effective_F() const {
    if (!include_half_log_term) return F;
    return F - std::log(static_cast<double>(n)) / (2.0 * n);
}

void FiniteBlocklengthSpec::validate() const {
    if (n < 1) throw domain_error("FiniteBlocklengthSpec: n must be >= 1");
    if (!(eps > 0.0) || !(eps < 1.0))
        throw domain_error("FiniteBlocklengthSpec: eps must be in (0,1)");
    const double expected = specfun::gaussian_q_inv(eps) / std::sqrt(static_cast<double>(n));
    if (std::fabs(F - expected) > 1e-10 * (1.0 + std::fabs(expected)))
        throw domain_error("FiniteBlocklengthSpec: F inconsistent with (n, eps)");
}

void SchemeSpec::validate() const {
    if (params.tx_antennas < 1 || params.rx_antennas < 1)
        throw domain_error("SchemeSpec: antenna counts must be >= 1");
    if (!(params.zeta > 0.0)) throw domain_error("SchemeSpec: zeta must be > 0");
    switch (kind) {
        case SchemeKind::Nakagami:
            if (!(nakagami_m > 0.0)) throw domain_error("SchemeSpec: Nakagami m must be > 0");
            if (params.tx_antennas != 1 || params.rx_antennas != 1)
                throw domain_error("SchemeSpec: Nakagami requires M = N = 1");
            break;
        case SchemeKind::GaussianApprox:
            if (gauss_sigma2 < 0.0) throw domain_error("SchemeSpec: sigma2 must be >= 0");
            break;
        case SchemeKind::MimoEigen:
            validate_coefficient_table(table, params.tx_antennas, params.rx_antennas);
            break;
        default:
            break;
    }
}

}  // namespace snc
