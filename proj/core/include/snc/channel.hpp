#pragma once

#include <string>
#include <vector>

namespace snc {

/// Channel parameterization shared by every diversity scheme. `zeta` is
/// the gamma scale of the instantaneous SNR; with channel-estimation
/// error sigma_e2 it shrinks below the nominal average SNR.
struct ChannelParams {
    int tx_antennas = 1;  // M
    int rx_antennas = 1;  // N
    double snr = 1.0;     // linear average SNR
    double sigma_e2 = 0.0;
    double zeta = 1.0;

    static ChannelParams perfect_csi(int tx, double snr_linear, int rx = 1);
    static ChannelParams with_csi_error(int tx, double snr_linear, double sigma_e2, int rx = 1);
};

enum class SchemeKind {
    MrtExact,       // beamforming, hypergeometric form
    MrtSumForm,     // beamforming, incomplete-gamma sum form
    Ostbc,          // orthogonal space-time block code
    Tas,            // transmit antenna selection
    Nakagami,       // single antenna, Nakagami-m fading
    GaussianApprox, // service rate ~ N(mu, sigma2), nats
    LowSnrApprox,
    HighSnrApprox,
    MimoEigen,      // eigen-beamforming with N receive antennas
    HardeningLimit, // large-antenna limit
};

const char* scheme_kind_name(SchemeKind k);

struct CoefficientEntry {
    int i = 0;
    int m = 0;
    double c = 0.0;
};

/// Largest-eigenvalue density expansion f(x) = R sum c_{i,m} x^m e^{-ix}
/// for MIMO eigen-beamforming. Tables come from external tabulations and
/// are validated on load, never hardcoded.
struct CoefficientTable {
    std::vector<CoefficientEntry> entries;
    std::string source;
};

CoefficientTable load_coefficient_table(const std::string& path);
CoefficientTable parse_coefficient_table(const std::string& text, std::string source);

/// Index-bound and normalization checks for (M, N); throws config_error.
void validate_coefficient_table(const CoefficientTable& table, int tx, int rx);

struct FiniteBlocklengthSpec {
    int n = 168;               // channel uses per codeword
    double eps = 1e-3;         // block error probability
    bool include_half_log_term = false;
    double F = 0.0;            // n^{-1/2} Qinv(eps)

    static FiniteBlocklengthSpec make(int n, double eps, bool include_half_log_term = false);
    /// F with the optional half-log rate credit folded in.
    double effective_F() const;
    void validate() const;
};

struct SchemeSpec {
    SchemeKind kind = SchemeKind::MrtExact;
    ChannelParams params;
    double nakagami_m = 1.0;     // Nakagami only
    double gauss_mu = 0.0;       // GaussianApprox only, nats
    double gauss_sigma2 = 0.0;   // GaussianApprox only, nats^2
    CoefficientTable table;      // MimoEigen only

    void validate() const;
};

}  // namespace snc
