#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "snc/bound.hpp"
#include "snc/channel.hpp"
#include "snc/rng.hpp"

namespace snc::sim {

struct SimConfig {
    SchemeSpec scheme;
    ArrivalSpec arrival;
    SlotSpec slot;
    std::optional<FiniteBlocklengthSpec> fb;
    long horizon_slots = 1'000'000;
    long warmup_slots = 100'000;    // default: 10% of horizon
    std::uint64_t seed = 1;
    std::vector<long> w_grid;       // delay targets, slots, sorted ascending
    bool allow_unstable = false;

    void validate() const;
};

struct WStat {
    long w_slots = 0;
    double violation_probability = 0.0;
    double ci_low = 0.0;   // Wilson 95%
    double ci_high = 0.0;
    long violations = 0;
};

struct SimResult {
    std::vector<WStat> per_w;
    long measured_slots = 0;
    long unresolved = 0;             // delays beyond the resolution margin
    double mean_service_nats = 0.0;  // per slot
    double utilization = 0.0;        // rho / mean service
    double mean_delay_slots = 0.0;   // over resolved measured slots
    double mean_backlog_nats = 0.0;  // time average past warmup
};

/// One i.i.d. SNR draw for a simulatable scheme (MRT / OSTBC / TAS /
/// Nakagami). GaussianApprox draws the rate directly inside run().
double draw_snr(const SchemeSpec& scheme, SplitMix64& rng);

/// Discrete-time FIFO queue with constant arrivals and the scheme's
/// per-slot service; reports the empirical delay-violation probability at
/// each target. Rejects configurations whose mean service is below the
/// arrival rate unless allow_unstable is set.
SimResult run(const SimConfig& config);

/// Sample mean and variance of ln(1 + gamma) (nats), for the Gaussian
/// service approximation.
struct RateMoments {
    double mu = 0.0;
    double sigma2 = 0.0;
};
RateMoments estimate_rate_moments(const SchemeSpec& scheme, long samples, std::uint64_t seed);

}  // namespace snc::sim
