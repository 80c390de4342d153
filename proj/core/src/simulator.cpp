#include "snc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snc/errors.hpp"
#include "snc/service_models.hpp"

namespace snc::sim {

namespace {

bool simulatable_snr(SchemeKind k) {
    return k == SchemeKind::MrtExact || k == SchemeKind::MrtSumForm || k == SchemeKind::Ostbc ||
           k == SchemeKind::Tas || k == SchemeKind::Nakagami;
}

}  // namespace

void SimConfig::validate() const {
    scheme.validate();
    if (horizon_slots < 1) throw domain_error("SimConfig: horizon must be >= 1");
    if (warmup_slots < 0 || warmup_slots >= horizon_slots)
        throw domain_error("SimConfig: warmup must be in [0, horizon)");
    if (w_grid.empty()) throw domain_error("SimConfig: w_grid must be nonempty");
    if (!std::is_sorted(w_grid.begin(), w_grid.end()))
        throw domain_error("SimConfig: w_grid must be sorted ascending");
    if (w_grid.front() < 1) throw domain_error("SimConfig: delay targets must be >= 1 slot");
    if (arrival.rho_nats < 0.0) throw domain_error("SimConfig: arrival rate must be >= 0");
    if (fb) {
        fb->validate();
        if (!simulatable_snr(scheme.kind))
            throw domain_error("SimConfig: finite blocklength needs an SNR-drawing scheme");
    }
}

double draw_snr(const SchemeSpec& scheme, SplitMix64& rng) {
    const ChannelParams& p = scheme.params;
    switch (scheme.kind) {
        case SchemeKind::MrtExact:
        case SchemeKind::MrtSumForm:
            return p.zeta * rng.gamma(static_cast<double>(p.tx_antennas));
        case SchemeKind::Ostbc:
            return (p.snr / p.tx_antennas) * rng.gamma(static_cast<double>(p.tx_antennas));
        case SchemeKind::Tas: {
            double best = 0.0;
            for (int i = 0; i < p.tx_antennas; ++i) best = std::max(best, rng.exponential());
            return p.zeta * best;
        }
        case SchemeKind::Nakagami:
            return p.snr * rng.gamma(scheme.nakagami_m);
        default:
            throw domain_error("draw_snr: scheme has no SNR distribution to sample");
    }
}

namespace {

struct ServiceSampler {
    const SimConfig& cfg;
    SplitMix64 rng;
    double F;  // finite blocklength penalty exponent; 0 disables

    explicit ServiceSampler(const SimConfig& config)
        : cfg(config), rng(SplitMix64::stream(config.seed, 0)), F(0.0) {
        if (cfg.fb) F = cfg.fb->effective_F();
    }

    // Per-slot service in nats: B ln(1+gamma), or B ln q(gamma) * Z with
    // q clamped at 1 and Z the block-success indicator.
    double operator()() {
        if (cfg.scheme.kind == SchemeKind::GaussianApprox) {
            const double rate = cfg.scheme.gauss_mu +
                                std::sqrt(cfg.scheme.gauss_sigma2) * rng.normal();
            return cfg.slot.B * std::max(rate, 0.0);
        }
        const double gamma = draw_snr(cfg.scheme, rng);
        if (!cfg.fb) return cfg.slot.B * std::log1p(gamma);
        const double log_q =
            std::max(std::log1p(gamma) - F * std::sqrt(channel_dispersion(gamma)), 0.0);
        const bool success = rng.u01() <= 1.0 - cfg.fb->eps;
        return success ? cfg.slot.B * log_q : 0.0;
    }
};

}  // namespace

SimResult run(const SimConfig& config) {
    config.validate();
    const double rho = config.arrival.rho_nats;

    // Pre-pass: mean service estimate for the stability refusal.
    double mean_service = 0.0;
    {
        ServiceSampler probe(config);
        const long probe_n = 100000;
        for (long i = 0; i < probe_n; ++i) mean_service += probe();
        mean_service /= static_cast<double>(probe_n);
    }
    if (mean_service <= rho && !config.allow_unstable)
        throw unstable_error("simulator: configuration is unstable (mean service " +
                             std::to_string(mean_service) + " nats/slot <= arrival " +
                             std::to_string(rho) + "); pass allow_unstable to force");

    const long w_max = config.w_grid.back();
    const long resolve_margin = std::max<long>(1000, 8 * w_max);
    const long window_end = std::max(config.warmup_slots + 1, config.horizon_slots - resolve_margin);

    ServiceSampler service(config);
    std::vector<long> exceed_counts(config.w_grid.size() + 1, 0);
    long measured = 0;
    long unresolved = 0;
    double service_sum = 0.0;
    double delay_sum = 0.0;
    double backlog_sum = 0.0;
    long backlog_samples = 0;

    // FIFO fluid queue: the work arriving in slot t is cleared once
    // cumulative departures reach A(0, t+1); W(t) = that slot - t.
    // Departures are Kahan-compensated: after 1e7 slots plain summation
    // drifts by the size of a whole slot's arrivals.
    double cum_departures = 0.0;  // D(0, k+1) at slot k
    double dep_comp = 0.0;
    double backlog = 0.0;
    long front = 0;  // earliest slot index whose delay is not yet resolved

    for (long k = 0; k < config.horizon_slots; ++k) {
        const double s_k = service();
        service_sum += s_k;
        const double dep = std::min(backlog + rho, s_k);
        backlog += rho - dep;
        const double y = dep - dep_comp;
        const double t_sum = cum_departures + y;
        dep_comp = (t_sum - cum_departures) - y;
        cum_departures = t_sum;

        while (front <= k &&
               static_cast<double>(front + 1) * rho <= cum_departures * (1.0 + 1e-12) + 1e-12) {
            // A(0,t) <= D(0,t+u) with t = front+1, t+u = k+1: u = k - front,
            // floored at one slot (u ranges over positive integers).
            const long w = std::max(k - front, 1L);
            if (front >= config.warmup_slots && front < window_end) {
                ++measured;
                delay_sum += static_cast<double>(w);
                // count into the first grid slot whose w >= W, suffix-summed below
                const auto it =
                    std::lower_bound(config.w_grid.begin(), config.w_grid.end(), w);
                ++exceed_counts[it - config.w_grid.begin()];
            }
            ++front;
        }
        if (k >= config.warmup_slots) {
            backlog_sum += backlog;
            ++backlog_samples;
        }
    }
    // Slots never resolved within the horizon: delay exceeds the margin,
    // hence every target in the grid.
    for (long t = front; t < window_end; ++t) {
        if (t >= config.warmup_slots) {
            ++measured;
            ++unresolved;
        }
    }

    SimResult result;
    result.measured_slots = measured;
    result.unresolved = unresolved;
    result.mean_service_nats = service_sum / static_cast<double>(config.horizon_slots);
    result.utilization = rho / std::max(result.mean_service_nats, 1e-300);
    result.mean_delay_slots =
        measured > unresolved ? delay_sum / static_cast<double>(measured - unresolved) : 0.0;
    result.mean_backlog_nats =
        backlog_samples > 0 ? backlog_sum / static_cast<double>(backlog_samples) : 0.0;

    // violations of target w = #resolved with W > w (+ unresolved)
    const double z = 1.959963984540054;  // Wilson 95%
    for (std::size_t i = 0; i < config.w_grid.size(); ++i) {
        long beyond = unresolved;
        for (std::size_t j = i + 1; j < exceed_counts.size(); ++j) beyond += exceed_counts[j];
        // exceed_counts[j] holds delays W with w_{j-1} < W <= w_j; W > w_i
        // means buckets j >= i+1.
        WStat stat;
        stat.w_slots = config.w_grid[i];
        stat.violations = beyond;
        const double n = static_cast<double>(std::max<long>(measured, 1));
        const double phat = static_cast<double>(beyond) / n;
        stat.violation_probability = phat;
        const double denom = 1.0 + z * z / n;
        const double center = (phat + z * z / (2.0 * n)) / denom;
        const double half =
            z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
        stat.ci_low = std::max(0.0, center - half);
        stat.ci_high = std::min(1.0, center + half);
        result.per_w.push_back(stat);
    }
    return result;
}

RateMoments estimate_rate_moments(const SchemeSpec& scheme, long samples, std::uint64_t seed) {
    scheme.validate();
    if (!simulatable_snr(scheme.kind))
        throw domain_error("estimate_rate_moments: scheme has no SNR distribution to sample");
    if (samples < 2) throw domain_error("estimate_rate_moments: need at least 2 samples");
    SplitMix64 rng = SplitMix64::stream(seed, 1);
    double mean = 0.0, m2 = 0.0;
    for (long i = 1; i <= samples; ++i) {
        const double x = std::log1p(draw_snr(scheme, rng));
        const double d = x - mean;
        mean += d / static_cast<double>(i);
        m2 += d * (x - mean);
    }
    RateMoments out;
    out.mu = mean;
    out.sigma2 = m2 / static_cast<double>(samples - 1);
    return out;
}

}  // namespace snc::sim
