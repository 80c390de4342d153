#pragma once

#include <optional>

#include "snc/mellin.hpp"

namespace snc {

/// Constant-rate arrivals, (rho, 0)-bounded, in nats per slot.
struct ArrivalSpec {
    double rho_nats = 0.0;
};

/// Slot geometry. B = n / ln 2 is the exponent the per-slot service
/// contributes in the SNR domain; n_m counts metadata symbols that extend
/// the slot airtime without carrying service.
struct SlotSpec {
    int n = 168;
    int n_m = 0;
    double T_seconds = 1e-3;
    double B = 0.0;

    static SlotSpec make(int n, double T_seconds, int n_m = 0);
    /// Airtime of one slot including metadata symbols.
    double slot_seconds() const;
};

enum class BoundStatus { Ok, Unstable, ClampedToOne };

const char* bound_status_name(BoundStatus s);

struct DelayBoundResult {
    long w_slots = 0;
    double p_v = 1.0;           // clamped to [0, 1]
    double p_v_raw = 1.0;       // unclamped infimum (may exceed 1)
    double s_star = 0.0;
    double stability_margin = 0.0;  // 1 - M_alpha(1+s*) M_g(1-B s*)
    BoundStatus status = BoundStatus::Unstable;
};

struct StabilityRegion {
    double s_max = 0.0;
    bool capped = false;              // scan cap hit while still stable
    bool multiple_intervals = false;  // a second stable interval was seen
};

/// Steady-state kernel K(s, -w) = M_g(1-Bs)^w / (1 - e^{rho s} M_g(1-Bs)).
/// Returns +inf when the geometric sum diverges (denominator <= 0).
double kernel(const MellinFn& service, const ArrivalSpec& arrival, const SlotSpec& slot, double s,
              long w_slots);

/// Upper end of the first contiguous stable s-interval, by log-grid scan
/// plus bisection (|s| tolerance 1e-10). nullopt when no s > 0 is stable.
/// The scan cap is 1e6 / B; hitting it sets `capped`.
std::optional<StabilityRegion> stability_root(const MellinFn& service, const ArrivalSpec& arrival,
                                              const SlotSpec& slot);

/// inf_s K(s, -w) over the stable region: 64-point log grid then
/// golden-section refinement to 1e-8 relative in the kernel value.
DelayBoundResult delay_bound(const MellinFn& service, const ArrivalSpec& arrival,
                             const SlotSpec& slot, long w_slots);

/// Effective capacity -(1/theta) log M_g(1-theta), nats per slot of the
/// transform's own time unit. Throws domain_error when the transform is
/// infinite at 1-theta.
double effective_capacity(const MellinFn& service, double theta);

}  // namespace snc
