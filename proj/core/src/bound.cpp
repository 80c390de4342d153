#include "snc/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "snc/errors.hpp"

namespace snc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;

// log(e^{rho s} M_g(1 - B s)); stability holds while this is negative.
double log_drift(const MellinFn& service, const ArrivalSpec& arrival, const SlotSpec& slot,
                 double s) {
    return arrival.rho_nats * s + service.log_eval(1.0 - slot.B * s);
}

}  // namespace

SlotSpec SlotSpec::make(int n, double T_seconds, int n_m) {
    if (n < 1) throw domain_error("SlotSpec: n must be >= 1");
    if (n_m < 0) throw domain_error("SlotSpec: n_m must be >= 0");
    if (!(T_seconds > 0.0)) throw domain_error("SlotSpec: T must be > 0");
    SlotSpec s;
    s.n = n;
    s.n_m = n_m;
    s.T_seconds = T_seconds;
    s.B = static_cast<double>(n) / kLn2;
    return s;
}

double SlotSpec::slot_seconds() const {
    if (n_m == 0) return T_seconds;
    return T_seconds * static_cast<double>(n + n_m) / static_cast<double>(n);
}

const char* bound_status_name(BoundStatus s) {
    switch (s) {
        case BoundStatus::Ok: return "ok";
        case BoundStatus::Unstable: return "unstable";
        case BoundStatus::ClampedToOne: return "clamped";
    }
    return "?";
}

double kernel(const MellinFn& service, const ArrivalSpec& arrival, const SlotSpec& slot, double s,
              long w_slots) {
    if (!(s > 0.0)) throw domain_error("kernel: requires s > 0");
    if (w_slots < 0) throw domain_error("kernel: requires w >= 0");
    const double log_m = service.log_eval(1.0 - slot.B * s);
    const double drift = arrival.rho_nats * s + log_m;
    if (!(drift < 0.0)) return kInf;
    const double denom = -std::expm1(drift);  // 1 - e^{drift}, no cancellation
    return std::exp(static_cast<double>(w_slots) * log_m) / denom;
}

std::optional<StabilityRegion> stability_root(const MellinFn& service, const ArrivalSpec& arrival,
                                              const SlotSpec& slot) {
    const double s_cap = 1e6 / slot.B;
    const int grid_points = 512;
    const double s_lo = s_cap * 1e-12;       // log grid start
    const double ratio = std::pow(s_cap / s_lo, 1.0 / (grid_points - 1));

    double prev_s = 0.0;
    bool prev_stable = true;  // drift -> 0 as s -> 0+
    double first_root_lo = -1.0, first_root_hi = -1.0;
    bool seen_unstable = false;
    bool second_interval = false;

    double s = s_lo;
    for (int k = 0; k < grid_points; ++k) {
        const bool stable = log_drift(service, arrival, slot, s) < 0.0;
        if (k == 0 && !stable) {
            // unstable immediately above 0: no stable region
            return std::nullopt;
        }
        if (!stable && prev_stable && !seen_unstable) {
            first_root_lo = prev_s > 0.0 ? prev_s : s_lo * 0.5;
            first_root_hi = s;
            seen_unstable = true;
        }
        if (stable && seen_unstable) second_interval = true;
        prev_stable = stable;
        prev_s = s;
        s *= ratio;
    }

    StabilityRegion region;
    region.multiple_intervals = second_interval;
    if (!seen_unstable) {
        region.s_max = s_cap;
        region.capped = true;
        return region;
    }
    double lo = first_root_lo, hi = first_root_hi;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (log_drift(service, arrival, slot, mid) < 0.0 ? lo : hi) = mid;
    }
    region.s_max = lo;
    region.capped = false;
    return region;
}

namespace {

double golden_refine(const std::function<double(double)>& f, double a, double b, double fa_mid,
                     int max_iter) {
    // golden-section on [a, b]; returns the minimizing abscissa
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    double best = std::min({fa_mid, f1, f2});
    for (int it = 0; it < max_iter; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        const double cur = std::min(f1, f2);
        if (best - cur <= 1e-8 * std::fabs(best) && it >= 8) break;
        best = std::min(best, cur);
    }
    return f1 < f2 ? x1 : x2;
}

}  // namespace

DelayBoundResult delay_bound(const MellinFn& service, const ArrivalSpec& arrival,
                             const SlotSpec& slot, long w_slots) {
    if (w_slots < 0) throw domain_error("delay_bound: requires w >= 0");
    DelayBoundResult res;
    res.w_slots = w_slots;

    const auto region = stability_root(service, arrival, slot);
    if (!region) {
        res.status = BoundStatus::Unstable;
        res.p_v = 1.0;
        res.p_v_raw = kInf;
        res.s_star = 0.0;
        res.stability_margin = std::numeric_limits<double>::quiet_NaN();
        return res;
    }

    const double s_max = region->s_max;
    const auto k = [&](double s) { return kernel(service, arrival, slot, s, w_slots); };

    const int grid_points = 64;
    const double lo = s_max * 1e-6;
    const double hi = s_max * (1.0 - 1e-9);
    const double ratio = std::pow(hi / lo, 1.0 / (grid_points - 1));
    double best_s = lo;
    double best_k = kInf;
    double s = lo;
    std::vector<double> grid(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        grid[i] = s;
        const double v = k(s);
        if (v < best_k) {
            best_k = v;
            best_s = s;
        }
        s *= ratio;
    }
    int best_idx = 0;
    for (int i = 0; i < grid_points; ++i)
        if (grid[i] == best_s) best_idx = i;
    const double bracket_lo = best_idx > 0 ? grid[best_idx - 1] : lo / 2.0;
    const double bracket_hi = best_idx + 1 < grid_points ? grid[best_idx + 1] : s_max;
    const double s_star = golden_refine(k, bracket_lo, bracket_hi, best_k, 200);
    const double k_star = std::min(best_k, k(s_star));
    res.s_star = k(s_star) <= best_k ? s_star : best_s;
    res.p_v_raw = k_star;
    res.stability_margin =
        -std::expm1(log_drift(service, arrival, slot, res.s_star));  // 1 - M_a M_g
    if (k_star > 1.0) {
        res.p_v = 1.0;
        res.status = BoundStatus::ClampedToOne;
    } else {
        res.p_v = k_star;
        res.status = BoundStatus::Ok;
    }
    return res;
}

double effective_capacity(const MellinFn& service, double theta) {
    if (!(theta > 0.0)) throw domain_error("effective_capacity: requires theta > 0");
    const double log_m = service.log_eval(1.0 - theta);
    if (!std::isfinite(log_m))
        throw domain_error("effective_capacity: Mellin transform infinite at 1 - theta");
    return -log_m / theta;
}

}  // namespace snc
