#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "snc/bound.hpp"
#include "snc/errors.hpp"
#include "snc/service_models.hpp"
#include "snc/simulator.hpp"

using namespace snc;

namespace {
constexpr double kLn2 = 0.6931471805599453;

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

ArrivalSpec kbps_arrival(double kbps, const SlotSpec& slot) {
    return ArrivalSpec{kbps * 1000.0 * slot.slot_seconds() * kLn2};
}
}  // namespace

TEST_CASE("slot spec") {
    const auto slot = SlotSpec::make(168, 1e-3);
    CHECK(slot.B == 168.0 / kLn2);  // exact derivation, machine precision
    CHECK(slot.slot_seconds() == 1e-3);
    // metadata symbols stretch the airtime: (n + n_m)/168 ms convention
    const auto padded = SlotSpec::make(100, 100.0 / 168.0 * 1e-3, 64);
    CHECK(rel_diff(padded.slot_seconds(), 164.0 / 168.0 * 1e-3) < 1e-14);
    CHECK_THROWS_AS(SlotSpec::make(0, 1e-3), domain_error);
    CHECK_THROWS_AS(SlotSpec::make(168, -1.0), domain_error);
    CHECK_THROWS_AS(SlotSpec::make(168, 1e-3, -1), domain_error);
}

TEST_CASE("kernel: closed form for the deterministic server") {
    const auto slot = SlotSpec::make(168, 1e-3);
    // rate mu with B mu = 1 nat/slot, arrival rho = 0.5:
    //   K(s=1, w=2) = e^{-2} / (1 - e^{-1/2})
    const auto service = mellin_gaussian(1.0 / slot.B, 0.0);
    const ArrivalSpec arrival{0.5};
    const double expected = std::exp(-2.0) / (1.0 - std::exp(-0.5));
    CHECK(rel_diff(kernel(service, arrival, slot, 1.0, 2), expected) < 1e-13);

    SUBCASE("w = 0 is the geometric-sum base case, >= 1") {
        const double k0 = kernel(service, arrival, slot, 1.0, 0);
        CHECK(rel_diff(k0, 1.0 / (1.0 - std::exp(-0.5))) < 1e-13);
        CHECK(k0 >= 1.0);
    }
    SUBCASE("unstable s gives the +inf sentinel") {
        // drift positive: rho s + log M >= 0 at rho = 2, B mu = 1, s = 1
        CHECK(std::isinf(kernel(service, ArrivalSpec{2.0}, slot, 1.0, 1)));
    }
    SUBCASE("domain checks") {
        CHECK_THROWS_AS(kernel(service, arrival, slot, 0.0, 1), domain_error);
        CHECK_THROWS_AS(kernel(service, arrival, slot, 1.0, -1), domain_error);
    }
}

TEST_CASE("stability root") {
    const auto slot = SlotSpec::make(168, 1e-3);
    SUBCASE("deterministic server, stable for all s: cap with flag") {
        const auto service = mellin_gaussian(2.0 / slot.B, 0.0);
        const auto region = stability_root(service, ArrivalSpec{1.0}, slot);
        REQUIRE(region.has_value());
        CHECK(region->capped);
        CHECK(region->s_max == doctest::Approx(1e6 / slot.B).epsilon(1e-9));
    }
    SUBCASE("deterministic server, overloaded: no stable s") {
        const auto service = mellin_gaussian(2.0 / slot.B, 0.0);
        CHECK_FALSE(stability_root(service, ArrivalSpec{3.0}, slot).has_value());
    }
    SUBCASE("fading server: root certified by a sign change") {
        const auto p = ChannelParams::perfect_csi(2, std::pow(10.0, 0.5));
        const auto service = mellin_mrt_tricomi(p);
        const auto arrival = kbps_arrival(24.0, slot);
        const auto region = stability_root(service, arrival, slot);
        REQUIRE(region.has_value());
        CHECK_FALSE(region->capped);
        CHECK_FALSE(region->multiple_intervals);
        const auto drift = [&](double s) {
            return arrival.rho_nats * s + service.log_eval(1.0 - slot.B * s);
        };
        CHECK(drift(region->s_max - 1e-6) < 0.0);
        CHECK(drift(region->s_max + 1e-6) > 0.0);
    }
}

TEST_CASE("delay bound: monotonicity and structure") {
    const auto slot = SlotSpec::make(168, 1e-3);
    const auto arrival = kbps_arrival(24.0, slot);
    const auto p = ChannelParams::perfect_csi(2, std::pow(10.0, 0.5));
    const auto service = mellin_mrt_tricomi(p);

    SUBCASE("nonincreasing in w, geometric decay at rate M_g(1 - B s*)") {
        double prev = 2.0;
        const auto first = delay_bound(service, arrival, slot, 1);
        REQUIRE(first.status == BoundStatus::Ok);
        const double rate = service(1.0 - slot.B * first.s_star);
        for (long w = 1; w <= 10; ++w) {
            const auto res = delay_bound(service, arrival, slot, w);
            CHECK(res.p_v < prev);
            prev = res.p_v;
        }
        // p_v(w) ~ C rate^w: check the log-slope matches within 5%
        const auto r4 = delay_bound(service, arrival, slot, 4);
        const auto r8 = delay_bound(service, arrival, slot, 8);
        const double slope = (std::log(r8.p_v) - std::log(r4.p_v)) / 4.0;
        CHECK(std::fabs(slope - std::log(rate)) < 0.05 * std::fabs(std::log(rate)));
    }

    SUBCASE("nonincreasing in M and in snr; nondecreasing in rho") {
        double prev = 2.0;
        for (int m : {1, 2, 3, 4}) {
            const auto res = delay_bound(
                mellin_mrt_tricomi(ChannelParams::perfect_csi(m, 2.0)), arrival, slot, 2);
            CHECK(res.p_v <= prev * (1.0 + 1e-12));
            prev = res.p_v;
        }
        prev = 2.0;
        for (double snr : {0.5, 1.0, 2.0, 4.0}) {
            const auto res = delay_bound(
                mellin_mrt_tricomi(ChannelParams::perfect_csi(2, snr)), arrival, slot, 2);
            CHECK(res.p_v <= prev * (1.0 + 1e-12));
            prev = res.p_v;
        }
        prev = 0.0;
        for (double kbps : {8.0, 16.0, 32.0, 64.0}) {
            const auto res =
                delay_bound(service, kbps_arrival(kbps, slot), slot, 2);
            CHECK(res.p_v >= prev * (1.0 - 1e-12));
            prev = res.p_v;
        }
    }

    SUBCASE("antenna gain at 5 dB: two orders of magnitude per antenna") {
        const auto r1 = delay_bound(
            mellin_mrt_tricomi(ChannelParams::perfect_csi(1, std::pow(10.0, 0.5))), arrival,
            slot, 1);
        const auto r2 = delay_bound(service, arrival, slot, 1);
        CHECK(r1.p_v / r2.p_v >= 100.0);
    }

    SUBCASE("minimized value is a global minimum against random probes") {
        const auto region = stability_root(service, arrival, slot);
        REQUIRE(region.has_value());
        const auto res = delay_bound(service, arrival, slot, 2);
        std::mt19937_64 rng(1234);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 1000; ++i) {
            const double s = region->s_max * std::pow(10.0, -6.0 * u(rng));
            CHECK(res.p_v_raw <= kernel(service, arrival, slot, s, 2) * (1.0 + 1e-7));
        }
    }

    SUBCASE("unstable and clamped statuses") {
        const auto heavy = kbps_arrival(2000.0, slot);  // far beyond capacity
        const auto res = delay_bound(service, heavy, slot, 2);
        CHECK(res.status == BoundStatus::Unstable);
        CHECK(res.p_v == 1.0);

        // stable but vacuous at w = 0: the kernel is >= 1 there
        const auto near = kbps_arrival(120.0, slot);
        const auto clamped = delay_bound(service, near, slot, 0);
        CHECK(clamped.status == BoundStatus::ClampedToOne);
        CHECK(clamped.p_v == 1.0);
        CHECK(clamped.p_v_raw > 1.0);
    }
}

TEST_CASE("effective capacity") {
    SUBCASE("Gaussian service: mu - theta sigma^2 / 2 at machine precision") {
        // the 1 - theta argument rounds before the transform sees it, so
        // the attainable precision is ~ulp(1)/theta
        const auto mel = mellin_gaussian(1.7, 0.3);
        for (double theta : {1e-4, 0.1, 0.5, 1.0, 3.0}) {
            CHECK(rel_diff(effective_capacity(mel, theta), 1.7 - 0.5 * theta * 0.3) < 5e-13);
        }
    }
    SUBCASE("deterministic server: constant in theta") {
        const auto mel = mellin_gaussian(0.9, 0.0);
        for (double theta : {1e-3, 0.3, 2.0}) {
            CHECK(rel_diff(effective_capacity(mel, theta), 0.9) < 1e-13);
        }
    }
    SUBCASE("theta -> 0 recovers the ergodic rate") {
        SchemeSpec spec;
        spec.kind = SchemeKind::MrtExact;
        spec.params = ChannelParams::perfect_csi(2, 3.0);
        const auto mom = sim::estimate_rate_moments(spec, 1'000'000, 5);
        const double r0 = effective_capacity(mellin_mrt_tricomi(spec.params), 1e-4);
        CHECK(rel_diff(r0, mom.mu) < 1e-2);
    }
    SUBCASE("nonincreasing in theta") {
        const auto mel = mellin_mrt_tricomi(ChannelParams::perfect_csi(3, 1.0));
        double prev = 1e300;
        for (double theta = 1e-4; theta <= 1.0; theta *= 1.5) {
            const double r = effective_capacity(mel, theta);
            CHECK(r <= prev + 1e-12);
            prev = r;
        }
    }
    SUBCASE("domain errors") {
        const auto mel = mellin_gaussian(1.0, 0.1);
        CHECK_THROWS_AS(effective_capacity(mel, 0.0), domain_error);
        const MellinFn infinite([](double) { return std::numeric_limits<double>::infinity(); },
                                "always infinite");
        CHECK_THROWS_AS(effective_capacity(infinite, 0.5), domain_error);
    }
}
