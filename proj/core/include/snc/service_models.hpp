#pragma once

#include "snc/channel.hpp"
#include "snc/mellin.hpp"

namespace snc {

// Per-slot service Mellin transforms M_{g(gamma)}(s) for the scheme
// catalogue. All transforms satisfy eval(1) = 1 and are finite for every
// real s unless the note says otherwise.

/// Beamforming (gamma-distributed SNR, shape M, scale zeta),
/// hypergeometric form.
MellinFn mellin_mrt_tricomi(const ChannelParams& p);

/// Same transform through the alternating incomplete-gamma sum. The plain
/// MellinFn evaluates the sum unconditionally; use mellin_mrt_sum_eval for
/// the cancellation diagnostic.
MellinFn mellin_mrt_sum(const ChannelParams& p);
SumEval mellin_mrt_sum_eval(const ChannelParams& p, double s);

/// Orthogonal space-time block coding: Gamma(M, snr/M) SNR.
MellinFn mellin_ostbc(const ChannelParams& p);

/// Transmit antenna selection: SNR = zeta * max of M unit exponentials.
MellinFn mellin_tas(const ChannelParams& p);
SumEval mellin_tas_eval(const ChannelParams& p, double s);

/// Single-antenna Nakagami-m fading: Gamma(m, snr) SNR. Non-integer m
/// takes the quadrature path (the sum form needs an integer shape).
MellinFn mellin_nakagami(double m, double snr);

/// MIMO eigen-beamforming from a largest-eigenvalue coefficient table.
MellinFn mellin_mimo_eigen(const ChannelParams& p, const CoefficientTable& table);

/// High-SNR limit; three branches joined at s = 1 - M.
MellinFn mellin_high_snr(const ChannelParams& p);

/// Low-SNR limit (gamma MGF); finite only for s < 1 + 1/zeta.
MellinFn mellin_low_snr(const ChannelParams& p);

/// Gaussian service rate (nats): exp((s-1) mu + (s-1)^2 sigma2 / 2).
MellinFn mellin_gaussian(double mu, double sigma2);

/// Channel-hardening limit: (1 + zeta M)^{s-1}.
MellinFn mellin_hardening(const ChannelParams& p);

/// Finite-blocklength service: (1-eps) E[q(gamma)^{s-1}] + eps with
/// q(gamma) = max((1+gamma) e^{-F sqrt(V(gamma))}, 1). F = 0 short-circuits
/// to the exact infinite-blocklength transform.
MellinFn mellin_fb(const ChannelParams& p, const FiniteBlocklengthSpec& fb);

/// Finite-blocklength high-SNR closed form (dispersion V ~ 1).
MellinFn mellin_fb_high_snr(const ChannelParams& p, const FiniteBlocklengthSpec& fb);

/// Channel dispersion V(x) = x(x+2)/(1+x)^2, nats^2 convention.
double channel_dispersion(double x);

/// Rate-ratio threshold: unique positive root of ln(1+x) = F sqrt(V(x)),
/// the point where the finite-blocklength rate crosses zero gain.
/// Returns 0 for F <= 0.
double fb_phi_threshold(double F);

/// E[g(gamma)^{s-1}] by adaptive quadrature over the scheme's SNR density
/// (or defining expectation for the asymptotic models). Verification path
/// and cancellation fallback; rel tol ~1e-11.
double mellin_quadrature_oracle(const SchemeSpec& scheme, double s);

/// Scheme dispatcher used by the engine/CLI. For the sum form, falls back
/// to the hypergeometric route whenever the cancellation warning fires.
MellinFn build_mellin(const SchemeSpec& scheme);
MellinFn build_mellin_fb(const SchemeSpec& scheme, const FiniteBlocklengthSpec& fb);

}  // namespace snc
