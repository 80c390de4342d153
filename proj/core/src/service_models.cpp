#include "snc/service_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "snc/errors.hpp"
#include "snc/quadrature.hpp"
#include "snc/specfun.hpp"

namespace snc {

namespace {

constexpr double kCancellationLimit = 1e6;

struct SignedLogTerm {
    double log_abs;
    double sign;
};

// sum of sign_i * exp(log_i), evaluated relative to the largest magnitude
// so the terms stay finite; reports the cancellation ratio.
SumEval signed_log_sum(const std::vector<SignedLogTerm>& terms) {
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) peak = std::max(peak, t.log_abs);
    double acc = 0.0;
    double acc_abs = 0.0;
    double comp = 0.0;  // Kahan compensation
    for (const auto& t : terms) {
        const double v = t.sign * std::exp(t.log_abs - peak);
        acc_abs += std::fabs(v);
        const double y = v - comp;
        const double s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    SumEval out;
    out.cancellation = acc_abs / std::max(std::fabs(acc), 1e-300);
    out.lost_digits = static_cast<int>(std::max(0.0, std::log10(out.cancellation)));
    out.cancellation_warning = out.cancellation > kCancellationLimit;
    if (acc <= 0.0) {
        // fully cancelled; the true value is positive but unrecoverable here
        out.value = 0.0;
        out.log_value = -std::numeric_limits<double>::infinity();
        out.cancellation_warning = true;
        out.cancellation = std::numeric_limits<double>::infinity();
        return out;
    }
    out.log_value = peak + std::log(acc);
    out.value = std::exp(out.log_value);
    return out;
}

void require_params(const ChannelParams& p) {
    if (p.tx_antennas < 1) throw domain_error("service model: M must be >= 1");
    if (!(p.zeta > 0.0) || !std::isfinite(p.zeta))
        throw domain_error("service model: zeta must be positive and finite");
}

// Integrates exp(log_f) over [support_lo, inf) for a peaked exponent:
// a log-spaced scan over [grid_lo, grid_hi] locates the mass window (the
// peak can be a very narrow spike at deep transform orders), which is then
// integrated adaptively, plus the residual tail. Returns the log integral;
// `edge` supplies the normalized value exactly at support_lo.
struct PeakedIntegrand {
    std::function<double(double)> log_f;
    double support_lo = 0.0;
    double grid_lo = 1e-12;
    double grid_hi = 1.0;
    double edge = 0.0;  // lim exp(log_f) at support_lo, pre-normalization
};

double log_peaked_integral(const PeakedIntegrand& in, double rel_tol, const char* what) {
    constexpr int n_scan = 384;
    constexpr double drop = 60.0;  // e^-60 below peak is negligible mass
    double peak = -std::numeric_limits<double>::infinity();
    int peak_idx = 0;
    std::vector<double> xs(n_scan + 1), ls(n_scan + 1);
    const double ratio = std::log(in.grid_hi / in.grid_lo);
    for (int k = 0; k <= n_scan; ++k) {
        xs[k] = in.grid_lo * std::exp(ratio * k / n_scan);
        ls[k] = in.log_f(xs[k]);
        if (ls[k] > peak) {
            peak = ls[k];
            peak_idx = k;
        }
    }
    int ia = peak_idx, ib = peak_idx;
    while (ia > 0 && ls[ia - 1] > peak - drop) --ia;
    while (ib < n_scan && ls[ib + 1] > peak - drop) ++ib;
    const double xa = ia > 0 ? xs[ia - 1] : in.support_lo;
    const double xb = xs[ib];

    quadrature::QuadOptions opt;
    opt.rel_tol = rel_tol;
    const double pk = peak;
    const auto f = [&in, pk](double x) {
        if (x <= in.support_lo) return in.edge * std::exp(-pk);
        return std::exp(in.log_f(x) - pk);
    };
    double total = 0.0;
    double err = 0.0;
    bool ok = true;
    if (xa > in.support_lo) {
        const auto head = quadrature::integrate(f, in.support_lo, xa, opt);
        total += head.value;
        err += head.abs_error;
        ok = ok && head.converged;
    }
    const auto body = quadrature::integrate(f, std::max(xa, in.support_lo), xb, opt);
    total += body.value;
    err += body.abs_error;
    ok = ok && body.converged;
    const auto tail = quadrature::integrate_right_tail(
        f, xb, std::max((xb - xa) / 4.0, xb * 0.03125) + 1e-30, opt);
    total += tail.value;
    err += tail.abs_error;
    ok = ok && tail.converged;
    if (!ok || !(total > 0.0))
        throw numeric_error(std::string(what) + " quadrature did not converge",
                            err / std::max(total, 1e-300));
    return pk + std::log(total);
}

// log E[(1+x)^{s-1}] over a Gamma(shape, scale) density by quadrature.
// Shared by the oracle op, the non-integer Nakagami path and the FB
// transform.
double log_gamma_mellin_quad(double shape, double scale, double s, double rel_tol) {
    const double lg = std::lgamma(shape) + shape * std::log(scale);
    PeakedIntegrand in;
    in.log_f = [shape, scale, s, lg](double x) {
        return (s - 1.0) * std::log1p(x) + (shape - 1.0) * std::log(x) - x / scale - lg;
    };
    in.support_lo = 0.0;
    in.grid_lo = scale * 1e-12;
    in.grid_hi = scale * (shape + 60.0 + 10.0 * std::sqrt(shape)) + 10.0 * std::fabs(s);
    in.edge = (shape == 1.0) ? std::exp(-lg) : 0.0;
    return log_peaked_integral(in, rel_tol, "gamma Mellin");
}

}  // namespace

double channel_dispersion(double x) {
    if (x < 0.0) throw domain_error("channel_dispersion: requires x >= 0");
    return x * (x + 2.0) / ((1.0 + x) * (1.0 + x));
}

double fb_phi_threshold(double F) {
    if (F <= 0.0) return 0.0;
    const auto h = [F](double x) { return std::log1p(x) - F * std::sqrt(channel_dispersion(x)); };
    double lo = 1e-12, hi = 1e6;
    if (!(h(lo) < 0.0)) return 0.0;
    if (!(h(hi) > 0.0))
        throw numeric_error("fb_phi_threshold: no sign change on the bracket", F);
    // bisection in log x
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-14 * hi) break;
    }
    return 0.5 * (lo + hi);
}

MellinFn mellin_mrt_tricomi(const ChannelParams& p) {
    require_params(p);
    const int m = p.tx_antennas;
    const double zeta = p.zeta;
    return MellinFn(
        [m, zeta](double s) {
            return -m * std::log(zeta) + specfun::log_tricomi_u(m, m + s, 1.0 / zeta);
        },
        "finite for all real s");
}

SumEval mellin_mrt_sum_eval(const ChannelParams& p, double s) {
    require_params(p);
    const int m = p.tx_antennas;
    const double zeta = p.zeta;
    const double inv_zeta = 1.0 / zeta;
    std::vector<SignedLogTerm> terms;
    terms.reserve(m);
    for (int j = 0; j < m; ++j) {
        SignedLogTerm t;
        t.log_abs = inv_zeta + (j + s - m) * std::log(zeta) +
                    specfun::log_upper_incomplete_gamma(j + s, inv_zeta) -
                    std::lgamma(double(m - j)) - std::lgamma(double(j + 1));
        t.sign = ((m - 1 - j) % 2 == 0) ? 1.0 : -1.0;
        terms.push_back(t);
    }
    return signed_log_sum(terms);
}

MellinFn mellin_mrt_sum(const ChannelParams& p) {
    require_params(p);
    return MellinFn(
        [p](double s) { return mellin_mrt_sum_eval(p, s).log_value; },
        "finite for all real s; alternating sum, may lose digits at large zeta");
}

MellinFn mellin_ostbc(const ChannelParams& p) {
    require_params(p);
    const int m = p.tx_antennas;
    const double scale = p.snr / m;  // Gamma(M, snr/M)
    return MellinFn(
        [m, scale](double s) {
            return -m * std::log(scale) + specfun::log_tricomi_u(m, m + s, 1.0 / scale);
        },
        "finite for all real s");
}

SumEval mellin_tas_eval(const ChannelParams& p, double s) {
    require_params(p);
    const int m = p.tx_antennas;
    const double zeta = p.zeta;
    std::vector<SignedLogTerm> terms;
    terms.reserve(m);
    for (int k = 0; k < m; ++k) {
        const double kp1 = k + 1.0;
        SignedLogTerm t;
        t.log_abs = std::log(double(m)) + (s - 1.0) * std::log(zeta) +
                    std::lgamma(double(m)) - std::lgamma(double(m - k)) -
                    std::lgamma(kp1) + kp1 / zeta - s * std::log(kp1) +
                    specfun::log_upper_incomplete_gamma(s, kp1 / zeta);
        t.sign = (k % 2 == 0) ? 1.0 : -1.0;
        terms.push_back(t);
    }
    return signed_log_sum(terms);
}

MellinFn mellin_tas(const ChannelParams& p) {
    require_params(p);
    return MellinFn(
        [p](double s) { return mellin_tas_eval(p, s).log_value; },
        "finite for all real s; alternating sum, may lose digits at large zeta");
}

MellinFn mellin_nakagami(double m, double snr) {
    if (!(m > 0.0)) throw domain_error("mellin_nakagami: m must be > 0");
    if (!(snr > 0.0)) throw domain_error("mellin_nakagami: snr must be > 0");
    const bool integer_shape = std::fabs(m - std::round(m)) < 1e-12;
    if (integer_shape) {
        const int mi = static_cast<int>(std::lround(m));
        return MellinFn(
            [mi, snr](double s) {
                return -mi * std::log(snr) + specfun::log_tricomi_u(mi, mi + s, 1.0 / snr);
            },
            "finite for all real s");
    }
    return MellinFn(
        [m, snr](double s) { return log_gamma_mellin_quad(m, snr, s, 1e-11); },
        "finite for all real s; non-integer shape via quadrature");
}

MellinFn mellin_mimo_eigen(const ChannelParams& p, const CoefficientTable& table) {
    require_params(p);
    validate_coefficient_table(table, p.tx_antennas, p.rx_antennas);
    const double zeta = p.zeta;
    double log_r = 0.0;
    for (int k = 1; k <= p.rx_antennas; ++k)
        log_r -= std::lgamma(double(p.rx_antennas - k + 1)) +
                 std::lgamma(double(p.tx_antennas - k + 1));
    const CoefficientTable tbl = table;
    return MellinFn(
        [tbl, zeta, log_r](double s) {
            std::vector<SignedLogTerm> terms;
            terms.reserve(tbl.entries.size());
            for (const auto& e : tbl.entries) {
                if (e.c == 0.0) continue;
                SignedLogTerm t;
                t.log_abs = log_r + std::lgamma(e.m + 1.0) + std::log(std::fabs(e.c)) -
                            (e.m + 1.0) * std::log(zeta) +
                            specfun::log_tricomi_u(e.m + 1, e.m + 1 + s, e.i / zeta);
                t.sign = e.c > 0.0 ? 1.0 : -1.0;
                terms.push_back(t);
            }
            const SumEval sum = signed_log_sum(terms);
            return sum.log_value;
        },
        "finite for all real s");
}

MellinFn mellin_high_snr(const ChannelParams& p) {
    require_params(p);
    const int m = p.tx_antennas;
    const double zeta = p.zeta;
    const double boundary = 1.0 - m;
    return MellinFn(
        [m, zeta, boundary](double s) {
            const double log_zeta = std::log(zeta);
            if (std::fabs(s - boundary) <= 1e-12) {
                const double body = log_zeta - specfun::digamma(double(m));
                if (!(body > 0.0))
                    throw domain_error("mellin_high_snr: boundary branch needs ln zeta > psi(M)");
                return -m * log_zeta + std::log(body) - std::lgamma(double(m));
            }
            if (s > boundary)
                return (s - 1.0) * log_zeta + std::lgamma(s + m - 1.0) - std::lgamma(double(m));
            return -m * log_zeta + std::lgamma(1.0 - s - m) - std::lgamma(1.0 - s);
        },
        "asymptotic in zeta; branches split at s = 1-M");
}

MellinFn mellin_low_snr(const ChannelParams& p) {
    require_params(p);
    const int m = p.tx_antennas;
    const double zeta = p.zeta;
    return MellinFn(
        [m, zeta](double s) {
            if (!(s < 1.0 / zeta + 1.0))
                throw domain_error("mellin_low_snr: requires s < 1/zeta + 1 (MGF pole)");
            return -double(m) * std::log1p((1.0 - s) * zeta);
        },
        "finite for s < 1/zeta + 1");
}

MellinFn mellin_gaussian(double mu, double sigma2) {
    if (sigma2 < 0.0) throw domain_error("mellin_gaussian: sigma2 must be >= 0");
    return MellinFn(
        [mu, sigma2](double s) { return (s - 1.0) * mu + 0.5 * (s - 1.0) * (s - 1.0) * sigma2; },
        "finite for all real s");
}

MellinFn mellin_hardening(const ChannelParams& p) {
    require_params(p);
    const double rate = std::log1p(p.zeta * p.tx_antennas);
    return MellinFn([rate](double s) { return (s - 1.0) * rate; },
                    "finite for all real s; deterministic-rate limit");
}

namespace {

// log E[q(gamma)^{s-1}] with q = max((1+x) e^{-F sqrt(V(x))}, 1) over a
// Gamma(M, zeta) SNR: regularized mass below phi plus the tail integral.
double log_fb_quality_mellin(int m, double zeta, double F, double s) {
    if (F == 0.0)
        return -m * std::log(zeta) + specfun::log_tricomi_u(m, m + s, 1.0 / zeta);
    const double phi = fb_phi_threshold(F);
    const double below = phi > 0.0 ? specfun::regularized_lower_gamma(double(m), phi / zeta) : 0.0;
    const double lg = std::lgamma(double(m)) + m * std::log(zeta);
    PeakedIntegrand in;
    in.log_f = [m, zeta, F, s, lg](double x) {
        const double log_q = std::log1p(x) - F * std::sqrt(channel_dispersion(x));
        return (s - 1.0) * log_q + (m - 1.0) * std::log(x) - x / zeta - lg;
    };
    in.support_lo = phi;
    in.grid_lo = std::max(phi * (1.0 + 1e-9), zeta * 1e-12);
    in.grid_hi = zeta * (m + 60.0 + 10.0 * std::sqrt(double(m))) + 10.0 * std::fabs(s) + phi;
    in.edge = phi > 0.0 ? std::exp(in.log_f(phi)) : ((m == 1) ? std::exp(-lg) : 0.0);
    const double tail = std::exp(log_peaked_integral(in, 1e-9, "finite-blocklength Mellin"));
    return std::log(below + tail);
}

}  // namespace

MellinFn mellin_fb(const ChannelParams& p, const FiniteBlocklengthSpec& fb) {
    require_params(p);
    fb.validate();
    const int m = p.tx_antennas;
    const double zeta = p.zeta;
    const double F = fb.effective_F();
    const double eps = fb.eps;
    return MellinFn(
        [m, zeta, F, eps](double s) {
            const double log_mq = log_fb_quality_mellin(m, zeta, F, s);
            return std::log((1.0 - eps) * std::exp(log_mq) + eps);
        },
        "finite for all real s; error floor eps");
}

MellinFn mellin_fb_high_snr(const ChannelParams& p, const FiniteBlocklengthSpec& fb) {
    require_params(p);
    fb.validate();
    const int m = p.tx_antennas;
    const double zeta = p.zeta;
    const double F = fb.effective_F();
    const double eps = fb.eps;
    return MellinFn(
        [m, zeta, F, eps](double s) {
            const double inv_zeta = 1.0 / zeta;
            const double ef = std::exp(F);
            const double below =
                F > 0.0 ? specfun::regularized_lower_gamma(double(m), (ef - 1.0) * inv_zeta) : 0.0;
            std::vector<SignedLogTerm> terms;
            terms.reserve(m);
            const double prefix = inv_zeta - m * std::log(zeta) - std::lgamma(double(m)) -
                                  F * (s - 1.0);
            for (int j = 0; j < m; ++j) {
                SignedLogTerm t;
                t.log_abs = prefix + std::lgamma(double(m)) - std::lgamma(double(m - j)) -
                            std::lgamma(double(j + 1)) + (j + s) * std::log(zeta) +
                            specfun::log_upper_incomplete_gamma(j + s, ef * inv_zeta);
                t.sign = ((m - 1 - j) % 2 == 0) ? 1.0 : -1.0;
                terms.push_back(t);
            }
            const SumEval sum = signed_log_sum(terms);
            const double mq = below + sum.value;
            return std::log((1.0 - eps) * mq + eps);
        },
        "asymptotic in zeta; error floor eps");
}

double mellin_quadrature_oracle(const SchemeSpec& scheme, double s) {
    scheme.validate();
    const ChannelParams& p = scheme.params;
    switch (scheme.kind) {
        case SchemeKind::MrtExact:
        case SchemeKind::MrtSumForm:
            return std::exp(log_gamma_mellin_quad(double(p.tx_antennas), p.zeta, s, 1e-11));
        case SchemeKind::Ostbc:
            return std::exp(log_gamma_mellin_quad(double(p.tx_antennas), p.snr / p.tx_antennas, s,
                                                  1e-11));
        case SchemeKind::Nakagami:
            return std::exp(log_gamma_mellin_quad(scheme.nakagami_m, p.snr, s, 1e-11));
        case SchemeKind::Tas: {
            const int m = p.tx_antennas;
            const double zeta = p.zeta;
            quadrature::QuadOptions opt;
            opt.rel_tol = 1e-11;
            const auto f = [m, zeta, s](double x) {
                if (x < 0.0) return 0.0;
                if (x == 0.0) return m == 1 ? 1.0 : 0.0;
                return m * std::exp((s - 1.0) * std::log1p(zeta * x) - x +
                                    (m - 1.0) * std::log1p(-std::exp(-x)));
            };
            const auto r = quadrature::integrate_right_tail(f, 0.0, 1.0 + std::log(double(m)), opt);
            if (!r.converged)
                throw numeric_error("TAS oracle quadrature did not converge",
                                    r.abs_error / std::max(r.value, 1e-300));
            return r.value;
        }
        case SchemeKind::MimoEigen: {
            const double zeta = p.zeta;
            double log_r = 0.0;
            for (int k = 1; k <= p.rx_antennas; ++k)
                log_r -= std::lgamma(double(p.rx_antennas - k + 1)) +
                         std::lgamma(double(p.tx_antennas - k + 1));
            const auto& entries = scheme.table.entries;
            quadrature::QuadOptions opt;
            opt.rel_tol = 1e-11;
            const auto f = [&entries, zeta, s, log_r](double x) {
                if (x <= 0.0) return 0.0;
                double density = 0.0;
                for (const auto& e : entries)
                    density += e.c * std::exp(e.m * std::log(x) - e.i * x);
                return std::exp((s - 1.0) * std::log1p(zeta * x) + log_r) * density;
            };
            const auto r = quadrature::integrate_right_tail(
                f, 0.0, 1.0 + double(p.tx_antennas * p.rx_antennas) / 4.0, opt);
            if (!r.converged)
                throw numeric_error("MIMO oracle quadrature did not converge",
                                    r.abs_error / std::max(r.value, 1e-300));
            return r.value;
        }
        case SchemeKind::LowSnrApprox: {
            // defining expectation of the low-SNR model: E[e^{(s-1) gamma}]
            const int m = p.tx_antennas;
            const double zeta = p.zeta;
            if (!(s < 1.0 / zeta + 1.0))
                throw domain_error("oracle: low-SNR expectation divergent at this s");
            const double lg = std::lgamma(double(m)) + m * std::log(zeta);
            quadrature::QuadOptions opt;
            opt.rel_tol = 1e-11;
            const auto f = [m, zeta, s, lg](double x) {
                if (x < 0.0) return 0.0;
                if (x == 0.0) return m == 1 ? 1.0 / zeta : 0.0;
                return std::exp((s - 1.0) * x + (m - 1.0) * std::log(x) - x / zeta - lg);
            };
            const double eff = 1.0 / (1.0 / zeta - (s - 1.0));
            const auto r = quadrature::integrate_right_tail(f, 0.0, eff * (1.0 + m / 8.0), opt);
            if (!r.converged)
                throw numeric_error("low-SNR oracle quadrature did not converge",
                                    r.abs_error / std::max(r.value, 1e-300));
            return r.value;
        }
        case SchemeKind::HighSnrApprox: {
            // defining expectation of the first branch: E[gamma^{s-1}],
            // on the log axis x = e^y so power endpoints stay regular
            const int m = p.tx_antennas;
            const double zeta = p.zeta;
            const double c = s + m - 1.0;
            if (c <= 0.0)
                throw domain_error("oracle: high-SNR expectation divergent at this s");
            const double lg = std::lgamma(double(m)) + m * std::log(zeta);
            const double y_pk = std::log(c * zeta);
            const double log_pk = c * y_pk - std::exp(y_pk) / zeta;
            const auto f = [c, zeta, lg, log_pk](double y) {
                return std::exp(c * y - std::exp(y) / zeta - log_pk - lg);
            };
            quadrature::QuadOptions opt;
            opt.rel_tol = 1e-11;
            const double width = 1.0 / std::sqrt(c) + 1.0;
            const auto right = quadrature::integrate_right_tail(
                [&](double u) { return f(y_pk + u); }, 0.0, width, opt);
            const auto left = quadrature::integrate_right_tail(
                [&](double u) { return f(y_pk - u); }, 0.0, width, opt);
            if (!right.converged || !left.converged)
                throw numeric_error("high-SNR oracle quadrature did not converge",
                                    (right.abs_error + left.abs_error) /
                                        std::max(right.value + left.value, 1e-300));
            return (right.value + left.value) * std::exp(log_pk);
        }
        default:
            throw domain_error("oracle: scheme has no explicit SNR density");
    }
}

MellinFn build_mellin(const SchemeSpec& scheme) {
    scheme.validate();
    switch (scheme.kind) {
        case SchemeKind::MrtExact: return mellin_mrt_tricomi(scheme.params);
        case SchemeKind::MrtSumForm: {
            const ChannelParams p = scheme.params;
            return MellinFn(
                [p](double s) {
                    const SumEval sum = mellin_mrt_sum_eval(p, s);
                    if (sum.cancellation_warning)
                        return -p.tx_antennas * std::log(p.zeta) +
                               specfun::log_tricomi_u(p.tx_antennas, p.tx_antennas + s,
                                                      1.0 / p.zeta);
                    return sum.log_value;
                },
                "sum form with hypergeometric fallback on cancellation");
        }
        case SchemeKind::Ostbc: return mellin_ostbc(scheme.params);
        case SchemeKind::Tas: return mellin_tas(scheme.params);
        case SchemeKind::Nakagami: return mellin_nakagami(scheme.nakagami_m, scheme.params.snr);
        case SchemeKind::GaussianApprox: return mellin_gaussian(scheme.gauss_mu, scheme.gauss_sigma2);
        case SchemeKind::LowSnrApprox: return mellin_low_snr(scheme.params);
        case SchemeKind::HighSnrApprox: return mellin_high_snr(scheme.params);
        case SchemeKind::MimoEigen: return mellin_mimo_eigen(scheme.params, scheme.table);
        case SchemeKind::HardeningLimit: return mellin_hardening(scheme.params);
    }
    throw domain_error("build_mellin: unknown scheme");
}

MellinFn build_mellin_fb(const SchemeSpec& scheme, const FiniteBlocklengthSpec& fb) {
    scheme.validate();
    switch (scheme.kind) {
        case SchemeKind::MrtExact:
        case SchemeKind::MrtSumForm:
            return mellin_fb(scheme.params, fb);
        case SchemeKind::HighSnrApprox:
            return mellin_fb_high_snr(scheme.params, fb);
        default:
            throw domain_error(
                "build_mellin_fb: finite blocklength supported for gamma-SNR schemes only");
    }
}

}  // namespace snc
