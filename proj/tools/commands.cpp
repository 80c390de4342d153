#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>
#include <vector>

#include "snc/bound.hpp"
#include "snc/errors.hpp"
#include "snc/service_models.hpp"
#include "snc/simulator.hpp"
#include "snc/specfun.hpp"

namespace cli {

namespace {

constexpr double kLn2 = 0.6931471805599453;

template <typename Body>
void parallel_for(long count, int threads, Body&& body) {
    if (threads <= 0)
        threads = static_cast<int>(std::min<unsigned>(std::thread::hardware_concurrency(), 8));
    threads = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    if (threads == 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const long i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// One resolved sweep point: the scenario with the axis value applied.
struct Point {
    Scenario sc;
    double axis_value = 0.0;
    double w_ms = 0.0;
};

std::vector<Point> expand_sweep(const Scenario& sc) {
    std::vector<Point> points;
    switch (sc.sweep) {
        case SweepAxis::None: {
            points.push_back({sc, sc.w_ms, sc.w_ms});
            break;
        }
        case SweepAxis::W: {
            const auto ws = sc.range.empty() ? std::vector<double>{sc.w_ms}
                                             : parse_range(sc.range);
            for (double w : ws) points.push_back({sc, w, w});
            break;
        }
        case SweepAxis::Antennas: {
            for (double v : parse_range(sc.range)) {
                Point p{sc, std::round(v), sc.w_ms};
                p.sc.antennas = static_cast<int>(std::lround(v));
                points.push_back(p);
            }
            break;
        }
        case SweepAxis::SnrDb: {
            for (double v : parse_range(sc.range)) {
                Point p{sc, v, sc.w_ms};
                p.sc.snr_db = v;
                points.push_back(p);
            }
            break;
        }
        case SweepAxis::Eps: {
            if (!sc.use_fb) throw snc::config_error("sweep = eps requires fb = 1");
            for (double v : parse_range(sc.range)) {
                Point p{sc, v, sc.w_ms};
                p.sc.eps = v;
                points.push_back(p);
            }
            break;
        }
        case SweepAxis::Blocklength: {
            // Fixed symbol time: scaling n scales the data airtime with it.
            const double symbol_ms = sc.T_ms / sc.n;
            for (double v : parse_range(sc.range)) {
                const int n = std::max(1, static_cast<int>(std::lround(v)));
                Point p{sc, double(n), sc.w_ms};
                p.sc.n = n;
                p.sc.T_ms = symbol_ms * n;
                points.push_back(p);
            }
            break;
        }
        case SweepAxis::SigmaE2: {
            for (double v : parse_range(sc.range)) {
                Point p{sc, v, sc.w_ms};
                p.sc.sigma_e2 = v;
                points.push_back(p);
            }
            break;
        }
    }
    if (points.empty()) throw snc::config_error("sweep produced no points");
    return points;
}

snc::MellinFn point_mellin(const Scenario& sc) {
    const auto scheme = sc.scheme_spec();
    const auto fb = sc.fb_spec();
    return fb ? snc::build_mellin_fb(scheme, *fb) : snc::build_mellin(scheme);
}

std::string axis_column(const Scenario& sc) {
    switch (sc.sweep) {
        case SweepAxis::W: case SweepAxis::None: return "w_ms";
        case SweepAxis::Antennas: return "M";
        case SweepAxis::SnrDb: return "snr_db";
        case SweepAxis::Eps: return "eps";
        case SweepAxis::Blocklength: return "n";
        case SweepAxis::SigmaE2: return "sigma_e2";
    }
    return "axis";
}

}  // namespace

bool all_rows_unstable(const Table& t) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), "status");
    if (it == t.columns.end() || t.rows.empty()) return false;
    const std::size_t idx = it - t.columns.begin();
    for (const auto& row : t.rows) {
        if (std::get<std::string>(row[idx]) != "unstable") return false;
    }
    return true;
}

Table cmd_bound(const Scenario& sc) {
    sc.finalize();
    const auto points = expand_sweep(sc);
    Table table;
    table.meta = sc.metadata();
    table.meta.emplace_back("command", "bound");
    table.columns = {axis_column(sc), "M",       "snr_db", "sigma_e2",        "zeta",
                     "rho_nats",      "n",       "n_m",    "w_slots",         "p_v",
                     "s_star",        "stability_margin",  "status"};
    std::vector<std::vector<Cell>> rows(points.size());
    parallel_for(static_cast<long>(points.size()), sc.threads, [&](long i) {
        const Point& pt = points[i];
        const auto slot = pt.sc.slot_spec();
        const snc::ArrivalSpec arrival{pt.sc.rho_nats(slot)};
        const long w = pt.sc.w_slots(slot, pt.w_ms);
        const auto mel = point_mellin(pt.sc);
        const auto res = snc::delay_bound(mel, arrival, slot, w);
        rows[i] = {pt.axis_value,
                   static_cast<long>(pt.sc.antennas),
                   pt.sc.snr_db,
                   pt.sc.sigma_e2,
                   pt.sc.scheme_spec().params.zeta,
                   arrival.rho_nats,
                   static_cast<long>(pt.sc.n),
                   static_cast<long>(pt.sc.n_m),
                   w,
                   res.p_v,
                   res.s_star,
                   res.stability_margin,
                   std::string(snc::bound_status_name(res.status))};
    });
    for (auto& r : rows) table.add_row(std::move(r));
    return table;
}

Table cmd_simulate(const Scenario& sc) {
    sc.finalize();
    Table table;
    table.meta = sc.metadata();
    table.meta.emplace_back("command", "simulate");
    table.meta.emplace_back("horizon_slots", std::to_string(sc.horizon));
    const long warmup = sc.warmup >= 0 ? sc.warmup : sc.horizon / 10;
    table.meta.emplace_back("warmup_slots", std::to_string(warmup));
    table.columns = {axis_column(sc), "M",      "snr_db",  "w_slots", "p_v_bound",
                     "p_v_empirical", "ci_low", "ci_high", "violations",
                     "measured_slots", "mean_service_nats", "utilization"};

    const bool w_sweep = sc.sweep == SweepAxis::W || sc.sweep == SweepAxis::None;
    if (w_sweep) {
        const auto slot = sc.slot_spec();
        const snc::ArrivalSpec arrival{sc.rho_nats(slot)};
        const auto ws =
            (sc.sweep == SweepAxis::W && !sc.range.empty()) ? parse_range(sc.range)
                                                            : std::vector<double>{sc.w_ms};
        snc::sim::SimConfig cfg;
        cfg.scheme = sc.scheme_spec();
        cfg.arrival = arrival;
        cfg.slot = slot;
        cfg.fb = sc.fb_spec();
        cfg.horizon_slots = sc.horizon;
        cfg.warmup_slots = warmup;
        cfg.seed = sc.seed;
        std::vector<long> w_slots_grid;
        for (double w : ws) w_slots_grid.push_back(sc.w_slots(slot, w));
        std::sort(w_slots_grid.begin(), w_slots_grid.end());
        w_slots_grid.erase(std::unique(w_slots_grid.begin(), w_slots_grid.end()),
                           w_slots_grid.end());
        cfg.w_grid = w_slots_grid;
        const auto sim_res = snc::sim::run(cfg);
        const auto mel = point_mellin(sc);
        for (const auto& stat : sim_res.per_w) {
            const auto bound = snc::delay_bound(mel, arrival, slot, stat.w_slots);
            table.add_row({static_cast<double>(stat.w_slots) * slot.slot_seconds() * 1e3,
                           static_cast<long>(sc.antennas), sc.snr_db, stat.w_slots, bound.p_v,
                           stat.violation_probability, stat.ci_low, stat.ci_high,
                           stat.violations, sim_res.measured_slots, sim_res.mean_service_nats,
                           sim_res.utilization});
        }
        return table;
    }

    const auto points = expand_sweep(sc);
    std::vector<std::vector<Cell>> rows(points.size());
    parallel_for(static_cast<long>(points.size()), sc.threads, [&](long i) {
        const Point& pt = points[i];
        const auto slot = pt.sc.slot_spec();
        const snc::ArrivalSpec arrival{pt.sc.rho_nats(slot)};
        const long w = pt.sc.w_slots(slot, pt.w_ms);
        snc::sim::SimConfig cfg;
        cfg.scheme = pt.sc.scheme_spec();
        cfg.arrival = arrival;
        cfg.slot = slot;
        cfg.fb = pt.sc.fb_spec();
        cfg.horizon_slots = pt.sc.horizon;
        cfg.warmup_slots = warmup;
        cfg.seed = snc::SplitMix64::stream(pt.sc.seed, static_cast<std::uint64_t>(i)).next();
        cfg.w_grid = {w};
        const auto sim_res = snc::sim::run(cfg);
        const auto bound = snc::delay_bound(point_mellin(pt.sc), arrival, slot, w);
        const auto& stat = sim_res.per_w.front();
        rows[i] = {pt.axis_value,        static_cast<long>(pt.sc.antennas),
                   pt.sc.snr_db,         stat.w_slots,
                   bound.p_v,            stat.violation_probability,
                   stat.ci_low,          stat.ci_high,
                   stat.violations,      sim_res.measured_slots,
                   sim_res.mean_service_nats, sim_res.utilization};
    });
    for (auto& r : rows) table.add_row(std::move(r));
    return table;
}

Table cmd_effcap(const Scenario& sc) {
    sc.finalize();
    const auto thetas = parse_range(sc.theta_range);
    const auto scheme = sc.scheme_spec();
    const auto slot = sc.slot_spec();
    const auto mel = snc::build_mellin(scheme);

    bool have_moments = false;
    snc::sim::RateMoments moments;
    if (scheme.kind == snc::SchemeKind::GaussianApprox) {
        moments.mu = sc.gauss_mu;
        moments.sigma2 = sc.gauss_sigma2;
        have_moments = true;
    } else {
        try {
            moments = snc::sim::estimate_rate_moments(scheme, 1'000'000, sc.seed);
            have_moments = true;
        } catch (const snc::domain_error&) {
            have_moments = false;  // no sampler for this scheme
        }
    }

    Table table;
    table.meta = sc.metadata();
    table.meta.emplace_back("command", "effcap");
    table.meta.emplace_back("theta_grid", sc.theta_range);
    if (have_moments) {
        table.meta.emplace_back("gauss_mu", format_double(moments.mu));
        table.meta.emplace_back("gauss_sigma2", format_double(moments.sigma2));
        table.meta.emplace_back("moment_samples", "1000000");
    }
    table.columns = {"theta", "effcap_npcu", "effcap_kbps"};
    if (have_moments) table.columns.push_back("effcap_gauss_npcu");
    const double npcu_to_kbps = sc.n / (kLn2 * slot.slot_seconds() * 1000.0);
    for (double theta : thetas) {
        const double r = snc::effective_capacity(mel, theta);
        std::vector<Cell> row{theta, r, r * npcu_to_kbps};
        if (have_moments) row.emplace_back(moments.mu - 0.5 * theta * moments.sigma2);
        table.add_row(std::move(row));
    }
    return table;
}

Table cmd_epsopt(const Scenario& sc) {
    sc.finalize();
    if (sc.range.empty()) throw snc::config_error("epsopt needs an eps range (range = ...)");
    const auto eps_grid = parse_range(sc.range);
    std::vector<int> antennas = sc.antenna_list;
    if (antennas.empty()) antennas.push_back(sc.antennas);

    Table table;
    table.meta = sc.metadata();
    table.meta.emplace_back("command", "epsopt");
    table.meta.emplace_back("w_ms_target", format_double(sc.w_ms));
    table.columns = {"M", "eps", "w_slots", "p_v", "s_star", "status", "is_argmin"};

    const long n_points = static_cast<long>(antennas.size() * eps_grid.size());
    std::vector<std::vector<Cell>> rows(n_points);
    std::vector<double> pvs(n_points);
    parallel_for(n_points, sc.threads, [&](long idx) {
        const int m = antennas[idx / eps_grid.size()];
        const double eps = eps_grid[idx % eps_grid.size()];
        Scenario point = sc;
        point.antennas = m;
        point.eps = eps;
        point.use_fb = true;
        const auto slot = point.slot_spec();
        const snc::ArrivalSpec arrival{point.rho_nats(slot)};
        const long w = point.w_slots(slot, point.w_ms);
        const auto res =
            snc::delay_bound(point_mellin(point), arrival, slot, w);
        pvs[idx] = res.p_v;
        rows[idx] = {static_cast<long>(m), eps,     w,
                     res.p_v,              res.s_star,
                     std::string(snc::bound_status_name(res.status)), 0L};
    });
    // mark the per-M argmin
    for (std::size_t a = 0; a < antennas.size(); ++a) {
        long best = -1;
        for (std::size_t e = 0; e < eps_grid.size(); ++e) {
            const long idx = static_cast<long>(a * eps_grid.size() + e);
            if (best < 0 || pvs[idx] < pvs[best]) best = idx;
        }
        if (best >= 0) rows[best].back() = 1L;
    }
    for (auto& r : rows) table.add_row(std::move(r));
    return table;
}

namespace {

struct CheckPrinter {
    std::ostream& out;
    bool all_ok = true;

    void operator()(const std::string& name, bool ok, double worst, const char* unit) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", worst);
        out << (ok ? "PASS " : "FAIL ") << name << " (worst " << buf << " " << unit << ")\n";
        all_ok = all_ok && ok;
    }
};

}  // namespace

bool cmd_validate(const Scenario& sc, std::ostream& out) {
    CheckPrinter check{out};
    const double s_grid[] = {-20.0, -5.0, -1.0, 0.0, 0.5, 0.9, 1.0, 1.5};
    const double zeta_grid[] = {0.25, 1.0, 4.0};

    // normalization at s = 1
    {
        double worst = 0.0;
        for (int m : {1, 2, 3, 4}) {
            for (double z : zeta_grid) {
                const auto p = snc::ChannelParams::perfect_csi(m, z);
                for (const auto& mel :
                     {snc::mellin_mrt_tricomi(p), snc::mellin_mrt_sum(p), snc::mellin_tas(p),
                      snc::mellin_ostbc(snc::ChannelParams::perfect_csi(m, z * m)),
                      snc::mellin_hardening(p), snc::mellin_low_snr(p),
                      snc::mellin_fb(p, snc::FiniteBlocklengthSpec::make(168, 1e-3))}) {
                    worst = std::max(worst, std::fabs(mel(1.0) - 1.0));
                }
            }
        }
        worst = std::max(worst, std::fabs(snc::mellin_nakagami(2.5, 1.7)(1.0) - 1.0));
        check("normalization eval(1) = 1", worst < 1e-9, worst, "abs");
    }

    // closed forms against the quadrature oracle
    {
        double worst = 0.0;
        for (int m : {1, 2, 3, 4}) {
            for (double z : zeta_grid) {
                snc::SchemeSpec mrt;
                mrt.kind = snc::SchemeKind::MrtExact;
                mrt.params = snc::ChannelParams::perfect_csi(m, z);
                snc::SchemeSpec ostbc;
                ostbc.kind = snc::SchemeKind::Ostbc;
                ostbc.params = snc::ChannelParams::perfect_csi(m, z * m);
                snc::SchemeSpec tas = mrt;
                tas.kind = snc::SchemeKind::Tas;
                snc::SchemeSpec low = mrt;
                low.kind = snc::SchemeKind::LowSnrApprox;
                snc::SchemeSpec high = mrt;
                high.kind = snc::SchemeKind::HighSnrApprox;
                const auto m_tri = snc::mellin_mrt_tricomi(mrt.params);
                const auto m_sum = snc::mellin_mrt_sum(mrt.params);
                const auto m_ostbc = snc::mellin_ostbc(ostbc.params);
                const auto m_tas = snc::mellin_tas(tas.params);
                const auto m_low = snc::mellin_low_snr(mrt.params);
                const auto m_high = snc::mellin_high_snr(mrt.params);
                const auto m_fb0 = snc::mellin_fb_high_snr(
                    mrt.params, snc::FiniteBlocklengthSpec::make(168, 0.5));  // F = 0
                for (double s : s_grid) {
                    const double ref = snc::mellin_quadrature_oracle(mrt, s);
                    worst = std::max(worst, std::fabs(m_tri(s) - ref) / ref);
                    worst = std::max(worst, std::fabs(m_sum(s) - ref) / ref);
                    worst = std::max(worst, std::fabs(m_ostbc(s) - ref) / ref);
                    // at F = 0 the finite-blocklength transform is the
                    // (1-eps) M + eps mixture of the exact one
                    const double fb_ref = 0.5 * ref + 0.5;
                    worst = std::max(worst, std::fabs(m_fb0(s) - fb_ref) / fb_ref);
                    const double tas_ref = snc::mellin_quadrature_oracle(tas, s);
                    worst = std::max(worst, std::fabs(m_tas(s) - tas_ref) / tas_ref);
                    if (s < 1.0 / z + 1.0) {
                        const double low_ref = snc::mellin_quadrature_oracle(low, s);
                        worst = std::max(worst, std::fabs(m_low(s) - low_ref) / low_ref);
                    }
                    if (s + m > 1.0 + 1e-9) {
                        const double high_ref = snc::mellin_quadrature_oracle(high, s);
                        worst = std::max(worst, std::fabs(m_high(s) - high_ref) / high_ref);
                    }
                }
            }
        }
        check("oracle equivalence (closed forms vs quadrature)", worst < 1e-8, worst, "rel");
    }

    // cross-form identity and the SISO reduction
    {
        double worst = 0.0;
        for (int m : {1, 2, 3, 4, 6, 8}) {
            for (double z : {0.1, 1.0, 10.0}) {
                const auto p = snc::ChannelParams::perfect_csi(m, z);
                const auto tri = snc::mellin_mrt_tricomi(p);
                for (double s = -30.0; s <= 3.0; s += 1.5) {
                    const auto sum = snc::mellin_mrt_sum_eval(p, s);
                    if (sum.cancellation_warning) continue;
                    worst = std::max(worst, std::fabs(sum.value - tri(s)) / tri(s));
                }
            }
        }
        check("cross-form identity (sum vs hypergeometric)", worst < 1e-8, worst, "rel");

        double worst_siso = 0.0;
        for (double snr : {0.25, 1.0, 4.0}) {
            const auto p = snc::ChannelParams::perfect_csi(1, snr);
            for (double s : {-3.0, 0.3, 0.5, 1.2}) {
                const double direct =
                    std::exp(1.0 / snr + (s - 1.0) * std::log(snr) +
                             snc::specfun::log_upper_incomplete_gamma(s, 1.0 / snr));
                const double sum = snc::mellin_mrt_sum(p)(s);
                worst_siso = std::max(worst_siso, std::fabs(sum - direct) / direct);
            }
        }
        check("SISO reduction (M=1 sum form)", worst_siso < 1e-12, worst_siso, "rel");
    }

    // orderings: antennas, TAS vs MRT, finite-blocklength penalty
    {
        double worst_gap = 0.0;
        bool ok = true;
        for (double z : zeta_grid) {
            for (double s : {-5.0, -1.0, 0.0, 0.5, 0.9}) {
                double prev = 2.0;
                for (int m : {1, 2, 3, 4}) {
                    const auto p = snc::ChannelParams::perfect_csi(m, z);
                    const double v = snc::mellin_mrt_tricomi(p)(s);
                    if (v > prev * (1.0 + 1e-10)) {
                        ok = false;
                        worst_gap = std::max(worst_gap, v - prev);
                    }
                    prev = v;
                    if (m >= 2) {
                        const double tas = snc::mellin_tas(p)(s);
                        if (v > tas * (1.0 + 1e-10)) {
                            ok = false;
                            worst_gap = std::max(worst_gap, v - tas);
                        }
                    }
                }
            }
        }
        check("orderings (antenna monotonicity, MRT <= TAS for s < 1)", ok, worst_gap, "abs");

        bool fb_ok = true;
        double fb_worst = 0.0;
        for (int m : {1, 2, 3}) {
            const auto p = snc::ChannelParams::perfect_csi(m, 3.16);
            const auto exact = snc::mellin_mrt_tricomi(p);
            for (double eps : {1e-4, 1e-3, 1e-2}) {
                const auto fb = snc::mellin_fb(p, snc::FiniteBlocklengthSpec::make(168, eps));
                for (double s : {-5.0, -1.0, 0.0, 0.5, 0.9}) {
                    const double slack = exact(s) - fb(s);
                    if (slack > 1e-10) {
                        fb_ok = false;
                        fb_worst = std::max(fb_worst, slack);
                    }
                }
            }
        }
        check("finite-blocklength penalty (FB >= exact for s < 1)", fb_ok, fb_worst, "abs");
    }

    out << (check.all_ok ? "VALIDATE OK" : "VALIDATE FAILED") << "\n";
    (void)sc;
    return check.all_ok;
}

}  // namespace cli
