#include "snc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace snc::quadrature {

namespace {

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1].
constexpr double kXgk[8] = {0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
                            0.7415311855993945, 0.5860872354676911, 0.4058451513773972,
                            0.2077849550078985, 0.0};
constexpr double kWgk[8] = {0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
                            0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
                            0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
                           0.4179591836734694};

struct Panel {
    double lo, hi, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel eval_panel(const std::function<double(double)>& f, double lo, double hi, long& evals) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double f_mid = f(mid);
    double kronrod = kWgk[7] * f_mid;
    double gauss = kWg[3] * f_mid;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        kronrod += kWgk[i] * fsum;
        if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
    }
    evals += 15;
    const double value = kronrod * half;
    const double err = std::fabs((kronrod - gauss) * half);
    // QUADPACK-style sharpening of the raw Gauss/Kronrod difference.
    const double scaled = std::pow(200.0 * err / (std::fabs(value) + 1e-300), 1.5);
    return {lo, hi, value, std::fabs(value) * std::min(1.0, scaled) + 1e-300};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double lo, double hi,
                     const QuadOptions& opt) {
    QuadResult res;
    if (!(hi > lo)) {
        res.converged = true;
        return res;
    }
    std::priority_queue<Panel> queue;
    queue.push(eval_panel(f, lo, hi, res.evaluations));
    double total = queue.top().value;
    double total_err = queue.top().error;
    int panels = 1;
    while (panels < opt.max_intervals) {
        const double goal = std::max(opt.rel_tol * std::fabs(total), opt.abs_tol);
        if (total_err <= goal && panels >= 2) break;
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {  // interval exhausted
            queue.push(worst);
            break;
        }
        const Panel left = eval_panel(f, worst.lo, mid, res.evaluations);
        const Panel right = eval_panel(f, mid, worst.hi, res.evaluations);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++panels;
    }
    res.value = total;
    res.abs_error = total_err;
    res.converged = total_err <= std::max(opt.rel_tol * std::fabs(total), opt.abs_tol) ||
                    total_err <= 1e-14 * std::fabs(total) + 1e-298;
    return res;
}

QuadResult integrate_right_tail(const std::function<double(double)>& f, double lo, double scale,
                                const QuadOptions& opt) {
    QuadResult res;
    scale = std::max(scale, 1e-300);
    // First panel covers the bulk around `scale`, then geometric extension
    // until a panel contributes less than the tolerance.
    double a = lo;
    double b = lo + 8.0 * scale;
    double total = 0.0;
    double total_err = 0.0;
    bool pieces_ok = true;
    QuadOptions local = opt;
    for (int k = 0; k < 220; ++k) {
        local.abs_tol = std::max(opt.abs_tol, 0.1 * opt.rel_tol * std::fabs(total));
        const QuadResult piece = integrate(f, a, b, local);
        res.evaluations += piece.evaluations;
        pieces_ok = pieces_ok && piece.converged;
        total += piece.value;
        total_err += piece.abs_error;
        const double width = b - a;
        a = b;
        b += 2.0 * width;
        if (std::fabs(piece.value) <= 0.25 * opt.rel_tol * std::fabs(total) + opt.abs_tol &&
            k >= 2) {
            res.value = total;
            res.abs_error = total_err;
            res.converged = pieces_ok;
            return res;
        }
    }
    res.value = total;
    res.abs_error = total_err;
    res.converged = false;
    return res;
}

}  // namespace snc::quadrature
