#pragma once

#include <functional>

namespace snc::quadrature {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;   // estimated
    long evaluations = 0;
    bool converged = false;
};

struct QuadOptions {
    double rel_tol = 1e-11;
    double abs_tol = 0.0;     // secondary floor, 0 disables
    int max_intervals = 4000;
};

/// Adaptive Gauss-Kronrod 15(7) on a finite interval. Worst-interval-first
/// subdivision; fully deterministic for a given integrand.
QuadResult integrate(const std::function<double(double)>& f, double lo, double hi,
                     const QuadOptions& opt = {});

/// Integral over [lo, inf). The tail is brought in by doubling panels
/// [T, 2T] until the increment falls below tolerance; the caller supplies
/// `scale`, a point near which the integrand mass lives (panel sizing).
QuadResult integrate_right_tail(const std::function<double(double)>& f, double lo,
                                double scale, const QuadOptions& opt = {});

}  // namespace snc::quadrature
