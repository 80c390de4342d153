#pragma once

namespace snc::specfun {

/// Linear-scale value with an explicit overflow marker. When `saturated`
/// is set, `value` is +inf and must not be fed into further arithmetic;
/// use the log-scale entry points instead.
struct GammaValue {
    double value = 0.0;
    bool saturated = false;
};

/// Upper incomplete gamma function Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt.
///
/// Valid for any real a (including a <= 0) and x > 0. Accuracy target is
/// 1e-12 relative on a in [-500, 500], x in [1e-8, 700]. Overflow of the
/// linear value is reported through GammaValue::saturated.
GammaValue upper_incomplete_gamma(double a, double x);

/// log Gamma(a, x). The value itself is always strictly positive for
/// x > 0, so no sign bookkeeping is needed. This is the entry point the
/// alternating-sum service transforms use: their summands stay finite in
/// log scale even when the linear terms overflow.
double log_upper_incomplete_gamma(double a, double x);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
/// for a > 0, x >= 0. Monotone nondecreasing in x, P(a,0) = 0.
double regularized_lower_gamma(double a, double x);

/// Tricomi confluent hypergeometric function
///   U(a, b, z) = Gamma(a)^{-1} int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt
/// restricted to integer a >= 1 (the only case the service transforms
/// need), arbitrary real b and z > 0.
double tricomi_u(int a, double b, double z);

/// log U(a, b, z); U is strictly positive on the supported domain.
double log_tricomi_u(int a, double b, double z);

/// Inverse of the Gaussian tail probability Q(x) = 0.5 erfc(x / sqrt 2).
/// Returns the x with Q(x) = eps for eps in (0, 1).
double gaussian_q_inv(double eps);

/// Gaussian tail probability Q(x).
double gaussian_q(double x);

/// Digamma function psi(x) for x > 0.
double digamma(double x);

}  // namespace snc::specfun
