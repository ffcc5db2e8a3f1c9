#ifndef FADETAIL_SPECFUN_HPP
#define FADETAIL_SPECFUN_HPP

/// Special-function kernel used by the channel-model catalog.
///
/// Everything here is pure and reentrant: same inputs give bit-identical
/// outputs, no shared mutable state. Functions that can underflow in the
/// URLLC regime (probabilities around 1e-12 and below) have a log-domain
/// twin (log_bessel_i, log_kummer_1f1, log_erfc).

namespace fadetail::sf {

/// Branch selector for the real Lambert W function.
/// The lower branch is only defined on [-1/e, 0).
enum class WBranch { principal, lower };

/// Modified Bessel function of the first kind, real order >= 0.
double bessel_i(double order, double x);

/// ln I_order(x); usable where I overflows (x beyond ~700).
double log_bessel_i(double order, double x);

/// Modified Bessel function of the second kind, integer order 0 or 1, x > 0.
double bessel_k(int order, double x);

/// Generalized Marcum Q-function Q_order(a, b), order > 0, a,b >= 0.
/// Computed through the canonical Poisson-mixture series in whichever of
/// {Q, 1-Q} is smaller, so both tails keep full relative accuracy.
double marcum_q(double order, double a, double b);

/// 1 - Q_order(a, b), the lower tail, computed directly (never as 1 - Q).
/// Accurate to relative ~1e-13 down to values near the double underflow.
double marcum_q_complement(double order, double a, double b);

/// Regularized lower incomplete gamma P(a, x) = gamma(a,x)/Gamma(a), a > 0.
double reg_lower_gamma(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double reg_upper_gamma(double a, double x);

/// Kummer confluent hypergeometric 1F1(a; b; x).
double kummer_1f1(double a, double b, double x);

/// ln 1F1(a; b; x) for a > 0, b > 0 (positive-term series, no cancellation).
double log_kummer_1f1(double a, double b, double x);

/// Complete elliptic integral of the first kind in the parameter-m
/// convention: K(m) = int_0^{pi/2} (1 - m sin^2 t)^{-1/2} dt, 0 <= m < 1.
/// Note: parameter m = k^2, not the modulus k.
double elliptic_k(double m);

/// Real Lambert W. principal: x >= -1/e. lower: -1/e <= x < 0, result <= -1.
double lambert_w(WBranch branch, double x);

/// Complementary error function.
double erfc(double x);

/// ln erfc(x), valid deep into the tail where erfc underflows.
double log_erfc(double x);

/// Generalized Laguerre polynomial L_n^{(order)}(x), order > -1,
/// by the stable three-term recurrence.
double gen_laguerre(int n, double order, double x);

}  // namespace fadetail::sf

#endif
