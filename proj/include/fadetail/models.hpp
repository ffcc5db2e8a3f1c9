#ifndef FADETAIL_MODELS_HPP
#define FADETAIL_MODELS_HPP

#include <optional>
#include <variant>

namespace fadetail::models {

// ---------------------------------------------------------------------------
// Model catalog. Mean powers are stored where the model is defined through
// them; TwoWave/ThreeWave derive A from the specular amplitudes, the
// log-normal family derives it from (mu_dB, sigma_dB).
// ---------------------------------------------------------------------------

struct TwoWave {
    double rho1;  // specular amplitudes, > 0
    double rho2;
};

struct ThreeWave {
    double rho1;
    double rho2;
    double rho3;
};

struct Rayleigh {
    double A;  // mean power
};

struct Rician {
    double k1;  // k-factor >= 0
    double A;
};

struct Twdp {
    double k2;     // k-factor >= 0
    double delta;  // peak-to-average ratio of the two specular powers, [0,1]
    double A;
};

struct Weibull {
    double beta_w;  // shape >= 1/2
    double A;
};

struct Nakagami {
    double m;  // shape >= 1/2
    double A;
};

struct KappaMu {
    double kappa;  // >= 0
    double mu;     // > 0 (real-valued cluster count)
    double A;
};

struct KappaMuM {
    double kappa;
    double mu;
    double m;  // Nakagami shadowing shape on the specular parts, > 0
    double A;
};

struct KappaMuAlpha {
    double kappa;
    double mu;
    double alpha_ig;  // inverse-gamma shadowing shape, > 1
    double A;
};

struct Suzuki {
    double sigma_dB;  // > 0
    double mu_dB;
};

struct LogNormal {
    double sigma_dB;  // > 0
    double mu_dB;
};

struct CascadedRayleigh {
    double gamma_corr;  // power correlation between the two links, [0,1]
    double A;
};

using ChannelModel =
    std::variant<TwoWave, ThreeWave, Rayleigh, Rician, Twdp, Weibull, Nakagami,
                 KappaMu, KappaMuM, KappaMuAlpha, Suzuki, LogNormal,
                 CascadedRayleigh>;

/// Throws std::domain_error when a parameter is out of range.
void validate(const ChannelModel& model);

/// Canonical variant name used by the JSON wire format.
const char* model_name(const ChannelModel& model);

// ---------------------------------------------------------------------------
// Power-law tail eps~(P_R) = alpha_offset * (P_R / A)^beta_slope.
// ---------------------------------------------------------------------------

struct PowerLawTail {
    double alpha_offset;
    double beta_slope;
    double A;

    double eval(double P_R) const;
    double log_eval(double P_R) const;
};

struct PowerLawInfo {
    PowerLawTail law;
    // TwoWave with delta < 1: the half-slope law only applies above the
    // support edge A(1 - delta).
    bool limited_validity = false;
    double min_P_R = 0.0;
};

struct TailReport {
    double p_rel;                      // P_R / A
    std::optional<double> eps_exact;   // absent when quadrature did not settle
    double eps_tail;
    std::optional<double> phi;         // absent for models without a bound
    bool within_tolerance;
};

struct CdfResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = true;
    bool at_precision_floor = false;  // quadrature result below ~1e-13
    bool closed_form = true;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Peak-to-average ratio of the two dominant specular powers,
/// 2 r1 r2 / (r1^2 + r2^2).
double delta_ratio(double rho1, double rho2);

/// Decoding threshold for rate R (bits per channel use): 2^R - 1.
double outage_threshold(double rate);

double mean_power(const ChannelModel& model);

/// Envelope density at r >= 0; 0 outside the support.
double pdf(const ChannelModel& model, double r);

/// Outage probability F(P_R) = Pr(P < P_R). Closed form where available,
/// adaptive quadrature otherwise. Throws quad::QuadratureError (with partial
/// result) when the quadrature cannot settle.
double cdf(const ChannelModel& model, double P_R);
CdfResult cdf_detailed(const ChannelModel& model, double P_R);

/// Table of (alpha, beta, A) tail parameters; empty for models whose slope
/// varies with level (LogNormal, CascadedRayleigh) and for ThreeWave in the
/// singular configurations.
std::optional<PowerLawInfo> power_law(const ChannelModel& model);

/// Power-law tail evaluated at P_R; uses the level-dependent forms for
/// LogNormal and CascadedRayleigh.
double tail_approx(const ChannelModel& model, double P_R);

/// Expanded inverse-gamma-shadowed kappa-mu tail that keeps the
/// (c p + 1)^(alpha-1) denominator; tighter than the plain scaled tail in
/// strongly shadowed Rician regimes.
double tail_approx_kappamu_alpha_heuristic(const KappaMuAlpha& model, double P_R);

/// True when the model has a derived approximation error function phi.
bool has_phi(const ChannelModel& model);

/// Two-sided relative error bound: tail*(1-phi) <= cdf <= tail*(1+phi).
/// Only TwoWave, Rayleigh, Rician, Weibull, Nakagami and KappaMu have one.
double approx_error_phi(const ChannelModel& model, double P_R);

/// Largest P_R with phi(P_R) = eta/(1+eta): the range over which the tail
/// approximation is within relative tolerance eta.
double validity_bound(const ChannelModel& model, double eta);

/// Local log-log slope d log(tail) / d log(P_R/A).
double local_slope(const ChannelModel& model, double P_R);

/// Inverse of tail_approx: the P_R with tail_approx(P_R) = eps.
double invert_tail(const ChannelModel& model, double eps);

struct SeriesTail {
    double value;
    double remainder_bound;
};

/// Laguerre-polynomial expansion of the kappa-mu lower tail with a rigorous
/// truncation bound; n_terms = 1 reproduces tail_approx.
SeriesTail kappamu_exact_tail_series(const KappaMu& model, double P_R, int n_terms);

/// Bundle of exact, approximate and bound values at one threshold.
/// within_tolerance: phi present and phi <= eta/(1+eta).
TailReport tail_report(const ChannelModel& model, double P_R, double eta = 0.1);

}  // namespace fadetail::models

#endif
