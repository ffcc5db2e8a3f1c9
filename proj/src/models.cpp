#include "fadetail/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fadetail/quadrature.hpp"
#include "fadetail/specfun.hpp"

namespace fadetail::models {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn10 = 2.30258509299404568402;
// Lower-tail pinch point of the log-normal family in nepers.
constexpr double kLnShift = 0.223;

template <class... Ts>
struct overload : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overload(Ts...) -> overload<Ts...>;

[[noreturn]] void fail(const std::string& what) { throw std::domain_error(what); }

void check_finite(double v, const char* name) {
    if (!std::isfinite(v)) fail(std::string(name) + " must be finite");
}

void check_positive(double v, const char* name) {
    check_finite(v, name);
    if (!(v > 0.0)) fail(std::string(name) + " must be > 0");
}

double sq(double x) { return x * x; }

double logsumexp2(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// ln I_nu(x) for real order nu > -1 (the envelope densities of the kappa-mu
// family need orders in (-1, 0)). Orders below zero go through the upward
// recurrence I_nu = I_{nu+2} + 2(nu+1)/x * I_{nu+1}, all terms positive.
double log_bessel_i_real(double nu, double x) {
    if (nu >= 0.0) return sf::log_bessel_i(nu, x);
    if (!(nu > -1.0)) fail("log_bessel_i_real: order must be > -1");
    double la = sf::log_bessel_i(nu + 2.0, x);
    double lb = std::log(2.0 * (nu + 1.0) / x) + sf::log_bessel_i(nu + 1.0, x);
    return logsumexp2(la, lb);
}

// ln K_order(x), order 0 or 1; asymptotic beyond the underflow point of K.
double log_bessel_k(int order, double x) {
    if (x <= 600.0) return std::log(sf::bessel_k(order, x));
    const double mu = 4.0 * double(order) * double(order);
    const double ix = 1.0 / (8.0 * x);
    double corr = 1.0, term = 1.0;
    for (int k = 1; k <= 6; ++k) {
        term *= (mu - sq(2.0 * k - 1.0)) * ix / double(k);
        corr += term;
    }
    return -x + 0.5 * std::log(kPi / (2.0 * x)) + std::log(corr);
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// acos(1 - t) for t in [0, 2]; series keeps relative accuracy near t = 0.
double acos1m(double t) {
    if (t < 1e-4)
        return std::sqrt(2.0 * t) *
               (1.0 + t / 12.0 + 3.0 * t * t / 160.0 + 5.0 * t * t * t / 896.0);
    return std::acos(1.0 - t);
}

double db_to_neper(double v_dB) { return v_dB * kLn10 / 20.0; }

// ---------------------------------------------------------------------------
// Derived parameters
// ---------------------------------------------------------------------------

struct TwDerived {
    double A, delta, rmin2, rmax2;
};

TwDerived tw_derived(const TwoWave& m) {
    TwDerived d;
    d.A = sq(m.rho1) + sq(m.rho2);
    d.delta = 2.0 * m.rho1 * m.rho2 / d.A;
    d.rmin2 = sq(m.rho1 - m.rho2);
    d.rmax2 = sq(m.rho1 + m.rho2);
    return d;
}

struct ThreeWDerived {
    double r1, r2, r3;  // sorted descending
    double A, drho, rmin, rmax, dr2_at_0;
};

double three_w_dr2(const ThreeWDerived& d, double r) {
    return (sq(r + d.r1) - sq(d.r2 - d.r3)) * (sq(d.r2 + d.r3) - sq(r - d.r1)) /
           16.0;
}

ThreeWDerived three_w_derived(const ThreeWave& m) {
    ThreeWDerived d;
    double v[3] = {m.rho1, m.rho2, m.rho3};
    std::sort(v, v + 3, std::greater<>());
    d.r1 = v[0];
    d.r2 = v[1];
    d.r3 = v[2];
    d.A = sq(d.r1) + sq(d.r2) + sq(d.r3);
    d.drho = d.r1 - d.r2 - d.r3;
    d.rmin = std::max(d.drho, 0.0);
    d.rmax = d.r1 + d.r2 + d.r3;
    d.dr2_at_0 = three_w_dr2(d, 0.0);
    return d;
}

struct LogDerived {
    double sigma_l, mu_l, A;
};

LogDerived log_derived(double sigma_dB, double mu_dB) {
    LogDerived d;
    d.sigma_l = db_to_neper(sigma_dB);
    d.mu_l = db_to_neper(mu_dB);
    d.A = std::exp(2.0 * d.mu_l + 2.0 * d.sigma_l * d.sigma_l);
    return d;
}

double kma_c(const KappaMuAlpha& m) {
    return m.mu * (1.0 + m.kappa) / (m.alpha_ig - 1.0);
}

// ---------------------------------------------------------------------------
// Fixed-rule averages used by the models without a closed-form CDF
// ---------------------------------------------------------------------------

struct AvgResult {
    double value = 0.0;
    double abs_err = 0.0;
    bool converged = false;
};

// (1/pi) int_0^pi g(psi) dpsi by Gauss-Legendre with order doubling.
template <typename F>
AvgResult psi_average(F&& g) {
    AvgResult out;
    double prev = 0.0;
    bool have_prev = false;
    for (int n : {16, 32, 64, 128, 256}) {
        double s = 0.0;
        for (const auto& [x, w] : quad::gauss_legendre(n))
            s += w * g(0.5 * kPi * (x + 1.0));
        double val = 0.5 * s;
        if (have_prev) {
            out.abs_err = std::fabs(val - prev);
            if (out.abs_err <= std::max(1e-16, 1e-11 * std::fabs(val))) {
                out.value = val;
                out.converged = true;
                return out;
            }
        }
        prev = val;
        have_prev = true;
    }
    out.value = prev;
    return out;
}

// E_Z[g(2 mu_l + 2 sigma_l Z)], Z standard normal. Adaptive quadrature; the
// integrands of interest tilt the Gaussian by only a few units of Z, so
// |Z| <= 12 leaves less than 1e-20 outside.
template <typename F>
quad::Result shadow_expect(const LogDerived& d, F&& g) {
    const double inv_sqrt_2pi = 0.398942280401432678;
    return quad::integrate(
        [&](double z) {
            return inv_sqrt_2pi * std::exp(-0.5 * z * z) *
                   g(2.0 * d.mu_l + 2.0 * d.sigma_l * z);
        },
        -12.0, 12.0, 1e-300, 1e-12);
}

}  // namespace

// ---------------------------------------------------------------------------
// Validation, naming, basic quantities
// ---------------------------------------------------------------------------

void validate(const ChannelModel& model) {
    std::visit(
        overload{
            [](const TwoWave& m) {
                check_positive(m.rho1, "rho1");
                check_positive(m.rho2, "rho2");
            },
            [](const ThreeWave& m) {
                check_positive(m.rho1, "rho1");
                check_positive(m.rho2, "rho2");
                check_positive(m.rho3, "rho3");
            },
            [](const Rayleigh& m) { check_positive(m.A, "A"); },
            [](const Rician& m) {
                check_finite(m.k1, "k1");
                if (m.k1 < 0.0) fail("k1 must be >= 0");
                check_positive(m.A, "A");
            },
            [](const Twdp& m) {
                check_finite(m.k2, "k2");
                if (m.k2 < 0.0) fail("k2 must be >= 0");
                check_finite(m.delta, "delta");
                if (m.delta < 0.0 || m.delta > 1.0) fail("delta must be in [0, 1]");
                check_positive(m.A, "A");
            },
            [](const Weibull& m) {
                check_finite(m.beta_w, "beta_w");
                if (m.beta_w < 0.5) fail("beta_w must be >= 1/2");
                check_positive(m.A, "A");
            },
            [](const Nakagami& m) {
                check_finite(m.m, "m");
                if (m.m < 0.5) fail("m must be >= 1/2");
                check_positive(m.A, "A");
            },
            [](const KappaMu& m) {
                check_finite(m.kappa, "kappa");
                if (m.kappa < 0.0) fail("kappa must be >= 0");
                check_positive(m.mu, "mu");
                check_positive(m.A, "A");
            },
            [](const KappaMuM& m) {
                check_finite(m.kappa, "kappa");
                if (m.kappa < 0.0) fail("kappa must be >= 0");
                check_positive(m.mu, "mu");
                check_positive(m.m, "m");
                check_positive(m.A, "A");
            },
            [](const KappaMuAlpha& m) {
                check_finite(m.kappa, "kappa");
                if (m.kappa < 0.0) fail("kappa must be >= 0");
                check_positive(m.mu, "mu");
                check_finite(m.alpha_ig, "alpha_ig");
                if (!(m.alpha_ig > 1.0))
                    fail("alpha_ig must be > 1 (mean power diverges otherwise)");
                check_positive(m.A, "A");
            },
            [](const Suzuki& m) {
                check_positive(m.sigma_dB, "sigma_dB");
                check_finite(m.mu_dB, "mu_dB");
            },
            [](const LogNormal& m) {
                check_positive(m.sigma_dB, "sigma_dB");
                check_finite(m.mu_dB, "mu_dB");
            },
            [](const CascadedRayleigh& m) {
                check_finite(m.gamma_corr, "gamma_corr");
                if (m.gamma_corr < 0.0 || m.gamma_corr > 1.0)
                    fail("gamma_corr must be in [0, 1]");
                check_positive(m.A, "A");
            }},
        model);
}

const char* model_name(const ChannelModel& model) {
    return std::visit(
        overload{[](const TwoWave&) { return "TwoWave"; },
                 [](const ThreeWave&) { return "ThreeWave"; },
                 [](const Rayleigh&) { return "Rayleigh"; },
                 [](const Rician&) { return "Rician"; },
                 [](const Twdp&) { return "TWDP"; },
                 [](const Weibull&) { return "Weibull"; },
                 [](const Nakagami&) { return "Nakagami"; },
                 [](const KappaMu&) { return "KappaMu"; },
                 [](const KappaMuM&) { return "KappaMuM"; },
                 [](const KappaMuAlpha&) { return "KappaMuAlpha"; },
                 [](const Suzuki&) { return "Suzuki"; },
                 [](const LogNormal&) { return "LogNormal"; },
                 [](const CascadedRayleigh&) { return "CascadedRayleigh"; }},
        model);
}

double delta_ratio(double rho1, double rho2) {
    check_positive(rho1, "rho1");
    check_positive(rho2, "rho2");
    return std::min(1.0, 2.0 * rho1 * rho2 / (sq(rho1) + sq(rho2)));
}

double outage_threshold(double rate) {
    check_finite(rate, "rate");
    if (!(rate >= 0.0)) fail("rate must be >= 0");
    return std::expm1(rate * std::log(2.0));
}

double mean_power(const ChannelModel& model) {
    validate(model);
    return std::visit(
        overload{[](const TwoWave& m) { return sq(m.rho1) + sq(m.rho2); },
                 [](const ThreeWave& m) {
                     return sq(m.rho1) + sq(m.rho2) + sq(m.rho3);
                 },
                 [](const Rayleigh& m) { return m.A; },
                 [](const Rician& m) { return m.A; },
                 [](const Twdp& m) { return m.A; },
                 [](const Weibull& m) { return m.A; },
                 [](const Nakagami& m) { return m.A; },
                 [](const KappaMu& m) { return m.A; },
                 [](const KappaMuM& m) { return m.A; },
                 [](const KappaMuAlpha& m) { return m.A; },
                 [](const Suzuki& m) {
                     return log_derived(m.sigma_dB, m.mu_dB).A;
                 },
                 [](const LogNormal& m) {
                     return log_derived(m.sigma_dB, m.mu_dB).A;
                 },
                 [](const CascadedRayleigh& m) { return m.A; }},
        model);
}

// ---------------------------------------------------------------------------
// Envelope densities
// ---------------------------------------------------------------------------

namespace {

double pdf_rayleigh(double A, double r) {
    return (2.0 * r / A) * std::exp(-r * r / A);
}

// Rician with mean power A and k-factor k.
double pdf_rician(double A, double k, double r) {
    if (r == 0.0) return 0.0;
    double arg = 2.0 * r * std::sqrt(k * (1.0 + k) / A);
    double lf = std::log(2.0 * r * (1.0 + k) / A) - k - (1.0 + k) * r * r / A;
    if (arg > 0.0) lf += sf::log_bessel_i(0.0, arg);
    return std::exp(lf);
}

double pdf_nakagami(double m, double A, double r) {
    if (r == 0.0) return m > 0.5 ? 0.0 : std::sqrt(m / A) * 2.0 / std::sqrt(kPi);
    double lf = std::log(2.0) + m * std::log(m) - std::lgamma(m) -
                m * std::log(A) + (2.0 * m - 1.0) * std::log(r) - m * r * r / A;
    return std::exp(lf);
}

double pdf_kappamu(const KappaMu& km, double r) {
    if (km.kappa < 1e-14) return pdf_nakagami(km.mu, km.A, r);
    if (r == 0.0) {
        if (km.mu > 0.5) return 0.0;
        if (km.mu < 0.5) return std::numeric_limits<double>::infinity();
        r = 1e-150;  // finite limit; the formula below reaches it in logs
    }
    double p = r * r / km.A;
    double arg = 2.0 * km.mu * std::sqrt(km.kappa * (1.0 + km.kappa) * p);
    double lf = std::log(2.0 * r / km.A) + std::log(km.mu) +
                0.5 * (km.mu + 1.0) * std::log1p(km.kappa) -
                0.5 * (km.mu - 1.0) * std::log(km.kappa) - km.kappa * km.mu +
                0.5 * (km.mu - 1.0) * std::log(p) -
                (1.0 + km.kappa) * km.mu * p +
                log_bessel_i_real(km.mu - 1.0, arg);
    return std::exp(lf);
}

// Nakagami-shadowed kappa-mu, power density times A (argument p = P/A).
double kmm_power_density(const KappaMuM& m, double p) {
    double zeta = m.kappa * (1.0 + m.kappa) * sq(m.mu) / (m.kappa * m.mu + m.m);
    double lc = m.mu * std::log(m.mu * (1.0 + m.kappa)) +
                m.m * std::log(m.m / (m.kappa * m.mu + m.m)) - std::lgamma(m.mu);
    double lh = -(1.0 + m.kappa) * m.mu * p +
                sf::log_kummer_1f1(m.m, m.mu, zeta * p);
    return std::exp(lc + (m.mu - 1.0) * std::log(p) + lh);
}

// Inverse-gamma-shadowed kappa-mu, power density times A.
double kma_power_density(const KappaMuAlpha& m, double p) {
    double c = kma_c(m);
    double x = m.kappa * m.mu * c * p / (c * p + 1.0);
    double lc = -m.kappa * m.mu + m.mu * std::log(c) -
                log_beta(m.alpha_ig, m.mu);
    double lh = -(m.alpha_ig + m.mu) * std::log1p(c * p) +
                sf::log_kummer_1f1(m.alpha_ig + m.mu, m.mu, x);
    return std::exp(lc + (m.mu - 1.0) * std::log(p) + lh);
}

double pdf_three_wave(const ThreeWDerived& d, double r) {
    if (r <= d.rmin || r >= d.rmax) return 0.0;
    double d2 = three_w_dr2(d, r);
    double prod = d.r1 * d.r2 * d.r3 * r;
    // within rounding distance of the interior log singularity the modulus
    // saturates at 1; clamp half an ulp below so the integrable spike stays
    // finite (true height there is ~0.5 ln(16/(1-x)) times a bounded factor)
    double x = std::min(d2, prod) / std::max(d2, prod);
    if (!(x < 1.0 - 1e-16)) x = 1.0 - 1e-16;
    if (d2 <= prod)
        return std::sqrt(r / (d.r1 * d.r2 * d.r3)) / (kPi * kPi) *
               sf::elliptic_k(x);
    return r / (kPi * kPi * std::sqrt(d2)) * sf::elliptic_k(x);
}

double pdf_cascaded(const CascadedRayleigh& m, double r) {
    if (m.gamma_corr == 1.0) {
        double A1 = std::sqrt(m.A / 2.0);
        return std::exp(-r / A1) / A1;
    }
    if (r == 0.0) return 0.0;
    double s12 = std::sqrt(m.A / (4.0 * (1.0 + m.gamma_corr)));
    double rt = r / (s12 * (1.0 - m.gamma_corr));
    double sg = std::sqrt(m.gamma_corr);
    double lf = std::log(rt / s12) + log_bessel_k(0, rt);
    if (sg > 0.0) lf += sf::log_bessel_i(0.0, rt * sg);
    return std::exp(lf);
}

}  // namespace

double pdf(const ChannelModel& model, double r) {
    validate(model);
    if (!(r >= 0.0) || !std::isfinite(r)) fail("pdf: r must be finite and >= 0");
    return std::visit(
        overload{
            [&](const TwoWave& m) {
                TwDerived d = tw_derived(m);
                double r2 = r * r;
                if (r2 <= d.rmin2 || r2 >= d.rmax2) {
                    if (r2 == d.rmin2 || r2 == d.rmax2)
                        return std::numeric_limits<double>::infinity();
                    return 0.0;
                }
                return 2.0 * r / (kPi * std::sqrt((r2 - d.rmin2) * (d.rmax2 - r2)));
            },
            [&](const ThreeWave& m) { return pdf_three_wave(three_w_derived(m), r); },
            [&](const Rayleigh& m) { return pdf_rayleigh(m.A, r); },
            [&](const Rician& m) { return pdf_rician(m.A, m.k1, r); },
            [&](const Twdp& m) {
                if (r == 0.0) return 0.0;
                AvgResult a = psi_average([&](double psi) {
                    double k = m.k2 * (1.0 + m.delta * std::cos(psi));
                    double Ac = m.A * (1.0 + k) / (1.0 + m.k2);
                    return pdf_rician(Ac, k, r);
                });
                return a.value;
            },
            [&](const Weibull& m) {
                double g = std::tgamma(1.0 + 1.0 / m.beta_w);
                double tau = std::pow(m.A / g, m.beta_w);
                if (r == 0.0) return m.beta_w > 0.5 ? 0.0 : 1.0 / tau;
                double lf = std::log(2.0 * m.beta_w / tau) +
                            (2.0 * m.beta_w - 1.0) * std::log(r) -
                            std::pow(r * r, m.beta_w) / tau;
                return std::exp(lf);
            },
            [&](const Nakagami& m) { return pdf_nakagami(m.m, m.A, r); },
            [&](const KappaMu& m) { return pdf_kappamu(m, r); },
            [&](const KappaMuM& m) {
                double rr = r;
                if (rr == 0.0) {
                    if (m.mu > 0.5) return 0.0;
                    if (m.mu < 0.5) return std::numeric_limits<double>::infinity();
                    rr = 1e-150;
                }
                return 2.0 * rr / m.A * kmm_power_density(m, rr * rr / m.A);
            },
            [&](const KappaMuAlpha& m) {
                double rr = r;
                if (rr == 0.0) {
                    if (m.mu > 0.5) return 0.0;
                    if (m.mu < 0.5) return std::numeric_limits<double>::infinity();
                    rr = 1e-150;
                }
                return 2.0 * rr / m.A * kma_power_density(m, rr * rr / m.A);
            },
            [&](const Suzuki& m) {
                if (r == 0.0) return 0.0;
                LogDerived d = log_derived(m.sigma_dB, m.mu_dB);
                quad::Result q = shadow_expect(d, [&](double la) {
                    return std::exp(-la - r * r * std::exp(-la));
                });
                return 2.0 * r * q.value;
            },
            [&](const LogNormal& m) {
                if (r == 0.0) return 0.0;
                LogDerived d = log_derived(m.sigma_dB, m.mu_dB);
                double z = (std::log(r) - d.mu_l) / d.sigma_l;
                return std::exp(-0.5 * z * z) /
                       (r * d.sigma_l * std::sqrt(2.0 * kPi));
            },
            [&](const CascadedRayleigh& m) { return pdf_cascaded(m, r); }},
        model);
}

// ---------------------------------------------------------------------------
// CDF
// ---------------------------------------------------------------------------

namespace {

CdfResult closed(double v) {
    CdfResult r;
    r.value = v;
    r.abs_error = 4e-16 * std::fabs(v);
    return r;
}

CdfResult from_quad(const quad::Result& q, double scale = 1.0) {
    CdfResult r;
    r.value = q.value * scale;
    r.abs_error = q.abs_error * scale;
    r.converged = q.converged;
    r.closed_form = false;
    r.at_precision_floor = r.value < 1e-13;
    return r;
}

CdfResult from_avg(const AvgResult& a) {
    CdfResult r;
    r.value = a.value;
    r.abs_error = a.abs_err;
    r.converged = a.converged;
    r.closed_form = false;
    r.at_precision_floor = r.value < 1e-13;
    return r;
}

CdfResult cdf_two_wave(const TwoWave& m, double P_R) {
    TwDerived d = tw_derived(m);
    if (P_R <= d.rmin2) return closed(0.0);
    if (P_R >= d.rmax2) return closed(1.0);
    double t = (P_R - d.rmin2) / (2.0 * m.rho1 * m.rho2);
    return closed(acos1m(t) / kPi);
}

CdfResult cdf_three_wave(const ThreeWave& m, double P_R) {
    ThreeWDerived d = three_w_derived(m);
    double R = std::sqrt(P_R);
    if (R <= d.rmin) return closed(0.0);
    if (R >= d.rmax) return closed(1.0);

    // Split at the log singularities of the density: the roots of
    // Delta_r^2(r) = rho1 rho2 rho3 r inside (rmin, R).
    auto s = [&](double r) { return three_w_dr2(d, r) - d.r1 * d.r2 * d.r3 * r; };
    std::vector<double> cuts;
    cuts.push_back(d.rmin);
    const int n_scan = 400;
    double prev_r = d.rmin, prev_s = s(d.rmin);
    for (int i = 1; i <= n_scan; ++i) {
        double r = d.rmin + (R - d.rmin) * double(i) / double(n_scan);
        double sr = s(r);
        if ((prev_s < 0.0) != (sr < 0.0)) {
            double lo = prev_r, hi = r;
            for (int it = 0; it < 100; ++it) {
                double mid = 0.5 * (lo + hi);
                if ((s(mid) < 0.0) == (prev_s < 0.0))
                    lo = mid;
                else
                    hi = mid;
            }
            cuts.push_back(0.5 * (lo + hi));
        }
        prev_r = r;
        prev_s = sr;
    }
    cuts.push_back(R);

    auto f = [&](double r) { return pdf_three_wave(d, r); };
    CdfResult out;
    out.closed_form = false;
    out.converged = true;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        quad::Result q = quad::integrate(f, cuts[i], cuts[i + 1], 1e-18, 1e-11);
        out.value += q.value;
        out.abs_error += q.abs_error;
        out.converged = out.converged && q.converged;
    }
    out.at_precision_floor = out.value < 1e-13;
    return out;
}

CdfResult cdf_twdp(const Twdp& m, double P_R) {
    double b = std::sqrt(2.0 * P_R * (1.0 + m.k2) / m.A);
    AvgResult a = psi_average([&](double psi) {
        double k = m.k2 * (1.0 + m.delta * std::cos(psi));
        return sf::marcum_q_complement(1.0, std::sqrt(2.0 * k), b);
    });
    return from_avg(a);
}

// Shared by the Nakagami- and inverse-gamma-shadowed kappa-mu variants:
// integrate C p^(mu-1) h(p) over (0, p_R) after u = p^mu, which removes the
// endpoint power singularity.
template <typename H>
CdfResult cdf_power_weighted(double mu, double log_C, H&& h, double p_R) {
    double log_uR = mu * std::log(p_R);
    if (log_uR < -700.0) {
        // Below double underflow once the prefactor is applied; the tail
        // approximation limit h(0) = 1 is exact to machine precision here.
        CdfResult r;
        r.value = std::exp(log_C + log_uR - std::log(mu));
        r.abs_error = r.value * 1e-14;
        r.closed_form = false;
        r.at_precision_floor = true;
        return r;
    }
    if (log_uR > 690.0) {
        // p_R^mu overflows. With mu < 1 the survival is below double
        // precision at such thresholds; with mu >= 1 the integrand has no
        // endpoint singularity, so integrate in p directly.
        if (mu < 1.0) return closed(1.0);
        auto g = [&](double pp) {
            if (pp == 0.0) return mu == 1.0 ? std::exp(log_C) * h(0.0) : 0.0;
            return std::exp(log_C + (mu - 1.0) * std::log(pp)) * h(pp);
        };
        return from_quad(quad::integrate(g, 0.0, p_R, 1e-300, 1e-11));
    }
    double uR = std::exp(log_uR);
    auto H_u = [&](double u) { return h(std::pow(u, 1.0 / mu)); };
    quad::Result q = quad::integrate(H_u, 0.0, uR, uR * 1e-16, 1e-11);
    return from_quad(q, std::exp(log_C) / mu);
}

CdfResult cdf_kappamu_m(const KappaMuM& m, double p) {
    double zeta = m.kappa * (1.0 + m.kappa) * sq(m.mu) / (m.kappa * m.mu + m.m);
    double log_C = m.mu * std::log(m.mu * (1.0 + m.kappa)) +
                   m.m * std::log(m.m / (m.kappa * m.mu + m.m)) -
                   std::lgamma(m.mu);
    auto h = [&](double pp) {
        return std::exp(-(1.0 + m.kappa) * m.mu * pp +
                        sf::log_kummer_1f1(m.m, m.mu, zeta * pp));
    };
    return cdf_power_weighted(m.mu, log_C, h, p);
}

CdfResult cdf_kappamu_alpha(const KappaMuAlpha& m, double p) {
    double c = kma_c(m);
    double log_C = -m.kappa * m.mu + m.mu * std::log(c) -
                   log_beta(m.alpha_ig, m.mu);
    auto h = [&](double pp) {
        double x = m.kappa * m.mu * c * pp / (c * pp + 1.0);
        return std::exp(-(m.alpha_ig + m.mu) * std::log1p(c * pp) +
                        sf::log_kummer_1f1(m.alpha_ig + m.mu, m.mu, x));
    };
    return cdf_power_weighted(m.mu, log_C, h, p);
}

CdfResult cdf_suzuki(const Suzuki& m, double P_R) {
    LogDerived d = log_derived(m.sigma_dB, m.mu_dB);
    quad::Result q = shadow_expect(
        d, [&](double la) { return -std::expm1(-P_R * std::exp(-la)); });
    return from_quad(q);
}

CdfResult cdf_log_normal(const LogNormal& m, double P_R) {
    LogDerived d = log_derived(m.sigma_dB, m.mu_dB);
    double y = (d.mu_l - 0.5 * std::log(P_R)) / (std::sqrt(2.0) * d.sigma_l);
    if (y > 7.0) return closed(0.5 * std::exp(sf::log_erfc(y)));
    return closed(0.5 * sf::erfc(y));
}

CdfResult cdf_cascaded(const CascadedRayleigh& m, double P_R) {
    if (m.gamma_corr == 1.0)
        return closed(-std::expm1(-std::sqrt(2.0 * P_R / m.A)));
    double s12 = std::sqrt(m.A / (4.0 * (1.0 + m.gamma_corr)));
    double R = std::sqrt(P_R);
    double rt = R / (s12 * (1.0 - m.gamma_corr));
    if (rt < 0.5) {
        // The closed form is 1 minus a bracket that is ~1 here; integrating
        // the density keeps full relative accuracy in the deep tail.
        quad::Result q = quad::integrate([&](double r) { return pdf_cascaded(m, r); },
                                         0.0, R, 1e-300, 1e-12);
        return from_quad(q);
    }
    double sg = std::sqrt(m.gamma_corr);
    double l2 = std::log(rt) + log_bessel_i_real(0.0, rt * sg) + log_bessel_k(1, rt);
    double lsum = l2;
    if (sg > 0.0) {
        double l1 = std::log(rt) + std::log(sg) +
                    sf::log_bessel_i(1.0, rt * sg) + log_bessel_k(0, rt);
        lsum = logsumexp2(l1, l2);
    }
    return closed(1.0 - std::exp(lsum));
}

}  // namespace

CdfResult cdf_detailed(const ChannelModel& model, double P_R) {
    validate(model);
    if (!(P_R >= 0.0) || !std::isfinite(P_R))
        fail("cdf: P_R must be finite and >= 0");
    if (P_R == 0.0) return closed(0.0);
    return std::visit(
        overload{
            [&](const TwoWave& m) { return cdf_two_wave(m, P_R); },
            [&](const ThreeWave& m) { return cdf_three_wave(m, P_R); },
            [&](const Rayleigh& m) { return closed(-std::expm1(-P_R / m.A)); },
            [&](const Rician& m) {
                return closed(sf::marcum_q_complement(
                    1.0, std::sqrt(2.0 * m.k1),
                    std::sqrt(2.0 * (1.0 + m.k1) * P_R / m.A)));
            },
            [&](const Twdp& m) { return cdf_twdp(m, P_R); },
            [&](const Weibull& m) {
                double g = std::tgamma(1.0 + 1.0 / m.beta_w);
                return closed(-std::expm1(-std::pow(g * P_R / m.A, m.beta_w)));
            },
            [&](const Nakagami& m) {
                return closed(sf::reg_lower_gamma(m.m, m.m * P_R / m.A));
            },
            [&](const KappaMu& m) {
                return closed(sf::marcum_q_complement(
                    m.mu, std::sqrt(2.0 * m.kappa * m.mu),
                    std::sqrt(2.0 * (1.0 + m.kappa) * m.mu * P_R / m.A)));
            },
            [&](const KappaMuM& m) { return cdf_kappamu_m(m, P_R / m.A); },
            [&](const KappaMuAlpha& m) { return cdf_kappamu_alpha(m, P_R / m.A); },
            [&](const Suzuki& m) { return cdf_suzuki(m, P_R); },
            [&](const LogNormal& m) { return cdf_log_normal(m, P_R); },
            [&](const CascadedRayleigh& m) { return cdf_cascaded(m, P_R); }},
        model);
}

double cdf(const ChannelModel& model, double P_R) {
    CdfResult r = cdf_detailed(model, P_R);
    if (!r.converged)
        throw quad::QuadratureError("cdf: quadrature did not settle", r.value,
                                    r.abs_error);
    return r.value;
}

// ---------------------------------------------------------------------------
// Power-law tails
// ---------------------------------------------------------------------------

double PowerLawTail::log_eval(double P_R) const {
    return std::log(alpha_offset) + beta_slope * std::log(P_R / A);
}

double PowerLawTail::eval(double P_R) const { return std::exp(log_eval(P_R)); }

namespace {

// ln(alpha) for the models with a fixed-slope tail; keeps alpha usable even
// when e.g. exp(-kappa*mu) underflows.
double log_alpha_kappamu(double kappa, double mu) {
    return mu * (std::log(mu) + std::log1p(kappa)) - kappa * mu -
           std::lgamma(mu + 1.0);
}

struct LawParts {
    double log_alpha;
    double beta;
    double A;
};

std::optional<LawParts> law_parts(const ChannelModel& model) {
    return std::visit(
        overload{
            [](const TwoWave& m) -> std::optional<LawParts> {
                TwDerived d = tw_derived(m);
                return LawParts{0.5 * std::log(2.0) - std::log(kPi), 0.5, d.A};
            },
            [](const ThreeWave& m) -> std::optional<LawParts> {
                ThreeWDerived d = three_w_derived(m);
                if (!(d.drho < 0.0)) return std::nullopt;
                double dr0 = std::sqrt(d.dr2_at_0);
                return LawParts{std::log(d.A / (4.0 * kPi * dr0)), 1.0, d.A};
            },
            [](const Rayleigh& m) -> std::optional<LawParts> {
                return LawParts{0.0, 1.0, m.A};
            },
            [](const Rician& m) -> std::optional<LawParts> {
                return LawParts{std::log1p(m.k1) - m.k1, 1.0, m.A};
            },
            [](const Twdp& m) -> std::optional<LawParts> {
                double la = std::log1p(m.k2) - m.k2;
                if (m.k2 * m.delta > 0.0)
                    la += sf::log_bessel_i(0.0, m.k2 * m.delta);
                return LawParts{la, 1.0, m.A};
            },
            [](const Weibull& m) -> std::optional<LawParts> {
                double g = std::tgamma(1.0 + 1.0 / m.beta_w);
                return LawParts{m.beta_w * std::log(g), m.beta_w, m.A};
            },
            [](const Nakagami& m) -> std::optional<LawParts> {
                return LawParts{m.m * std::log(m.m) - std::lgamma(m.m + 1.0),
                                m.m, m.A};
            },
            [](const KappaMu& m) -> std::optional<LawParts> {
                return LawParts{log_alpha_kappamu(m.kappa, m.mu), m.mu, m.A};
            },
            [](const KappaMuM& m) -> std::optional<LawParts> {
                double la = m.mu * std::log(m.mu * (1.0 + m.kappa)) +
                            m.m * std::log(m.m / (m.kappa * m.mu + m.m)) -
                            std::lgamma(m.mu + 1.0);
                return LawParts{la, m.mu, m.A};
            },
            [](const KappaMuAlpha& m) -> std::optional<LawParts> {
                double la = -m.kappa * m.mu + m.mu * std::log(kma_c(m)) -
                            std::log(m.mu) - log_beta(m.alpha_ig, m.mu);
                return LawParts{la, m.mu, m.A};
            },
            [](const Suzuki& m) -> std::optional<LawParts> {
                LogDerived d = log_derived(m.sigma_dB, m.mu_dB);
                return LawParts{4.0 * sq(d.sigma_l), 1.0, d.A};
            },
            [](const LogNormal&) -> std::optional<LawParts> { return std::nullopt; },
            [](const CascadedRayleigh&) -> std::optional<LawParts> {
                return std::nullopt;
            }},
        model);
}

}  // namespace

std::optional<PowerLawInfo> power_law(const ChannelModel& model) {
    validate(model);
    auto parts = law_parts(model);
    if (!parts) return std::nullopt;
    PowerLawInfo info;
    info.law = {std::exp(parts->log_alpha), parts->beta, parts->A};
    if (const auto* tw = std::get_if<TwoWave>(&model)) {
        TwDerived d = tw_derived(*tw);
        if (d.delta < 1.0) {
            info.limited_validity = true;
            info.min_P_R = d.rmin2;
        }
    }
    return info;
}

double tail_approx(const ChannelModel& model, double P_R) {
    validate(model);
    if (!(P_R >= 0.0) || !std::isfinite(P_R))
        fail("tail_approx: P_R must be finite and >= 0");
    if (const auto* tw = std::get_if<TwoWave>(&model)) {
        TwDerived d = tw_derived(*tw);
        if (P_R < d.rmin2)
            fail("tail_approx: P_R below the support edge A(1 - delta)");
        double p_star = (P_R - d.rmin2) / (d.delta * d.A);
        return std::sqrt(2.0 * p_star) / kPi;
    }
    if (const auto* w3 = std::get_if<ThreeWave>(&model)) {
        ThreeWDerived d = three_w_derived(*w3);
        if (!(d.drho < 0.0))
            fail("tail_approx: ThreeWave tail is only linear for rho1 < rho2 + rho3");
        return P_R / (4.0 * kPi * std::sqrt(d.dr2_at_0));
    }
    if (const auto* ln = std::get_if<LogNormal>(&model)) {
        if (P_R == 0.0) return 0.0;
        LogDerived d = log_derived(ln->sigma_dB, ln->mu_dB);
        double z = 0.5 * std::log(P_R) - kLnShift * d.sigma_l - d.mu_l;
        return 0.25 * std::exp(-z * z / (2.0 * sq(d.sigma_l)));
    }
    if (const auto* cas = std::get_if<CascadedRayleigh>(&model)) {
        if (P_R == 0.0) return 0.0;
        double G = cas->gamma_corr;
        double p = P_R / cas->A;
        if (G == 1.0) return std::sqrt(2.0 * p);
        double u = p * (1.0 + G) / sq(1.0 - G);
        if (u >= 1.0)
            fail("tail_approx: P_R beyond the logarithmic tail regime");
        return -p * (1.0 + G) / (1.0 - G) * std::log(u);
    }
    auto parts = law_parts(model);
    if (P_R == 0.0) return 0.0;
    double A = mean_power(model);
    return std::exp(parts->log_alpha + parts->beta * std::log(P_R / A));
}

double tail_approx_kappamu_alpha_heuristic(const KappaMuAlpha& model, double P_R) {
    validate(ChannelModel(model));
    if (!(P_R >= 0.0) || !std::isfinite(P_R))
        fail("tail_approx_kappamu_alpha_heuristic: P_R must be finite and >= 0");
    if (P_R == 0.0) return 0.0;
    double p = P_R / model.A;
    double c = kma_c(model);
    double w = c * p / (c * p + 1.0);
    double lv = -model.kappa * model.mu - std::log(model.mu) -
                log_beta(model.alpha_ig, model.mu) -
                (model.alpha_ig - 1.0) * std::log1p(c * p) +
                model.mu * std::log(w) +
                sf::log_kummer_1f1(model.alpha_ig + model.mu, model.mu + 1.0,
                                   model.kappa * model.mu * w);
    return std::exp(lv);
}

// ---------------------------------------------------------------------------
// Approximation error bounds
// ---------------------------------------------------------------------------

bool has_phi(const ChannelModel& model) {
    return std::holds_alternative<TwoWave>(model) ||
           std::holds_alternative<Rayleigh>(model) ||
           std::holds_alternative<Rician>(model) ||
           std::holds_alternative<Weibull>(model) ||
           std::holds_alternative<Nakagami>(model) ||
           std::holds_alternative<KappaMu>(model);
}

namespace {

// Relative error bound of the two-wave tail in the scaled excess threshold
// t = P*/A, from the Taylor remainder of acos(1 - t) around 0.
double phi_two_wave_t(double t) {
    return std::sqrt(2.0) / 3.0 * (1.0 + t) * t * std::pow(2.0 - t, -2.5);
}

double phi_kappamu(double kappa, double mu, double p) {
    return std::exp(0.5 * kappa * mu) * std::expm1((kappa + 1.0) * mu * p);
}

}  // namespace

double approx_error_phi(const ChannelModel& model, double P_R) {
    validate(model);
    if (!(P_R >= 0.0) || !std::isfinite(P_R))
        fail("approx_error_phi: P_R must be finite and >= 0");
    double p = P_R / mean_power(model);
    return std::visit(
        overload{
            [&](const TwoWave& m) {
                TwDerived d = tw_derived(m);
                if (P_R < d.rmin2)
                    fail("approx_error_phi: P_R below the support edge");
                return phi_two_wave_t((P_R - d.rmin2) / (d.delta * d.A));
            },
            [&](const Rayleigh&) { return 0.5 * p; },
            [&](const Rician& m) { return phi_kappamu(m.k1, 1.0, p); },
            [&](const Weibull& m) {
                double g = std::tgamma(1.0 + 1.0 / m.beta_w);
                double w = std::pow(g * p, m.beta_w);
                return w / (1.0 + w);
            },
            [&](const Nakagami& m) { return -std::expm1(-m.m * p); },
            [&](const KappaMu& m) { return phi_kappamu(m.kappa, m.mu, p); },
            [&](const auto& m) -> double {
                fail(std::string("approx_error_phi: no error bound for ") +
                     model_name(ChannelModel(m)));
            }},
        model);
}

double validity_bound(const ChannelModel& model, double eta) {
    validate(model);
    if (!(eta > 0.0) || !std::isfinite(eta)) fail("validity_bound: eta must be > 0");
    double q = eta / (1.0 + eta);
    return std::visit(
        overload{
            [&](const TwoWave& m) {
                TwDerived d = tw_derived(m);
                double lo = 0.0, hi = 2.0 - 1e-12;
                for (int it = 0; it < 200; ++it) {
                    double mid = 0.5 * (lo + hi);
                    (phi_two_wave_t(mid) < q ? lo : hi) = mid;
                }
                return d.A * (d.delta * 0.5 * (lo + hi) + (1.0 - d.delta));
            },
            [&](const Rayleigh& m) { return 2.0 * m.A * q; },
            [&](const Rician& m) {
                return m.A * std::log1p(q * std::exp(-0.5 * m.k1)) / (1.0 + m.k1);
            },
            [&](const Weibull& m) {
                double g = std::tgamma(1.0 + 1.0 / m.beta_w);
                return m.A * std::pow(q / (1.0 - q), 1.0 / m.beta_w) / g;
            },
            [&](const Nakagami& m) { return -m.A * std::log1p(-q) / m.m; },
            [&](const KappaMu& m) {
                return m.A * std::log1p(q * std::exp(-0.5 * m.kappa * m.mu)) /
                       ((m.kappa + 1.0) * m.mu);
            },
            [&](const auto& m) -> double {
                fail(std::string("validity_bound: no error bound for ") +
                     model_name(ChannelModel(m)));
            }},
        model);
}

// ---------------------------------------------------------------------------
// Slopes and inversion
// ---------------------------------------------------------------------------

double local_slope(const ChannelModel& model, double P_R) {
    validate(model);
    if (const auto* w3 = std::get_if<ThreeWave>(&model)) {
        ThreeWDerived d = three_w_derived(*w3);
        if (d.drho < 0.0) return 1.0;
        if (d.drho == 0.0) return 0.75;
        return 0.5;
    }
    if (const auto* ln = std::get_if<LogNormal>(&model)) {
        check_positive(P_R, "P_R");
        double P_dB = 10.0 * std::log10(P_R);
        return (10.0 / kLn10) *
               (kLnShift / ln->sigma_dB + (ln->mu_dB - P_dB) / sq(ln->sigma_dB));
    }
    if (const auto* cas = std::get_if<CascadedRayleigh>(&model)) {
        check_positive(P_R, "P_R");
        double G = cas->gamma_corr;
        if (G == 1.0) return 0.5;
        double u = P_R / cas->A * (1.0 + G) / sq(1.0 - G);
        if (u >= 1.0) fail("local_slope: P_R beyond the logarithmic tail regime");
        return 1.0 + 1.0 / std::log(u);
    }
    auto parts = law_parts(model);
    return parts->beta;
}

double invert_tail(const ChannelModel& model, double eps) {
    validate(model);
    if (!(eps > 0.0) || !(eps < 1.0) || !std::isfinite(eps))
        fail("invert_tail: eps must be in (0, 1)");
    if (const auto* tw = std::get_if<TwoWave>(&model)) {
        TwDerived d = tw_derived(*tw);
        double p_star = 0.5 * sq(kPi * eps);
        if (p_star >= 2.0)
            fail("invert_tail: eps beyond the two-wave support (needs eps < 2/pi)");
        return d.A * (d.delta * p_star) + d.rmin2;
    }
    if (const auto* w3 = std::get_if<ThreeWave>(&model)) {
        ThreeWDerived d = three_w_derived(*w3);
        if (!(d.drho < 0.0))
            fail("invert_tail: ThreeWave tail is only linear for rho1 < rho2 + rho3");
        return 4.0 * kPi * std::sqrt(d.dr2_at_0) * eps;
    }
    if (const auto* ln = std::get_if<LogNormal>(&model)) {
        if (eps >= 0.25) fail("invert_tail: LogNormal tail needs eps < 1/4");
        LogDerived d = log_derived(ln->sigma_dB, ln->mu_dB);
        double root = std::sqrt(std::log(1.0 / (4.0 * eps)));
        return std::exp(2.0 * (kLnShift * d.sigma_l + d.mu_l -
                               std::sqrt(2.0) * d.sigma_l * root));
    }
    if (const auto* cas = std::get_if<CascadedRayleigh>(&model)) {
        double G = cas->gamma_corr;
        if (G == 1.0) return cas->A * eps * eps / 2.0;
        double z = -eps / (1.0 - G);
        if (z < -std::exp(-1.0))
            fail("invert_tail: eps beyond the cascaded tail regime "
                 "(needs eps <= (1 - gamma_corr)/e)");
        double w = sf::lambert_w(sf::WBranch::lower, z);
        return -cas->A * eps * (1.0 - G) / ((1.0 + G) * w);
    }
    auto parts = law_parts(model);
    double A = mean_power(model);
    return A * std::exp((std::log(eps) - parts->log_alpha) / parts->beta);
}

// ---------------------------------------------------------------------------
// Exact kappa-mu tail series
// ---------------------------------------------------------------------------

SeriesTail kappamu_exact_tail_series(const KappaMu& model, double P_R, int n_terms) {
    validate(ChannelModel(model));
    if (!(P_R >= 0.0) || !std::isfinite(P_R))
        fail("kappamu_exact_tail_series: P_R must be finite and >= 0");
    if (n_terms < 1) fail("kappamu_exact_tail_series: n_terms must be >= 1");
    const double km = model.kappa * model.mu;
    const double z = (1.0 + model.kappa) * model.mu * P_R / model.A;
    SeriesTail out{0.0, 0.0};
    if (P_R == 0.0) return out;
    const double lz = std::log(z);
    for (int n = 0; n < n_terms; ++n) {
        double ln_mag = -km + (double(n) + model.mu) * lz -
                        std::lgamma(model.mu + double(n) + 1.0);
        double lag = sf::gen_laguerre(n, model.mu - 1.0, km);
        double term = std::exp(ln_mag) * lag;
        out.value += (n % 2 == 0) ? term : -term;
    }
    // |L_n^(mu-1)(km)| <= Gamma(mu+n)/(n! Gamma(mu)) e^(km/2) turns the
    // discarded part into a scaled upper Poisson tail.
    double pre = std::exp(-0.5 * km + model.mu * lz - std::lgamma(model.mu + 1.0));
    double t = std::exp(double(n_terms) * lz - std::lgamma(double(n_terms) + 1.0));
    double rem = 0.0;
    for (int n = n_terms; n < n_terms + 100000; ++n) {
        rem += t;
        t *= z / double(n + 1);
        if (t < rem * 1e-17) break;
    }
    out.remainder_bound = pre * rem;
    return out;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

TailReport tail_report(const ChannelModel& model, double P_R, double eta) {
    validate(model);
    TailReport rep;
    rep.p_rel = P_R / mean_power(model);
    CdfResult c = cdf_detailed(model, P_R);
    if (c.converged) rep.eps_exact = c.value;
    rep.eps_tail = tail_approx(model, P_R);
    if (has_phi(model)) rep.phi = approx_error_phi(model, P_R);
    rep.within_tolerance = rep.phi.has_value() && *rep.phi <= eta / (1.0 + eta);
    return rep;
}

}  // namespace fadetail::models
