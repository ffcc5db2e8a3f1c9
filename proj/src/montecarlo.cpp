#include "fadetail/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "fadetail/specfun.hpp"

namespace fadetail::mc {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t chunk, std::uint64_t branch) {
    std::uint64_t x = seed;
    (void)splitmix64(x);
    x ^= splitmix64(chunk += 0x632BE59BD9B4E019ull);
    x ^= splitmix64(branch += 0xD1B54A32D192ED03ull);
    for (auto& s : s_) s = splitmix64(x);
}

std::uint64_t Stream::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Stream::uniform() {
    // Strictly inside (0, 1): cell midpoints of a 2^53 grid.
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::uniform_angle() { return kTwoPi * double(next_u64() >> 11) * 0x1.0p-53; }

double Stream::normal() {
    if (have_cached_) {
        have_cached_ = false;
        return cached_normal_;
    }
    for (;;) {
        double u = 2.0 * uniform() - 1.0;
        double v = 2.0 * uniform() - 1.0;
        double s = u * u + v * v;
        if (s >= 1.0 || s == 0.0) continue;
        double f = std::sqrt(-2.0 * std::log(s) / s);
        cached_normal_ = v * f;
        have_cached_ = true;
        return u * f;
    }
}

double Stream::exponential() { return -std::log(uniform()); }

double Stream::gamma(double shape) {
    if (!(shape > 0.0)) throw std::domain_error("Stream::gamma: shape must be > 0");
    if (shape < 1.0) {
        // Boost trick: Gamma(a) = Gamma(a+1) * U^(1/a).
        return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t Stream::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::domain_error("Stream::poisson: mean must be >= 0");
    // Arrival counting: number of unit-rate arrivals before time `mean`.
    std::uint64_t k = 0;
    double t = exponential();
    while (t < mean) {
        ++k;
        t += exponential();
    }
    return k;
}

// ---------------------------------------------------------------------------
// Per-model draws
// ---------------------------------------------------------------------------

namespace {

double specular_sum_power(Stream& st, const double* rho, int m) {
    double x = 0.0, y = 0.0;
    for (int i = 0; i < m; ++i) {
        double phi = st.uniform_angle();
        x += rho[i] * std::cos(phi);
        y += rho[i] * std::sin(phi);
    }
    return x * x + y * y;
}

// kappa-mu power with mean A: scaled noncentral chi-square through its
// Poisson mixture, valid for real mu.
double kappamu_power(Stream& st, double kappa, double mu, double A) {
    std::uint64_t k = kappa > 0.0 ? st.poisson(kappa * mu) : 0;
    return A / (mu * (1.0 + kappa)) * st.gamma(mu + double(k));
}

double log_params_power(Stream& st, double sigma_dB, double mu_dB, bool rayleigh) {
    const double q = std::log(10.0) / 20.0;
    double omega = std::exp(2.0 * mu_dB * q + 2.0 * sigma_dB * q * st.normal());
    return rayleigh ? omega * st.exponential() : omega;
}

}  // namespace

double sample_power(const models::ChannelModel& model, Stream& st) {
    using namespace models;
    return std::visit(
        [&st](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TwoWave>) {
                double rho[2] = {m.rho1, m.rho2};
                return specular_sum_power(st, rho, 2);
            } else if constexpr (std::is_same_v<T, ThreeWave>) {
                double rho[3] = {m.rho1, m.rho2, m.rho3};
                return specular_sum_power(st, rho, 3);
            } else if constexpr (std::is_same_v<T, Rayleigh>) {
                return m.A * st.exponential();
            } else if constexpr (std::is_same_v<T, Rician>) {
                double sigma = std::sqrt(m.A / (2.0 * (1.0 + m.k1)));
                double rho = std::sqrt(m.k1 * m.A / (1.0 + m.k1));
                double phi = st.uniform_angle();
                double x = rho * std::cos(phi) + sigma * st.normal();
                double y = rho * std::sin(phi) + sigma * st.normal();
                return x * x + y * y;
            } else if constexpr (std::is_same_v<T, Twdp>) {
                double two_sigma2 = m.A / (1.0 + m.k2);
                double root = std::sqrt(std::max(0.0, 1.0 - m.delta * m.delta));
                double rho[2] = {
                    std::sqrt(0.5 * m.k2 * two_sigma2 * (1.0 + root)),
                    std::sqrt(0.5 * m.k2 * two_sigma2 * (1.0 - root))};
                double x = 0.0, y = 0.0;
                for (double r : rho) {
                    double phi = st.uniform_angle();
                    x += r * std::cos(phi);
                    y += r * std::sin(phi);
                }
                double sigma = std::sqrt(0.5 * two_sigma2);
                x += sigma * st.normal();
                y += sigma * st.normal();
                return x * x + y * y;
            } else if constexpr (std::is_same_v<T, Weibull>) {
                double g = std::tgamma(1.0 + 1.0 / m.beta_w);
                return m.A / g * std::pow(st.exponential(), 1.0 / m.beta_w);
            } else if constexpr (std::is_same_v<T, Nakagami>) {
                return m.A / m.m * st.gamma(m.m);
            } else if constexpr (std::is_same_v<T, KappaMu>) {
                return kappamu_power(st, m.kappa, m.mu, m.A);
            } else if constexpr (std::is_same_v<T, KappaMuM>) {
                // Power-normalized Nakagami-m shadowing of the specular parts
                // scales the Poisson noncentrality.
                double xi2 = st.gamma(m.m) / m.m;
                std::uint64_t k =
                    m.kappa > 0.0 ? st.poisson(m.kappa * m.mu * xi2) : 0;
                return m.A / (m.mu * (1.0 + m.kappa)) * st.gamma(m.mu + double(k));
            } else if constexpr (std::is_same_v<T, KappaMuAlpha>) {
                // Inverse-gamma mean power normalized to E[omega] = 1.
                double omega = (m.alpha_ig - 1.0) / st.gamma(m.alpha_ig);
                return omega * kappamu_power(st, m.kappa, m.mu, m.A);
            } else if constexpr (std::is_same_v<T, Suzuki>) {
                return log_params_power(st, m.sigma_dB, m.mu_dB, true);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                return log_params_power(st, m.sigma_dB, m.mu_dB, false);
            } else {
                static_assert(std::is_same_v<T, CascadedRayleigh>);
                double sg = std::sqrt(m.gamma_corr);
                double a1 = st.normal(), b1 = st.normal();
                double a2 = sg * a1 + std::sqrt(1.0 - m.gamma_corr) * st.normal();
                double b2 = sg * b1 + std::sqrt(1.0 - m.gamma_corr) * st.normal();
                double p1 = 0.5 * (a1 * a1 + b1 * b1);
                double p2 = 0.5 * (a2 * a2 + b2 * b2);
                return m.A / (1.0 + m.gamma_corr) * p1 * p2;
            }
        },
        model);
}

// ---------------------------------------------------------------------------
// Tail estimation
// ---------------------------------------------------------------------------

namespace {

void check_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.empty())
        throw std::domain_error("estimate_tail: no thresholds");
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw std::domain_error("estimate_tail: thresholds must be ascending");
}

EmpiricalTail finalize(std::vector<double> thresholds,
                       std::vector<std::uint64_t> hist, std::uint64_t n) {
    EmpiricalTail out;
    out.thresholds = std::move(thresholds);
    out.n = n;
    out.counts.resize(out.thresholds.size());
    std::uint64_t acc = 0;
    for (size_t i = 0; i < out.thresholds.size(); ++i) {
        acc += hist[i];
        out.counts[i] = acc;
    }
    for (std::uint64_t c : out.counts) {
        double e = double(c) / double(n);
        out.eps_hat.push_back(e);
        out.ci95.push_back(1.96 * std::sqrt(e * (1.0 - e) / double(n)));
    }
    return out;
}

// Runs `body(chunk_index, chunk_samples, hist)` over all chunks on a small
// thread pool, merging per-thread histograms. Chunk streams make the result
// independent of the schedule.
template <typename Body>
std::vector<std::uint64_t> run_chunks(std::uint64_t n, std::uint64_t chunk,
                                      size_t bins, unsigned workers, Body body) {
    if (chunk == 0) throw std::domain_error("SampleSpec: chunk must be >= 1");
    const std::uint64_t n_chunks = (n + chunk - 1) / chunk;
    unsigned hw = std::thread::hardware_concurrency();
    unsigned w = workers ? workers : (hw ? hw : 1);
    w = unsigned(std::min<std::uint64_t>(w, n_chunks));
    std::atomic<std::uint64_t> next{0};
    std::vector<std::vector<std::uint64_t>> partial(w, std::vector<std::uint64_t>(bins, 0));
    auto work = [&](unsigned tid) {
        for (;;) {
            std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            std::uint64_t count = std::min(chunk, n - c * chunk);
            body(c, count, partial[tid]);
        }
    };
    if (w <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < w; ++t) pool.emplace_back(work, t);
        for (auto& t : pool) t.join();
    }
    std::vector<std::uint64_t> hist(bins, 0);
    for (const auto& p : partial)
        for (size_t i = 0; i < bins; ++i) hist[i] += p[i];
    return hist;
}

}  // namespace

EmpiricalTail estimate_tail(const SampleSpec& spec,
                            const std::vector<double>& thresholds,
                            unsigned workers) {
    models::validate(spec.model);
    if (spec.n < 1) throw std::domain_error("SampleSpec: n must be >= 1");
    check_thresholds(thresholds);
    const size_t m = thresholds.size();
    auto hist = run_chunks(
        spec.n, spec.chunk, m + 1, workers,
        [&](std::uint64_t c, std::uint64_t count, std::vector<std::uint64_t>& h) {
            Stream st(spec.seed, c);
            for (std::uint64_t i = 0; i < count; ++i) {
                double P = sample_power(spec.model, st);
                size_t idx = std::upper_bound(thresholds.begin(), thresholds.end(), P) -
                             thresholds.begin();
                ++h[idx];
            }
        });
    hist.pop_back();  // overflow bin
    return finalize(thresholds, std::move(hist), spec.n);
}

EmpiricalTail simulate_diversity(const diversity::BranchSet& set,
                                 diversity::Scheme scheme, std::uint64_t n,
                                 std::uint64_t seed,
                                 const std::vector<double>& thresholds,
                                 std::uint64_t chunk, unsigned workers) {
    diversity::validate(set);
    if (n < 1) throw std::domain_error("simulate_diversity: n must be >= 1");
    check_thresholds(thresholds);
    const size_t m = thresholds.size();
    const size_t M = set.branches.size();
    const bool mrc = scheme == diversity::Scheme::MaximumRatioCombining;
    auto hist = run_chunks(
        n, chunk, m + 1, workers,
        [&](std::uint64_t c, std::uint64_t count, std::vector<std::uint64_t>& h) {
            std::vector<Stream> streams;
            streams.reserve(M);
            for (size_t b = 0; b < M; ++b) streams.emplace_back(seed, c, b);
            for (std::uint64_t i = 0; i < count; ++i) {
                double combined = 0.0;
                for (size_t b = 0; b < M; ++b) {
                    double P = sample_power(set.branches[b], streams[b]);
                    combined = mrc ? combined + P : std::max(combined, P);
                }
                size_t idx = std::upper_bound(thresholds.begin(), thresholds.end(),
                                              combined) -
                             thresholds.begin();
                ++h[idx];
            }
        });
    hist.pop_back();
    return finalize(thresholds, std::move(hist), n);
}

SlopeFit fit_loglog_slope(const EmpiricalTail& tail, double lo, double hi) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < tail.thresholds.size(); ++i) {
        double t = tail.thresholds[i];
        if (t < lo || t > hi || tail.counts[i] == 0) continue;
        xs.push_back(std::log(t));
        ys.push_back(std::log(tail.eps_hat[i]));
    }
    const size_t k = xs.size();
    if (k < 3)
        throw std::domain_error(
            "fit_loglog_slope: needs >= 3 nonzero-count thresholds in window");
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < k; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(k);
    my /= double(k);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < k; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    double slope = sxy / sxx;
    double ssr = 0.0;
    for (size_t i = 0; i < k; ++i) {
        double r = ys[i] - my - slope * (xs[i] - mx);
        ssr += r * r;
    }
    double se = k > 2 ? std::sqrt(ssr / double(k - 2) / sxx) : 0.0;
    return {slope, se, int(k)};
}

}  // namespace fadetail::mc
