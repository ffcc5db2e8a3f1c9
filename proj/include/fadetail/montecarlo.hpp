#ifndef FADETAIL_MONTECARLO_HPP
#define FADETAIL_MONTECARLO_HPP

#include <cstdint>
#include <vector>

#include "fadetail/diversity.hpp"
#include "fadetail/models.hpp"

namespace fadetail::mc {

/// Deterministic random stream (xoshiro256++ state seeded via splitmix64).
/// Streams for distinct (seed, chunk, branch) triples are independent; the
/// draw sequence within one stream is fixed, so results never depend on how
/// chunks are scheduled across threads.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t chunk = 0, std::uint64_t branch = 0);

    std::uint64_t next_u64();
    double uniform();        // (0, 1)
    double uniform_angle();  // [0, 2*pi)
    double normal();         // standard normal (polar method, cached pair)
    double exponential();    // rate 1
    double gamma(double shape);       // Gamma(shape, 1), shape > 0
    std::uint64_t poisson(double mean);

private:
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool have_cached_ = false;
};

struct SampleSpec {
    models::ChannelModel model;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::uint64_t chunk = 1ull << 20;
};

struct EmpiricalTail {
    std::vector<double> thresholds;      // sorted ascending
    std::vector<std::uint64_t> counts;   // samples with P < threshold
    std::uint64_t n = 0;
    std::vector<double> eps_hat;
    std::vector<double> ci95;            // 1.96 * sqrt(eps(1-eps)/n)
};

/// One i.i.d. draw of received power; E[P] = mean_power(model).
double sample_power(const models::ChannelModel& model, Stream& stream);

/// Empirical lower tail at the given ascending thresholds. Deterministic in
/// (model, n, seed, chunk); workers = 0 picks the hardware thread count.
EmpiricalTail estimate_tail(const SampleSpec& spec,
                            const std::vector<double>& thresholds,
                            unsigned workers = 0);

/// Combined-statistic (max for SC, sum for MRC) empirical tail over
/// independent per-branch substreams.
EmpiricalTail simulate_diversity(const diversity::BranchSet& set,
                                 diversity::Scheme scheme, std::uint64_t n,
                                 std::uint64_t seed,
                                 const std::vector<double>& thresholds,
                                 std::uint64_t chunk = 1ull << 20,
                                 unsigned workers = 0);

struct SlopeFit {
    double slope;
    double stderr_;
    int points;
};

/// Least-squares slope of log(eps_hat) vs log(threshold) over thresholds in
/// [lo, hi] with nonzero counts. Throws std::domain_error below 3 points.
SlopeFit fit_loglog_slope(const EmpiricalTail& tail, double lo, double hi);

}  // namespace fadetail::mc

#endif
