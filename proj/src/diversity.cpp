#include "fadetail/diversity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fadetail/montecarlo.hpp"

namespace fadetail::diversity {

void validate(const BranchSet& set) {
    if (set.branches.empty())
        throw std::domain_error("BranchSet: needs at least one branch");
    for (const auto& b : set.branches) models::validate(b);
}

std::vector<double> bpr(const BranchSet& set) {
    validate(set);
    std::vector<double> out;
    out.reserve(set.branches.size());
    double A1 = models::mean_power(set.branches.front());
    for (const auto& b : set.branches) out.push_back(models::mean_power(b) / A1);
    return out;
}

double sc_outage(const BranchSet& set, double P_R) {
    validate(set);
    double log_prod = 0.0;
    for (const auto& b : set.branches) {
        double F = models::cdf(b, P_R);
        if (F <= 0.0) return 0.0;
        log_prod += std::log(F);
    }
    return std::exp(log_prod);
}

double mrc_offset(const std::vector<double>& betas) {
    if (betas.empty()) throw std::domain_error("mrc_offset: no slopes given");
    double sum = 0.0, log_num = 0.0;
    for (double b : betas) {
        if (!(b > 0.0) || !std::isfinite(b))
            throw std::domain_error("mrc_offset: slopes must be > 0");
        log_num += std::lgamma(1.0 + b);
        sum += b;
    }
    return std::exp(log_num - std::lgamma(1.0 + sum));
}

double mrc_outage_powerlaw(const std::vector<models::PowerLawTail>& laws,
                           double P_R) {
    if (laws.empty()) throw std::domain_error("mrc_outage_powerlaw: no branches");
    if (!(P_R >= 0.0) || !std::isfinite(P_R))
        throw std::domain_error("mrc_outage_powerlaw: P_R must be finite and >= 0");
    if (P_R == 0.0) return 0.0;
    std::vector<double> betas;
    betas.reserve(laws.size());
    double log_prod = 0.0;
    for (const auto& law : laws) {
        betas.push_back(law.beta_slope);
        log_prod += law.log_eval(P_R);
    }
    return std::exp(std::log(mrc_offset(betas)) + log_prod);
}

double mrc_heuristic_offset(int M, double beta) {
    if (M < 1) throw std::domain_error("mrc_heuristic_offset: M must be >= 1");
    if (!(beta > 0.0)) throw std::domain_error("mrc_heuristic_offset: beta must be > 0");
    return std::exp(-beta * std::lgamma(double(M) + 1.0));
}

double mrc_outage_generic(const BranchSet& set, double P_R) {
    validate(set);
    // product of the branch tail approximations (not the exact cdfs: the
    // offset correction is derived for the tail curves), log domain
    std::vector<double> slopes;
    slopes.reserve(set.branches.size());
    double log_prod = 0.0;
    for (const auto& b : set.branches) {
        double t = models::tail_approx(b, P_R);
        if (t == 0.0) return 0.0;
        slopes.push_back(models::local_slope(b, P_R));
        log_prod += std::log(t);
    }
    double lo = 0.0, ls = 0.0;
    for (double beta : slopes) {
        if (!(beta > 0.0))
            throw std::domain_error("mrc_offset: slopes must be > 0");
        lo += std::lgamma(1.0 + beta);
        ls += beta;
    }
    return std::exp(lo - std::lgamma(1.0 + ls) + log_prod);
}

MrcPhi mrc_phi(const std::vector<double>& phis) {
    if (phis.empty()) throw std::domain_error("mrc_phi: no branches");
    double mx = 0.0;
    for (double p : phis) {
        if (!(p >= 0.0)) throw std::domain_error("mrc_phi: phi values must be >= 0");
        mx = std::max(mx, p);
    }
    double M = double(phis.size());
    return {std::pow(1.0 + mx, M) - 1.0, M * mx};
}

MrcPhi mrc_phi(const BranchSet& set, double P_R) {
    validate(set);
    std::vector<double> phis;
    phis.reserve(set.branches.size());
    for (size_t i = 0; i < set.branches.size(); ++i) {
        if (!models::has_phi(set.branches[i]))
            throw std::domain_error(
                "mrc_phi: branch " + std::to_string(i + 1) + " (" +
                models::model_name(set.branches[i]) + ") has no error bound");
        phis.push_back(models::approx_error_phi(set.branches[i], P_R));
    }
    return mrc_phi(phis);
}

double simulate_reference(const BranchSet& set, Scheme scheme, double P_R,
                          std::uint64_t n, std::uint64_t seed, unsigned workers) {
    mc::EmpiricalTail t = mc::simulate_diversity(set, scheme, n, seed, {P_R},
                                                 1ull << 20, workers);
    return t.eps_hat.front();
}

}  // namespace fadetail::diversity
