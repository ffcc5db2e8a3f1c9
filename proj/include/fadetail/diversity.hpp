#ifndef FADETAIL_DIVERSITY_HPP
#define FADETAIL_DIVERSITY_HPP

#include <cstdint>
#include <vector>

#include "fadetail/models.hpp"

namespace fadetail::diversity {

enum class Scheme { SelectionCombining, MaximumRatioCombining };

/// Ordered list of independent (non-identically distributed) branch models.
struct BranchSet {
    std::vector<models::ChannelModel> branches;
};

/// Throws std::domain_error on an empty set or an invalid branch.
void validate(const BranchSet& set);

/// Branch power ratios A_m / A_1.
std::vector<double> bpr(const BranchSet& set);

/// Selection-combining outage: product of the branch CDFs, accumulated in
/// log domain so M deep tails do not underflow.
double sc_outage(const BranchSet& set, double P_R);

/// MRC offset for branch tail slopes: prod Gamma(1+beta_m) / Gamma(1+sum).
/// Equals 1 for M = 1 and 1/M! for M equal unit slopes.
double mrc_offset(const std::vector<double>& betas);

/// Maximum-ratio-combining outage from branch power-law tails:
/// mrc_offset * prod alpha_m (P_R/A_m)^beta_m, log-domain.
double mrc_outage_powerlaw(const std::vector<models::PowerLawTail>& laws,
                           double P_R);

/// Heuristic offset 1/(M!)^beta for M equal-slope branches.
double mrc_heuristic_offset(int M, double beta);

/// Local-slope MRC expansion: mrc_offset of the branch slopes at P_R times
/// the product of the branch tail approximations. Reduces to
/// mrc_outage_powerlaw when every branch tail is a pure power law.
double mrc_outage_generic(const BranchSet& set, double P_R);

struct MrcPhi {
    double exact;      // (1 + max phi)^M - 1
    double bernoulli;  // M * max phi
};

/// MRC error bound from per-branch phi values (all >= 0).
MrcPhi mrc_phi(const std::vector<double>& phis);

/// Convenience: branch phis evaluated at P_R. Throws std::domain_error
/// naming the first branch without an error bound.
MrcPhi mrc_phi(const BranchSet& set, double P_R);

/// Monte Carlo cross-check at a single threshold (delegates to the sampler).
double simulate_reference(const BranchSet& set, Scheme scheme, double P_R,
                          std::uint64_t n, std::uint64_t seed,
                          unsigned workers = 0);

}  // namespace fadetail::diversity

#endif
