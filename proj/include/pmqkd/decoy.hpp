#ifndef PMQKD_DECOY_HPP
#define PMQKD_DECOY_HPP

#include <stdexcept>
#include <vector>

#include "pmqkd/chernoff.hpp"
#include "pmqkd/params.hpp"
#include "pmqkd/tally.hpp"

namespace pmqkd::decoy {

/// Tallies too thin to estimate from (no clicks in the kept groups, or a
/// degenerate channel with zero gain).
struct DegenerateDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The preset n_alpha yields eps_eph above the configured epsilon budget.
struct EpsilonBudgetError : ConfigError {
    using ConfigError::ConfigError;
};

struct QParity {
    double q_odd;
    double q_even;
};

/// Exact infinite-decoy parity fractions: q_k = P_mu(k) Y_k / Q_mu summed over
/// odd k up to k_max; q_even takes the remainder (truncation tail included).
QParity asymptotic_q_parity(const ChannelParams& ch, double mu_t, int k_max = 60);

/// q_k for a single photon number.
double q_fraction(const ChannelParams& ch, double mu_t, int k);

struct GainBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Two-intensity (vacuum + weak) lower bound on the single-photon yield:
///   Y1^L = mu/(mu nu - nu^2) [ E^L[Qw] e^nu - E^U[Qs] e^mu nu^2/mu^2
///                              - (mu^2-nu^2)/mu^2 E^U[Qvac] ],
/// clamped to [0,1].
double estimate_y1_lower(const GainBounds& q_signal, const GainBounds& q_weak,
                         const GainBounds& q_vacuum, double mu, double nu);

enum class Method { asymptotic, finite_chernoff };

struct DecoyEstimate {
    double y1_lower = 0.0;
    double q1_lower = 0.0;
    double eph_upper = 1.0;        // = 1 - q1_lower, clamped to [0,1]
    double failure_probability = 0.0;
    Method method = Method::asymptotic;
    bool clamped = false;          // some bound hit a [0,1] clamp (looseness signal)
};

/// Full finite-size pipeline (Step I inverse bounds + two-intensity estimator,
/// Step II direct sampling bound on the kept group set). Reads only sent/clicked
/// counts, never bit errors. Throws EpsilonBudgetError if eps_eph exceeds
/// params.epsilon, DegenerateDataError on zero clicks in (signal, J).
DecoyEstimate finite_size_estimate(const TallyTable& tallies, const ProtocolParams& params,
                                   const std::vector<int>& group_set);

/// Fluctuation-free limit of the same estimator: exact expected gains from the
/// channel model, zero-width intervals, failure probability 0.
DecoyEstimate asymptotic_estimate(const ChannelParams& ch, const ProtocolParams& params);

std::vector<int> all_groups(int phase_slices);

} // namespace pmqkd::decoy

#endif
