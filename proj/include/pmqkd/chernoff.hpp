#ifndef PMQKD_CHERNOFF_HPP
#define PMQKD_CHERNOFF_HPP

namespace pmqkd::decoy {

/// Two-sided concentration interval for a sum of independent Bernoulli
/// variables, with the failure probability of each side attached.
struct ChernoffInterval {
    double value = 0.0;        // observed chi (inverse) or expectation (direct)
    double lower = 0.0;
    double upper = 0.0;
    double delta_lower = 0.0;
    double delta_upper = 0.0;
    double eps_lower = 0.0;
    double eps_upper = 0.0;
    double epsilon() const { return eps_lower + eps_upper; }
};

/// g2(x) = ln(1+x) - x/(1+x); exponent of the lower-side inverse bound.
double g2(double x);

/// Inverse use: bound the unknown expectation from an observed count chi.
/// Presets E^L = chi - n_alpha sqrt(chi), E^U = chi + n_alpha sqrt(chi)
/// (Gaussian-style preset), then evaluates the Chernoff failure terms at
/// the implied deltas. chi = 0 yields the documented one-sided interval
/// [0, n_alpha^2/2] with eps_upper = exp(-n_alpha^2/2).
ChernoffInterval chernoff_inverse(double chi, double n_alpha);

/// Direct use: bound a yet-unobserved count from its expectation.
/// Presets chi^{L,U} = E -/+ n_alpha sqrt(E), i.e. delta = n_alpha/sqrt(E);
/// eps per side is exp(-delta^2 E / (2 + delta)).
ChernoffInterval chernoff_direct(double expected, double n_alpha);

} // namespace pmqkd::decoy

#endif
