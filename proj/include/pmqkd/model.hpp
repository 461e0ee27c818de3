#ifndef PMQKD_MODEL_HPP
#define PMQKD_MODEL_HPP

#include <vector>

#include "pmqkd/params.hpp"

// Closed-form channel/detection model for the honest lossy channel.
// All photon-number formulas are parametrized by the TOTAL intensity
// mu_t = mu_a + mu_b of the pulse pair; the per-arm value is mu_t/2.

namespace pmqkd::model {

/// H(p) = -p log2 p - (1-p) log2(1-p), H(0) = H(1) = 0.
double binary_entropy(double p);

/// Entropy cost of a phase-error rate: H(min(p, 1/2)). A rate at or
/// beyond 1/2 means no extractable key, not a cheaper one.
double entropy_cost(double p);

/// e^{-mu_t} mu_t^k / k!
double poisson_pmf(double mu_t, int k);

/// P^mu_D(k) = sum_l e^{-mu} mu^{lD+k} / (lD+k)!, for 0 <= k < D.
double discrete_randomized_pmf(double mu, int D, int k);

/// Y_k = 1 - (1 - 2 p_d)(1 - eta)^k
double yield_k(const ChannelParams& ch, int k);

/// Q_mu = 1 - (1 - 2 p_d) e^{-eta mu_t}
double gain(const ChannelParams& ch, double mu_t);

/// Intrinsic phase-group mismatch error e_Delta(j_s), 0 <= j_s <= D/2 - 1.
double mismatch_error(int j_s, int D);

/// E_mu^(j_s) = min{ [p_d + eta mu (e_Delta + e_0)] e^{-eta mu} / Q_mu, 1/2 }.
/// Q_mu = 0 degenerates to 1/2.
double bit_error_rate(const ChannelParams& ch, double mu_t, int j_s, int D);

/// xi_D(mu) = P^mu_D(1) sqrt(mu^D / (D+1)!), the discrete-randomization
/// yield-deviation scale.
double discrete_randomization_deviation(double mu, int D);

struct PhotonDistribution {
    enum class Kind { poisson, discrete_randomized };
    Kind kind;
    double intensity = 0.0;
    int slices = 0;               // D, discrete_randomized only
    std::vector<double> pmf;      // index k; truncation tail folded into the last bin
};

PhotonDistribution poisson_distribution(double mu_t, int k_max);
PhotonDistribution discrete_randomized_distribution(double mu, int D);

} // namespace pmqkd::model

#endif
