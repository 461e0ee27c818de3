#include "pmqkd/model.hpp"

#include <cmath>
#include <numbers>

namespace pmqkd::model {

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binary_entropy: p outside [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double entropy_cost(double p) { return binary_entropy(std::min(p, 0.5)); }

double poisson_pmf(double mu_t, int k) {
    if (k < 0) throw std::domain_error("poisson_pmf: k < 0");
    if (!(mu_t >= 0.0)) throw std::domain_error("poisson_pmf: mu_t < 0");
    if (mu_t == 0.0) return k == 0 ? 1.0 : 0.0;
    // log form keeps large k and tiny mu well away from overflow
    return std::exp(k * std::log(mu_t) - mu_t - std::lgamma(k + 1.0));
}

double discrete_randomized_pmf(double mu, int D, int k) {
    if (D < 2) throw std::domain_error("discrete_randomized_pmf: D < 2");
    if (k < 0 || k >= D) throw std::domain_error("discrete_randomized_pmf: k outside [0,D)");
    if (mu == 0.0) return k == 0 ? 1.0 : 0.0;
    double sum = 0.0;
    for (int l = 0;; ++l) {
        double term = poisson_pmf(mu, l * D + k);
        sum += term;
        if (l > 0 && term < 1e-18 * sum) break;
        if (term == 0.0) break;
    }
    return sum;
}

double yield_k(const ChannelParams& ch, int k) {
    if (k < 0) throw std::domain_error("yield_k: k < 0");
    double eta = ch.transmittance();
    return 1.0 - (1.0 - 2.0 * ch.dark_count_rate) * std::pow(1.0 - eta, k);
}

double gain(const ChannelParams& ch, double mu_t) {
    if (!(mu_t >= 0.0)) throw std::domain_error("gain: mu_t < 0");
    double eta = ch.transmittance();
    return 1.0 - (1.0 - 2.0 * ch.dark_count_rate) * std::exp(-eta * mu_t);
}

double mismatch_error(int j_s, int D) {
    if (D < 2 || D % 2 != 0) throw std::domain_error("mismatch_error: D must be even >= 2");
    if (j_s < 0 || j_s > D / 2 - 1) throw std::domain_error("mismatch_error: j_s outside [0, D/2-1]");
    double x = std::numbers::pi * j_s / D;
    double s = (j_s <= D / 4.0) ? std::sin(x) : std::sin(std::numbers::pi / 2.0 - x);
    return s * s;
}

double bit_error_rate(const ChannelParams& ch, double mu_t, int j_s, int D) {
    double q = gain(ch, mu_t);
    if (q <= 0.0) return 0.5;
    double eta = ch.transmittance();
    double e = (ch.dark_count_rate + eta * mu_t * (mismatch_error(j_s, D) + ch.misalignment)) *
               std::exp(-eta * mu_t) / q;
    return std::min(e, 0.5);
}

double discrete_randomization_deviation(double mu, int D) {
    if (D < 2) throw std::domain_error("discrete_randomization_deviation: D < 2");
    if (!(mu >= 0.0)) throw std::domain_error("discrete_randomization_deviation: mu < 0");
    if (mu == 0.0) return 0.0;
    // sqrt(mu^D/(D+1)!) via logs: (D+1)! overflows 64-bit integers already at D = 16
    double log_root = 0.5 * (D * std::log(mu) - std::lgamma(D + 2.0));
    return discrete_randomized_pmf(mu, D, 1) * std::exp(log_root);
}

PhotonDistribution poisson_distribution(double mu_t, int k_max) {
    PhotonDistribution d;
    d.kind = PhotonDistribution::Kind::poisson;
    d.intensity = mu_t;
    d.pmf.resize(k_max + 1);
    double acc = 0.0;
    for (int k = 0; k < k_max; ++k) {
        d.pmf[k] = poisson_pmf(mu_t, k);
        acc += d.pmf[k];
    }
    d.pmf[k_max] = std::max(0.0, 1.0 - acc); // truncation tail folded in
    return d;
}

PhotonDistribution discrete_randomized_distribution(double mu, int D) {
    PhotonDistribution d;
    d.kind = PhotonDistribution::Kind::discrete_randomized;
    d.intensity = mu;
    d.slices = D;
    d.pmf.resize(D);
    double acc = 0.0;
    for (int k = 0; k + 1 < D; ++k) {
        d.pmf[k] = discrete_randomized_pmf(mu, D, k);
        acc += d.pmf[k];
    }
    d.pmf[D - 1] = std::max(0.0, 1.0 - acc);
    return d;
}

} // namespace pmqkd::model
