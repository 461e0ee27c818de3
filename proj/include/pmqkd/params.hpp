#ifndef PMQKD_PARAMS_HPP
#define PMQKD_PARAMS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pmqkd {

/// Thrown by validate() with a message naming the offending field.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Honest lossy channel between one party and the untrusted midpoint.
struct ChannelParams {
    double distance_km = 100.0;          // Alice-Bob distance; Eve sits at the midpoint
    double attenuation_db_per_km = 0.2;  // telecom fiber default
    double detector_efficiency = 0.2;    // eta_d
    double dark_count_rate = 1e-8;       // p_d, per pulse per detector
    double misalignment = 0.13;          // e_0, extra phase-fluctuation error

    /// Transmittance from Alice (or Bob) to the midpoint, detector efficiency included.
    double transmittance() const;

    /// Full Alice-to-Bob transmittance used for the repeaterless bound.
    double end_to_end_transmittance(bool include_detector = true) const;

    void validate() const;
};

/// Protocol knobs: intensities, slicing, post-processing and finite-size budget.
struct ProtocolParams {
    double mu = 0.1;           // signal total intensity (mu_a = mu_b = mu/2)
    double nu = 0.02;          // weak decoy total intensity, 0 < nu < mu
    int phase_slices = 16;     // D, even
    double ec_efficiency = 1.1; // f
    double rounds = 1e12;      // N, integral
    double epsilon = 1e-5;     // failure-probability budget for phase-error estimation
    double n_alpha = 6.2;      // preset Chernoff interval width, in "sigmas"
    double prob_vacuum = 0.05; // per-party intensity choice probabilities
    double prob_weak = 0.15;
    double prob_signal = 0.8;

    int groups() const { return phase_slices / 2; }

    void validate() const;
};

} // namespace pmqkd

#endif
