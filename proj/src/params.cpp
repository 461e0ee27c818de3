#include "pmqkd/params.hpp"

#include <cmath>

namespace pmqkd {

double ChannelParams::transmittance() const {
    return detector_efficiency *
           std::pow(10.0, -attenuation_db_per_km * (distance_km / 2.0) / 10.0);
}

double ChannelParams::end_to_end_transmittance(bool include_detector) const {
    double fiber = std::pow(10.0, -attenuation_db_per_km * distance_km / 10.0);
    return include_detector ? detector_efficiency * fiber : fiber;
}

void ChannelParams::validate() const {
    if (!(distance_km >= 0.0)) throw ConfigError("distance_km must be >= 0");
    if (!(attenuation_db_per_km > 0.0)) throw ConfigError("attenuation_db_per_km must be > 0");
    if (!(detector_efficiency > 0.0 && detector_efficiency <= 1.0))
        throw ConfigError("detector_efficiency must be in (0,1]");
    if (!(dark_count_rate >= 0.0 && dark_count_rate < 0.5))
        throw ConfigError("dark_count_rate must be in [0,0.5)");
    if (!(misalignment >= 0.0 && misalignment <= 0.5))
        throw ConfigError("misalignment must be in [0,0.5]");
    double eta = transmittance();
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("derived transmittance outside (0,1]");
}

void ProtocolParams::validate() const {
    if (!(mu > 0.0)) throw ConfigError("mu must be > 0");
    if (!(nu > 0.0 && nu < mu)) throw ConfigError("nu must satisfy 0 < nu < mu");
    if (phase_slices < 2 || phase_slices % 2 != 0)
        throw ConfigError("phase_slices must be an even integer >= 2");
    if (!(ec_efficiency >= 1.0)) throw ConfigError("ec_efficiency must be >= 1");
    if (!(rounds >= 1.0) || rounds != std::floor(rounds) || rounds > 9e15)
        throw ConfigError("rounds must be an integer in [1, 9e15]");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in (0,1)");
    if (!(n_alpha > 0.0)) throw ConfigError("n_alpha must be > 0");
    double ps = prob_vacuum + prob_weak + prob_signal;
    if (prob_vacuum < 0 || prob_weak < 0 || prob_signal < 0 || std::abs(ps - 1.0) > 1e-9)
        throw ConfigError("intensity probabilities must be nonnegative and sum to 1");
}

} // namespace pmqkd
