#ifndef PMQKD_MONTECARLO_HPP
#define PMQKD_MONTECARLO_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "pmqkd/params.hpp"
#include "pmqkd/tally.hpp"

// Round-level simulator of the practical PM-QKD protocol: random phases,
// intensities and key bits, an honest interferometric channel with loss and
// dark counts, Eve's L/R announcement, and sifting with phase
// post-compensation.

namespace pmqkd::mc {

enum class Click : std::uint8_t { none, left, right, both };

struct RoundRecord {
    std::uint8_t kappa_a = 0, kappa_b = 0;
    int j_a = 0, j_b = 0;
    Intensity setting_a = Intensity::signal, setting_b = Intensity::signal;
    Click click = Click::none;
    int j_delta = 0; // phase post-compensation index
};

struct DriftModel {
    enum class Kind { none, fixed_offset, random_walk };
    Kind kind = Kind::none;
    double phi_delta = 0.0; // fixed offset, radians (added to Bob's arm)
    double sigma = 0.0;     // random walk step per round, radians
};

struct SimConfig {
    ChannelParams channel;
    ProtocolParams protocol;
    std::uint64_t seed = 1;
    DriftModel drift;
    int compensation_index = -1; // -1: nearest grid index of the drift model
    std::uint64_t batch_size = 1u << 20;
    int threads = 0;             // 0 = hardware; random_walk runs sequentially
    bool tag_ground_truth = true;

    int resolved_compensation_index() const;
    void validate() const;
};

struct ClickProbs {
    double p_left, p_right, p_double, p_none;
};

/// 50:50 beam-splitter statistics for post-loss coherent amplitudes:
/// output intensities |a +- b|^2 / 2, per-detector click probability
/// 1 - (1 - p_d) e^{-I}, joint outcomes by independence.
ClickProbs detector_click_probs(std::complex<double> amp_a, std::complex<double> amp_b,
                                double dark_rate);

struct SiftOutcome {
    int group;  // merged phase group index in [0, D/2)
    bool flip;  // Bob flips his key bit
};

/// j_d = (j_a - j_b - j_delta) mod D; flip for R clicks and for
/// j_d in [D/4, 3D/4); groups j_d and j_d + D/2 merge to j_d mod D/2.
/// Returns nothing for none/double clicks.
std::optional<SiftOutcome> sift_round(const RoundRecord& r, int D);

/// Per-(setting, group) even-photon click counts from posterior tagging.
/// Never consumed by estimation; soundness checks only.
struct GroundTruth {
    int groups = 0;
    std::vector<std::uint64_t> even_clicks; // [setting][group]
    std::uint64_t even(Intensity a, int j) const {
        return even_clicks[static_cast<std::size_t>(static_cast<int>(a)) * groups + j];
    }
    /// Even-tagged fraction of clicks in (setting, group set).
    double even_fraction(Intensity a, const std::vector<int>& group_set,
                         const TallyTable& tallies) const;
    void merge(const GroundTruth& other);
};

struct SimResult {
    TallyTable tallies;
    GroundTruth truth;
    std::uint64_t double_clicks = 0;
    std::uint64_t seed = 0;
    double seconds = 0.0;
};

SimResult simulate(const SimConfig& config);

} // namespace pmqkd::mc

#endif
