#include "pmqkd/montecarlo.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include "pmqkd/model.hpp"
#include "pmqkd/rng.hpp"

namespace pmqkd::mc {

namespace {

constexpr int kTagKmax = 64;

inline int pos_mod(int x, int m) { return ((x % m) + m) % m; }

inline int merged_group(int j_d, int D) { return j_d % (D / 2); }

inline bool flip_window(int j_d, int D) { return j_d >= D / 4 && j_d < 3 * D / 4; }

inline std::uint64_t to_threshold(long double cum) {
    if (cum <= 0.0L) return 0;
    if (cum >= 1.0L) return ~0ull;
    return static_cast<std::uint64_t>(cum * 18446744073709551616.0L);
}

} // namespace

int SimConfig::resolved_compensation_index() const {
    if (compensation_index >= 0) return compensation_index % protocol.phase_slices;
    if (drift.kind != DriftModel::Kind::fixed_offset) return 0;
    int D = protocol.phase_slices;
    long idx = std::lround(drift.phi_delta * D / (2.0 * std::numbers::pi));
    return pos_mod(static_cast<int>(idx), D);
}

void SimConfig::validate() const {
    channel.validate();
    protocol.validate();
    if (batch_size == 0) throw ConfigError("batch_size must be > 0");
    if (protocol.phase_slices % 4 != 0)
        throw ConfigError("phase_slices must be a multiple of 4 for sifting windows");
}

ClickProbs detector_click_probs(std::complex<double> amp_a, std::complex<double> amp_b,
                                double dark_rate) {
    double i_left = 0.5 * std::norm(amp_a + amp_b);
    double i_right = 0.5 * std::norm(amp_a - amp_b);
    double p_l = 1.0 - (1.0 - dark_rate) * std::exp(-i_left);
    double p_r = 1.0 - (1.0 - dark_rate) * std::exp(-i_right);
    ClickProbs out;
    out.p_left = p_l * (1.0 - p_r);
    out.p_right = (1.0 - p_l) * p_r;
    out.p_double = p_l * p_r;
    out.p_none = (1.0 - p_l) * (1.0 - p_r);
    return out;
}

std::optional<SiftOutcome> sift_round(const RoundRecord& r, int D) {
    if (r.click != Click::left && r.click != Click::right) return std::nullopt;
    int j_d = pos_mod(r.j_a - r.j_b - r.j_delta, D);
    SiftOutcome out;
    out.group = merged_group(j_d, D);
    out.flip = (r.click == Click::right) != flip_window(j_d, D);
    return out;
}

double GroundTruth::even_fraction(Intensity a, const std::vector<int>& group_set,
                                  const TallyTable& tallies) const {
    std::uint64_t ev = 0, clicks = 0;
    for (int j : group_set) {
        ev += even(a, j);
        clicks += tallies.at(a, j).clicked;
    }
    return clicks > 0 ? static_cast<double>(ev) / static_cast<double>(clicks) : 0.0;
}

void GroundTruth::merge(const GroundTruth& other) {
    for (std::size_t i = 0; i < even_clicks.size(); ++i) even_clicks[i] += other.even_clicks[i];
}

namespace {

struct ClickThresholds {
    std::uint64_t none, left, right; // cumulative; remainder = double click
};

struct SimTables {
    int D = 0;
    int groups = 0;
    std::uint32_t setting_cut0 = 0, setting_cut1 = 0;  // 24-bit lanes
    std::vector<ClickThresholds> click;                // [setting][d_raw][kappa_diff]
    std::vector<std::uint64_t> flip;                   // [setting][group]
    std::vector<std::array<std::uint64_t, kTagKmax + 1>> tag_cum; // [setting]
    double arm_amp[3] = {0, 0, 0};                     // post-loss per-arm amplitude
    double drift_phase = 0.0;                          // fixed offset
    int j_delta = 0;

    const ClickThresholds& click_at(int a, int d, int c) const {
        return click[(static_cast<std::size_t>(a) * D + d) * 2 + c];
    }
};

ClickThresholds make_click_thresholds(double amp, double theta, double dark) {
    ClickProbs p = detector_click_probs(amp, std::polar(amp, theta), dark);
    ClickThresholds t;
    long double cum = p.p_none;
    t.none = to_threshold(cum);
    cum += p.p_left;
    t.left = to_threshold(cum);
    cum += p.p_right;
    t.right = to_threshold(cum);
    return t;
}

// Exact single-click error probability of the drift-free interferometer for a
// merged group, used to calibrate the misalignment flip.
double interferometric_qber(double amp, int group, int D, double dark) {
    double err = 0.0, clicks = 0.0;
    for (int d : {group, group + D / 2}) {
        for (int c = 0; c < 2; ++c) {
            double theta = 2.0 * std::numbers::pi * d / D + std::numbers::pi * c;
            ClickProbs p = detector_click_probs(amp, std::polar(amp, theta), dark);
            clicks += p.p_left + p.p_right;
            // error iff announced R xor window-flip differs from kappa_diff
            bool err_on_left = (flip_window(d, D) != (c == 1));
            err += err_on_left ? p.p_left : p.p_right;
        }
    }
    return clicks > 0.0 ? err / clicks : 0.5;
}

SimTables build_tables(const SimConfig& cfg) {
    const int D = cfg.protocol.phase_slices;
    SimTables t;
    t.D = D;
    t.groups = D / 2;
    t.j_delta = cfg.resolved_compensation_index();
    t.drift_phase = cfg.drift.kind == DriftModel::Kind::fixed_offset ? cfg.drift.phi_delta : 0.0;

    double pv = cfg.protocol.prob_vacuum, pw = cfg.protocol.prob_weak;
    t.setting_cut0 = static_cast<std::uint32_t>(std::llround(pv * 16777216.0));
    t.setting_cut1 = t.setting_cut0 + static_cast<std::uint32_t>(std::llround(pw * 16777216.0));

    double eta = cfg.channel.transmittance();
    double dark = cfg.channel.dark_count_rate;
    const double mus[3] = {0.0, cfg.protocol.nu, cfg.protocol.mu};
    for (int a = 0; a < 3; ++a) t.arm_amp[a] = std::sqrt(eta * mus[a] / 2.0);

    t.click.resize(static_cast<std::size_t>(3) * D * 2);
    for (int a = 0; a < 3; ++a)
        for (int d = 0; d < D; ++d)
            for (int c = 0; c < 2; ++c) {
                double theta =
                    2.0 * std::numbers::pi * d / D + std::numbers::pi * c - t.drift_phase;
                t.click[(static_cast<std::size_t>(a) * D + d) * 2 + c] =
                    make_click_thresholds(t.arm_amp[a], theta, dark);
            }

    // Misalignment e_0 enters as a calibrated Bernoulli flip on sifted bits.
    // With flip probability p the observed QBER is E_int (1-2p) + p, so
    // p = (E_target - E_int) / (1 - 2 E_int) reproduces the analytic
    // E_mu^(j) = [p_d + eta mu (e_Delta + e_0)] e^{-eta mu} / Q_mu exactly;
    // a clamped p = 1/2 lands on the model's 1/2 ceiling.
    t.flip.resize(static_cast<std::size_t>(3) * t.groups);
    for (int a = 0; a < 3; ++a)
        for (int j = 0; j < t.groups; ++j) {
            double target = model::bit_error_rate(cfg.channel, mus[a], j, D);
            double e_int = interferometric_qber(t.arm_amp[a], j, D, dark);
            double p = 0.0;
            if (e_int < 0.5 && target > e_int)
                p = std::min(0.5, (target - e_int) / (1.0 - 2.0 * e_int));
            t.flip[static_cast<std::size_t>(a) * t.groups + j] = to_threshold(p);
        }

    // Posterior photon-number distribution of a clicked round per setting,
    // q_k = P_mu(k) Y_k / Q_mu; drives the ground-truth parity tag.
    t.tag_cum.resize(3);
    for (int a = 0; a < 3; ++a) {
        double q = model::gain(cfg.channel, mus[a]);
        long double cum = 0.0L;
        for (int k = 0; k <= kTagKmax; ++k) {
            double qk = q > 0.0
                            ? model::poisson_pmf(mus[a], k) * model::yield_k(cfg.channel, k) / q
                            : (k == 0 ? 1.0 : 0.0);
            cum += qk;
            t.tag_cum[a][k] = to_threshold(cum);
        }
        t.tag_cum[a][kTagKmax] = ~0ull; // truncation tail
    }
    return t;
}

struct BatchAccum {
    TallyTable tallies;
    GroundTruth truth;
    std::uint64_t double_clicks = 0;
};

void run_batch(const SimConfig& cfg, const SimTables& t, std::uint64_t batch_index,
               std::uint64_t rounds, BatchAccum& acc, double* walk_state) {
    CounterRng rng(cfg.seed, batch_index);
    const int D = t.D;
    const bool walking = cfg.drift.kind == DriftModel::Kind::random_walk;
    const double dark = cfg.channel.dark_count_rate;

    for (std::uint64_t i = 0; i < rounds; ++i) {
        std::uint64_t r1 = rng.next();
        std::uint32_t lane_a = r1 & 0xFFFFFF;
        std::uint32_t lane_b = (r1 >> 24) & 0xFFFFFF;
        int sa = lane_a < t.setting_cut0 ? 0 : (lane_a < t.setting_cut1 ? 1 : 2);
        int sb = lane_b < t.setting_cut0 ? 0 : (lane_b < t.setting_cut1 ? 1 : 2);
        double walk_phase = 0.0;
        if (walking) {
            double u1 = rng.next_double(), u2 = rng.next_double();
            *walk_state += cfg.drift.sigma * std::sqrt(-2.0 * std::log(1.0 - u1)) *
                           std::cos(2.0 * std::numbers::pi * u2);
            walk_phase = *walk_state;
        }
        if (sa != sb) continue; // settings announced, mismatched rounds discarded

        int ka = static_cast<int>((r1 >> 48) & 1);
        int kb = static_cast<int>((r1 >> 49) & 1);
        std::uint64_t r2 = rng.next();
        int ja = static_cast<int>((static_cast<std::uint32_t>(r2) * std::uint64_t(D)) >> 32);
        int jb = static_cast<int>(((r2 >> 32) * std::uint64_t(D)) >> 32);
        int d_raw = pos_mod(ja - jb, D);
        int c = ka ^ kb;

        std::uint64_t r3 = rng.next();
        Click click;
        if (!walking) {
            const ClickThresholds& ct = t.click_at(sa, d_raw, c);
            click = r3 < ct.none    ? Click::none
                    : r3 < ct.left  ? Click::left
                    : r3 < ct.right ? Click::right
                                    : Click::both;
        } else {
            double theta = 2.0 * std::numbers::pi * d_raw / D + std::numbers::pi * c - walk_phase;
            ClickThresholds ct = make_click_thresholds(t.arm_amp[sa], theta, dark);
            click = r3 < ct.none    ? Click::none
                    : r3 < ct.left  ? Click::left
                    : r3 < ct.right ? Click::right
                                    : Click::both;
        }

        int j_d = pos_mod(d_raw - t.j_delta, D);
        int group = merged_group(j_d, D);
        Intensity setting = static_cast<Intensity>(sa);
        TallyCell& cell = acc.tallies.at(setting, group);
        cell.sent++;
        if (click == Click::none) continue;
        if (click == Click::both) {
            acc.double_clicks++;
            continue;
        }
        cell.clicked++;

        int kb_final = kb ^ ((click == Click::right) != flip_window(j_d, D) ? 1 : 0);
        std::uint64_t r4 = rng.next();
        if (r4 < t.flip[static_cast<std::size_t>(sa) * t.groups + group]) kb_final ^= 1;
        if (kb_final != ka) cell.bit_errors++;

        if (cfg.tag_ground_truth) {
            std::uint64_t r5 = rng.next();
            int k = 0;
            while (k < kTagKmax && r5 >= t.tag_cum[sa][k]) ++k;
            if (k % 2 == 0)
                acc.truth.even_clicks[static_cast<std::size_t>(sa) * t.groups + group]++;
        }
    }
}

} // namespace

SimResult simulate(const SimConfig& config) {
    config.validate();
    auto t0 = std::chrono::steady_clock::now();
    SimTables tables = build_tables(config);
    const int D = config.protocol.phase_slices;

    auto make_accum = [&] {
        BatchAccum a{TallyTable(D), GroundTruth{}, 0};
        a.truth.groups = D / 2;
        a.truth.even_clicks.assign(static_cast<std::size_t>(3) * (D / 2), 0);
        return a;
    };

    std::uint64_t rounds = static_cast<std::uint64_t>(config.protocol.rounds);
    std::uint64_t batches = (rounds + config.batch_size - 1) / config.batch_size;
    auto batch_rounds = [&](std::uint64_t b) {
        return b + 1 < batches ? config.batch_size : rounds - b * config.batch_size;
    };

    BatchAccum total = make_accum();
    if (config.drift.kind == DriftModel::Kind::random_walk) {
        // the walk is a running sum over rounds; keep it sequential
        double walk = 0.0;
        for (std::uint64_t b = 0; b < batches; ++b)
            run_batch(config, tables, b, batch_rounds(b), total, &walk);
    } else {
        unsigned hw = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
        hw = static_cast<unsigned>(std::min<std::uint64_t>(hw, std::max<std::uint64_t>(batches, 1)));
        std::atomic<std::uint64_t> next{0};
        std::mutex merge_mutex;
        auto work = [&] {
            BatchAccum local = make_accum();
            for (;;) {
                std::uint64_t b = next.fetch_add(1);
                if (b >= batches) break;
                run_batch(config, tables, b, batch_rounds(b), local, nullptr);
            }
            std::lock_guard<std::mutex> lock(merge_mutex);
            total.tallies.merge(local.tallies);
            total.truth.merge(local.truth);
            total.double_clicks += local.double_clicks;
        };
        std::vector<std::thread> pool;
        for (unsigned i = 1; i < hw; ++i) pool.emplace_back(work);
        work();
        for (auto& th : pool) th.join();
    }

    SimResult res;
    res.tallies = std::move(total.tallies);
    res.truth = std::move(total.truth);
    res.double_clicks = total.double_clicks;
    res.seed = config.seed;
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace pmqkd::mc
