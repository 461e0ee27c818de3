#ifndef PMQKD_RATES_HPP
#define PMQKD_RATES_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmqkd/decoy.hpp"
#include "pmqkd/params.hpp"
#include "pmqkd/tally.hpp"

namespace pmqkd::rates {

enum class Protocol { pm_asymptotic, pm_finite, mdi, plob };

const char* protocol_name(Protocol p);
Protocol protocol_from_name(std::string_view name);

struct GroupTerm {
    int j = 0;
    double bit_error = 0.0;
    double contribution = 0.0; // 1 - H(eph) - f H(E_j); counted only if kept
    bool kept = false;
};

struct RatePoint {
    double distance_km = 0.0;
    Protocol protocol = Protocol::plob;
    double rate = 0.0;            // secret bits per pulse
    double eph = 0.0;             // phase-error bound used (PM protocols only)
    double mu = 0.0;              // total signal intensity behind this point
    decoy::Method method = decoy::Method::asymptotic;
    std::vector<GroupTerm> per_group;
};

struct GroupSelection {
    enum class Policy { auto_positive, explicit_list };
    Policy policy = Policy::auto_positive;
    std::vector<int> groups; // explicit_list only
};

/// -log2(1 - eta_total); eta_total is the full Alice-Bob transmittance.
double plob_bound(double eta_total);

/// Modified Bessel I0; power series below x = 8, asymptotic expansion above.
double bessel_i0(double x);

/// Eq.-(10)-style asymptotic PM-QKD rate with per-group accounting.
RatePoint pm_rate_asymptotic(const ChannelParams& ch, const ProtocolParams& p,
                             const GroupSelection& sel = {});

/// Expected-value tallies for the honest channel (no sampling noise).
TallyTable synthetic_tallies(const ChannelParams& ch, const ProtocolParams& p);

/// Finite-size PM rate from a tally table; N_k = sum_J M_s^j [1 - H(Eph) - f H(E^j)].
/// `rounds_sent` is the total protocol round count N the tallies came from.
RatePoint pm_rate_finite_from_tallies(const TallyTable& tallies, const ProtocolParams& p,
                                      double rounds_sent, const GroupSelection& sel = {});

/// Finite-size PM rate on synthetic expected-value tallies at p.rounds.
RatePoint pm_rate_finite(const ChannelParams& ch, const ProtocolParams& p,
                         const GroupSelection& sel = {});

/// MDI-QKD baseline with mu_a = mu_b = mu/2 and symmetric transmittance.
RatePoint mdi_rate(const ChannelParams& ch, const ProtocolParams& p);

struct ScanOptions {
    bool optimize_mu = true;
    double mu_min = 1e-3;
    double mu_max = 2.0;
    double nu_ratio = 0.2;              // nu = nu_ratio * mu while optimizing
    bool plob_include_detector = true;  // eta convention for the linear bound
    int threads = 0;                    // 0 = hardware concurrency
};

struct ScanResult {
    std::vector<RatePoint> points;                  // ordered by (distance, protocol)
    std::map<Protocol, double> first_crossing_km;   // PM protocols that beat PLOB
    std::vector<double> distances;
    ScanOptions options;
};

/// Rate-distance scan; records the first PLOB crossing per PM protocol,
/// refined by bisection to < 1 km.
ScanResult scan_distance(const ChannelParams& ch_template, const ProtocolParams& p,
                         const std::vector<Protocol>& protocols,
                         const std::vector<double>& distances, const ScanOptions& opt = {});

/// CSV with columns (distance_km,protocol,rate,eph,groups_kept,crossing_flag),
/// floats printed with 12 significant digits.
std::string scan_csv(const ScanResult& scan);

/// Best mu in (mu_min, mu_max] for the given protocol at this channel
/// (coarse log grid, then golden-section refinement).
double optimize_mu(const ChannelParams& ch, const ProtocolParams& p, Protocol proto,
                   const ScanOptions& opt = {});

} // namespace pmqkd::rates

#endif
