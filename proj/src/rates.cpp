#include "pmqkd/rates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <thread>

#include "pmqkd/model.hpp"

namespace pmqkd::rates {

using model::binary_entropy;
using model::entropy_cost;

const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::pm_asymptotic: return "pm-asym";
        case Protocol::pm_finite: return "pm-finite";
        case Protocol::mdi: return "mdi";
        case Protocol::plob: return "plob";
    }
    throw std::logic_error("bad Protocol");
}

Protocol protocol_from_name(std::string_view name) {
    if (name == "pm-asym") return Protocol::pm_asymptotic;
    if (name == "pm-finite") return Protocol::pm_finite;
    if (name == "mdi") return Protocol::mdi;
    if (name == "plob") return Protocol::plob;
    throw ConfigError("unknown protocol: " + std::string(name));
}

double plob_bound(double eta_total) {
    if (!(eta_total > 0.0 && eta_total < 1.0))
        throw std::domain_error("plob_bound: eta_total outside (0,1)");
    return -std::log2(1.0 - eta_total);
}

double bessel_i0(double x) {
    x = std::fabs(x);
    // The power series converges everywhere; below x = 40 it is also the
    // only route to 1e-12 relative accuracy (the asymptotic expansion
    // bottoms out near 1e-8 at x = 8).
    if (x < 40.0) {
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 400; ++k) {
            double h = x / (2.0 * k);
            term *= h * h;
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return sum;
    }
    // asymptotic expansion, e^x/sqrt(2 pi x) * sum (2k-1)!!^2 / (k! (8x)^k)
    double inv8x = 1.0 / (8.0 * x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 16; ++k) {
        double odd = 2.0 * k - 1.0;
        double next = term * odd * odd * inv8x / k;
        if (next >= term) break; // divergent tail reached
        term = next;
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return std::exp(x) / std::sqrt(2.0 * std::numbers::pi * x) * sum;
}

namespace {

std::vector<int> resolve_groups(const GroupSelection& sel, int D) {
    if (sel.policy == GroupSelection::Policy::explicit_list) {
        for (int j : sel.groups)
            if (j < 0 || j >= D / 2) throw ConfigError("group index outside [0, D/2)");
        return sel.groups;
    }
    return decoy::all_groups(D);
}

} // namespace

RatePoint pm_rate_asymptotic(const ChannelParams& ch, const ProtocolParams& p,
                             const GroupSelection& sel) {
    ch.validate();
    p.validate();
    RatePoint pt;
    pt.distance_km = ch.distance_km;
    pt.protocol = Protocol::pm_asymptotic;
    pt.mu = p.mu;
    pt.method = decoy::Method::asymptotic;

    double q = model::gain(ch, p.mu);
    double qe;
    try {
        qe = decoy::asymptotic_q_parity(ch, p.mu).q_even;
    } catch (const decoy::DegenerateDataError&) {
        pt.eph = 1.0;
        return pt;
    }
    pt.eph = qe;
    double privacy = entropy_cost(qe);
    std::vector<int> candidates = resolve_groups(sel, p.phase_slices);
    double total = 0.0;
    for (int j : candidates) {
        GroupTerm g;
        g.j = j;
        g.bit_error = model::bit_error_rate(ch, p.mu, j, p.phase_slices);
        g.contribution = 1.0 - privacy - p.ec_efficiency * binary_entropy(g.bit_error);
        g.kept = sel.policy == GroupSelection::Policy::explicit_list || g.contribution > 0.0;
        if (g.kept) total += g.contribution;
        pt.per_group.push_back(g);
    }
    pt.rate = std::max(0.0, 2.0 * q / p.phase_slices * total);
    return pt;
}

TallyTable synthetic_tallies(const ChannelParams& ch, const ProtocolParams& p) {
    ch.validate();
    p.validate();
    TallyTable t(p.phase_slices);
    int groups = p.phase_slices / 2;
    const double probs[3] = {p.prob_vacuum, p.prob_weak, p.prob_signal};
    const double mus[3] = {0.0, p.nu, p.mu};
    for (Intensity a : kAllSettings) {
        int ai = static_cast<int>(a);
        double sent_setting = probs[ai] * probs[ai] * p.rounds;
        double gain = model::gain(ch, mus[ai]);
        for (int j = 0; j < groups; ++j) {
            TallyCell& c = t.at(a, j);
            c.sent = static_cast<std::uint64_t>(std::llround(sent_setting / groups));
            c.clicked = static_cast<std::uint64_t>(
                std::llround(static_cast<double>(c.sent) * gain));
            double e = model::bit_error_rate(ch, mus[ai], j, p.phase_slices);
            c.bit_errors = static_cast<std::uint64_t>(
                std::llround(static_cast<double>(c.clicked) * e));
        }
    }
    return t;
}

RatePoint pm_rate_finite_from_tallies(const TallyTable& tallies, const ProtocolParams& p,
                                      double rounds_sent, const GroupSelection& sel) {
    p.validate();
    if (!(rounds_sent >= 1.0)) throw ConfigError("rounds_sent must be >= 1");
    RatePoint pt;
    pt.protocol = Protocol::pm_finite;
    pt.mu = p.mu;
    pt.method = decoy::Method::finite_chernoff;
    int groups = tallies.groups();

    std::vector<int> candidates = resolve_groups(sel, tallies.phase_slices());
    // Observed per-group QBER of the signal setting; groups with no clicks
    // cannot contribute key.
    std::vector<double> qber(groups, 0.5);
    for (int j = 0; j < groups; ++j) {
        const TallyCell& c = tallies.at(Intensity::signal, j);
        if (c.clicked > 0)
            qber[j] = static_cast<double>(c.bit_errors) / static_cast<double>(c.clicked);
    }

    std::vector<int> kept = candidates;
    kept.erase(std::remove_if(kept.begin(), kept.end(),
                              [&](int j) { return tallies.at(Intensity::signal, j).clicked == 0; }),
               kept.end());
    const bool auto_select = sel.policy == GroupSelection::Policy::auto_positive;

    decoy::DecoyEstimate est;
    double total = 0.0;
    // Dropping a group changes E^ph only through the Step II statistics, so
    // the selection stabilizes after a few passes; the kept set only shrinks.
    for (int pass = 0; pass <= groups; ++pass) {
        if (kept.empty()) {
            pt.eph = 1.0;
            pt.rate = 0.0;
            return pt;
        }
        est = decoy::finite_size_estimate(tallies, p, kept);
        double privacy = entropy_cost(est.eph_upper);
        total = 0.0;
        std::vector<int> next;
        for (int j : kept) {
            double br = 1.0 - privacy - p.ec_efficiency * binary_entropy(std::min(qber[j], 0.5));
            if (!auto_select || br > 0.0) {
                next.push_back(j);
                total += br * static_cast<double>(tallies.at(Intensity::signal, j).clicked);
            }
        }
        if (next == kept) break;
        kept = std::move(next);
    }

    pt.eph = est.eph_upper;
    double privacy = entropy_cost(est.eph_upper);
    for (int j : candidates) {
        GroupTerm g;
        g.j = j;
        g.bit_error = qber[j];
        g.contribution = 1.0 - privacy - p.ec_efficiency * binary_entropy(std::min(qber[j], 0.5));
        g.kept = std::find(kept.begin(), kept.end(), j) != kept.end();
        pt.per_group.push_back(g);
    }
    pt.rate = std::max(0.0, total / rounds_sent);
    return pt;
}

RatePoint pm_rate_finite(const ChannelParams& ch, const ProtocolParams& p,
                         const GroupSelection& sel) {
    TallyTable t = synthetic_tallies(ch, p);
    RatePoint pt = pm_rate_finite_from_tallies(t, p, p.rounds, sel);
    pt.distance_km = ch.distance_km;
    return pt;
}

RatePoint mdi_rate(const ChannelParams& ch, const ProtocolParams& p) {
    ch.validate();
    p.validate();
    double eta = ch.transmittance();
    double pd = ch.dark_count_rate;
    double ed = ch.misalignment;
    double ma = p.mu / 2.0, mb = p.mu / 2.0;
    double ea = eta, eb = eta;
    const double e0 = 0.5; // vacuum contributes random bits

    double y11 = (1.0 - pd) * (1.0 - pd) *
                 (ea * eb / 2.0 + (2.0 * ea + 2.0 * eb - 3.0 * ea * eb) * pd +
                  4.0 * (1.0 - ea) * (1.0 - eb) * pd * pd);
    double q11 = ma * mb * std::exp(-ma - mb) * y11;
    // e11 Y11 = e0 Y11 - (e0 - ed)(1 - pd^2) ea eb / 2
    double e11 = y11 > 0.0
                     ? (e0 * y11 - (e0 - ed) * (1.0 - pd * pd) * ea * eb / 2.0) / y11
                     : e0;
    e11 = std::clamp(e11, 0.0, 0.5);

    double mu_prime = ea * ma + eb * mb;
    double x = 0.5 * std::sqrt(ea * ma * eb * mb);
    double qc = 2.0 * (1.0 - pd) * (1.0 - pd) * std::exp(-mu_prime / 2.0) *
                (1.0 - (1.0 - pd) * std::exp(-ea * ma / 2.0)) *
                (1.0 - (1.0 - pd) * std::exp(-eb * mb / 2.0));
    double qe = 2.0 * pd * (1.0 - pd) * (1.0 - pd) * std::exp(-mu_prime / 2.0) *
                (bessel_i0(2.0 * x) - (1.0 - pd) * std::exp(-mu_prime / 2.0));
    double q_rect = qc + qe;
    double e_rect = q_rect > 0.0 ? (ed * qc + (1.0 - ed) * qe) / q_rect : e0;

    RatePoint pt;
    pt.distance_km = ch.distance_km;
    pt.protocol = Protocol::mdi;
    pt.mu = p.mu;
    pt.eph = e11;
    double r = 0.5 * (q11 * (1.0 - entropy_cost(e11)) -
                      p.ec_efficiency * q_rect * binary_entropy(std::min(e_rect, 0.5)));
    pt.rate = std::max(0.0, r);
    return pt;
}

namespace {

RatePoint rate_for(const ChannelParams& ch, const ProtocolParams& p, Protocol proto) {
    switch (proto) {
        case Protocol::pm_asymptotic: return pm_rate_asymptotic(ch, p);
        case Protocol::pm_finite: return pm_rate_finite(ch, p);
        case Protocol::mdi: return mdi_rate(ch, p);
        case Protocol::plob: {
            RatePoint pt;
            pt.distance_km = ch.distance_km;
            pt.protocol = Protocol::plob;
            return pt; // filled by caller (needs the eta convention)
        }
    }
    throw std::logic_error("bad Protocol");
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > tol) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    return (lo + hi) / 2.0;
}

ProtocolParams with_mu(const ProtocolParams& p, double mu, double nu_ratio) {
    ProtocolParams q = p;
    q.mu = mu;
    q.nu = nu_ratio * mu;
    return q;
}

} // namespace

double optimize_mu(const ChannelParams& ch, const ProtocolParams& p, Protocol proto,
                   const ScanOptions& opt) {
    auto rate_at_mu = [&](double mu) {
        try {
            return rate_for(ch, with_mu(p, mu, opt.nu_ratio), proto).rate;
        } catch (const decoy::EpsilonBudgetError&) {
            throw;
        } catch (const std::exception&) {
            return 0.0;
        }
    };
    // Coarse log grid guards the single-peak assumption before refining.
    double best_mu = opt.mu_min, best = -1.0;
    int n = 28;
    for (int i = 0; i <= n; ++i) {
        double mu = opt.mu_min * std::pow(opt.mu_max / opt.mu_min, double(i) / n);
        double r = rate_at_mu(mu);
        if (r > best) {
            best = r;
            best_mu = mu;
        }
    }
    if (best <= 0.0) return best_mu;
    double step = std::pow(opt.mu_max / opt.mu_min, 1.0 / n);
    double lo = best_mu / step, hi = std::min(opt.mu_max, best_mu * step);
    return golden_max(rate_at_mu, lo, hi, 1e-4 * best_mu);
}

namespace {

RatePoint optimized_point(const ChannelParams& ch, const ProtocolParams& p, Protocol proto,
                          const ScanOptions& opt) {
    if (proto == Protocol::plob) {
        RatePoint pt;
        pt.distance_km = ch.distance_km;
        pt.protocol = Protocol::plob;
        double eta = ch.end_to_end_transmittance(opt.plob_include_detector);
        pt.rate = eta < 1.0 ? plob_bound(eta) : 0.0;
        return pt;
    }
    ProtocolParams q = p;
    if (opt.optimize_mu) q = with_mu(p, optimize_mu(ch, p, proto, opt), opt.nu_ratio);
    try {
        return rate_for(ch, q, proto);
    } catch (const decoy::DegenerateDataError&) {
        // no clicks at this point of the scan: no key, not an error
        RatePoint pt;
        pt.distance_km = ch.distance_km;
        pt.protocol = proto;
        pt.mu = q.mu;
        pt.eph = 1.0;
        pt.method = proto == Protocol::pm_finite ? decoy::Method::finite_chernoff
                                                 : decoy::Method::asymptotic;
        return pt;
    }
}

} // namespace

ScanResult scan_distance(const ChannelParams& ch_template, const ProtocolParams& p,
                         const std::vector<Protocol>& protocols,
                         const std::vector<double>& distances, const ScanOptions& opt) {
    for (std::size_t i = 1; i < distances.size(); ++i)
        if (distances[i] <= distances[i - 1])
            throw ConfigError("distances must be sorted strictly ascending");
    ScanResult out;
    out.distances = distances;
    out.options = opt;
    if (protocols.empty() || distances.empty()) return out;

    out.points.resize(distances.size() * protocols.size());
    unsigned hw = opt.threads > 0 ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    std::atomic<std::size_t> cursor{0};
    auto work = [&] {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= distances.size()) return;
            ChannelParams ch = ch_template;
            ch.distance_km = distances[i];
            for (std::size_t k = 0; k < protocols.size(); ++k)
                out.points[i * protocols.size() + k] = optimized_point(ch, p, protocols[k], opt);
        }
    };
    for (unsigned t = 1; t < hw; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    // First PLOB crossing per PM protocol, bisected below 1 km.
    auto margin = [&](Protocol proto, double L) {
        ChannelParams ch = ch_template;
        ch.distance_km = L;
        double bound = plob_bound(ch.end_to_end_transmittance(opt.plob_include_detector));
        return optimized_point(ch, p, proto, opt).rate - bound;
    };
    for (Protocol proto : protocols) {
        if (proto != Protocol::pm_asymptotic && proto != Protocol::pm_finite) continue;
        for (std::size_t i = 1; i < distances.size(); ++i) {
            double m0 = margin(proto, distances[i - 1]);
            double m1 = margin(proto, distances[i]);
            if (m0 < 0.0 && m1 >= 0.0) {
                double lo = distances[i - 1], hi = distances[i];
                while (hi - lo > 0.5) {
                    double mid = (lo + hi) / 2.0;
                    (margin(proto, mid) >= 0.0 ? hi : lo) = mid;
                }
                out.first_crossing_km[proto] = (lo + hi) / 2.0;
                break;
            }
        }
    }
    return out;
}

std::string scan_csv(const ScanResult& scan) {
    std::string out = "distance_km,protocol,rate,eph,groups_kept,crossing_flag\n";
    char buf[160];
    for (const RatePoint& pt : scan.points) {
        std::string groups;
        for (const GroupTerm& g : pt.per_group)
            if (g.kept) {
                if (!groups.empty()) groups += ';';
                groups += std::to_string(g.j);
            }
        bool pm = pt.protocol == Protocol::pm_asymptotic || pt.protocol == Protocol::pm_finite;
        auto it = scan.first_crossing_km.find(pt.protocol);
        int crossed = it != scan.first_crossing_km.end() && pt.distance_km >= it->second ? 1 : 0;
        std::snprintf(buf, sizeof buf, "%.12g,%s,%.12g,", pt.distance_km,
                      protocol_name(pt.protocol), pt.rate);
        out += buf;
        if (pm) {
            std::snprintf(buf, sizeof buf, "%.12g", pt.eph);
            out += buf;
        }
        out += ',';
        out += groups;
        std::snprintf(buf, sizeof buf, ",%d\n", crossed);
        out += buf;
    }
    return out;
}

} // namespace pmqkd::rates
