#include <doctest.h>

#include <cmath>

#include "pmqkd/model.hpp"
#include "pmqkd/rates.hpp"

using namespace pmqkd;
using doctest::Approx;

namespace {
ChannelParams table1_channel(double km, double e0 = 0.13) {
    ChannelParams ch;
    ch.distance_km = km;
    ch.misalignment = e0;
    return ch;
}

ProtocolParams protocol(double mu, double nu) {
    ProtocolParams p;
    p.mu = mu;
    p.nu = nu;
    return p;
}

// Independent transcription of the MDI-QKD appendix formulas, long double,
// structured differently from the library path.
long double mdi_oracle(long double eta, long double pd, long double ed, long double mu,
                       long double f) {
    auto H = [](long double x) -> long double {
        if (x <= 0.0L || x >= 1.0L) return 0.0L;
        return (-x * std::log(x) - (1.0L - x) * std::log(1.0L - x)) / std::log(2.0L);
    };
    long double ma = mu / 2.0L, mb = mu / 2.0L;
    long double y11 =
        (1.0L - pd) * (1.0L - pd) *
        (eta * eta / 2.0L + (4.0L * eta - 3.0L * eta * eta) * pd +
         4.0L * (1.0L - eta) * (1.0L - eta) * pd * pd);
    long double q11 = ma * mb * std::exp(-ma - mb) * y11;
    long double e11 = (0.5L * y11 - (0.5L - ed) * (1.0L - pd * pd) * eta * eta / 2.0L) / y11;
    long double mup = eta * mu;
    long double x = 0.5L * std::sqrt(eta * ma * eta * mb);
    long double i0 = 1.0L, term = 1.0L;
    for (int k = 1; k < 60; ++k) {
        term *= (x / k) * (x / k); // I0(2x) = sum (x^2)^k/(k!)^2
        i0 += term;
    }
    long double qc = 2.0L * (1.0L - pd) * (1.0L - pd) * std::exp(-mup / 2.0L) *
                     (1.0L - (1.0L - pd) * std::exp(-eta * ma / 2.0L)) *
                     (1.0L - (1.0L - pd) * std::exp(-eta * mb / 2.0L));
    long double qe = 2.0L * pd * (1.0L - pd) * (1.0L - pd) * std::exp(-mup / 2.0L) *
                     (i0 - (1.0L - pd) * std::exp(-mup / 2.0L));
    long double er = (ed * qc + (1.0L - ed) * qe) / (qc + qe);
    return 0.5L * (q11 * (1.0L - H(e11)) - f * (qc + qe) * H(er));
}
} // namespace

TEST_CASE("plob bound") {
    CHECK(rates::plob_bound(0.5) == Approx(1.0).epsilon(1e-15));
    CHECK(rates::plob_bound(0.99) == Approx(6.6438561897747247).epsilon(1e-14));
    for (double eta : {1e-3, 1e-4, 1e-5})
        CHECK(rates::plob_bound(eta) == Approx(eta / std::log(2.0)).epsilon(0.01));
    CHECK_THROWS_AS(rates::plob_bound(0.0), std::domain_error);
    CHECK_THROWS_AS(rates::plob_bound(1.0), std::domain_error);
}

TEST_CASE("bessel i0 against the standard library") {
    for (double x : {0.0, 0.5, 2.0, 7.9, 8.1, 15.0, 39.9, 40.1, 80.0})
        CHECK(rates::bessel_i0(x) == Approx(std::cyl_bessel_i(0.0, x)).epsilon(1e-12));
}

TEST_CASE("asymptotic PM rate") {
    SUBCASE("frozen point at 330 km") {
        auto pt = rates::pm_rate_asymptotic(table1_channel(330.0), protocol(0.029, 0.005));
        CHECK(pt.rate == Approx(1.0223590177743233e-7).epsilon(1e-11));
        CHECK(pt.eph == Approx(0.034621823299564983).epsilon(1e-11));
    }
    SUBCASE("single-group reduction") {
        ChannelParams ch = table1_channel(300.0);
        ProtocolParams p = protocol(0.03, 0.006);
        rates::GroupSelection sel;
        sel.policy = rates::GroupSelection::Policy::explicit_list;
        sel.groups = {0};
        auto pt = rates::pm_rate_asymptotic(ch, p, sel);
        double q = model::gain(ch, p.mu);
        double qe = decoy::asymptotic_q_parity(ch, p.mu).q_even;
        double e0 = model::bit_error_rate(ch, p.mu, 0, p.phase_slices);
        double expect = 2.0 * q / p.phase_slices *
                        (1.0 - model::binary_entropy(qe) -
                         p.ec_efficiency * model::binary_entropy(e0));
        CHECK(pt.rate == Approx(expect).epsilon(1e-13));
        // explicit single group can only lower-bound the auto selection
        CHECK(pt.rate <= rates::pm_rate_asymptotic(ch, p).rate + 1e-18);
    }
    SUBCASE("positive rate with near-half bit errors at vanishing intensity") {
        // mu -> 0 and p_d = 0 drive q_even -> 0, so privacy costs nothing and
        // even a 45% QBER still distills with ideal error correction
        ChannelParams ch = table1_channel(50.0, 0.45);
        ch.dark_count_rate = 0.0;
        ProtocolParams p = protocol(1e-4, 2e-5);
        p.ec_efficiency = 1.0;
        auto pt = rates::pm_rate_asymptotic(ch, p);
        bool some_high_error_group_kept = false;
        for (const auto& g : pt.per_group)
            if (g.kept && g.bit_error > 0.44) some_high_error_group_kept = true;
        CHECK(pt.rate > 0.0);
        CHECK(some_high_error_group_kept);
        // with realistic f, far groups sit at E ~ 1/2 and drop out while the
        // aligned groups keep the rate nonnegative
        ChannelParams ch2 = table1_channel(50.0, 0.01);
        ch2.dark_count_rate = 0.0;
        auto pt2 = rates::pm_rate_asymptotic(ch2, protocol(1e-4, 2e-5));
        CHECK(pt2.rate > 0.0);
        CHECK(pt2.per_group[4].bit_error > 0.48);
        CHECK_FALSE(pt2.per_group[4].kept);
    }
    SUBCASE("auto selection keeps exactly the positive brackets") {
        auto pt = rates::pm_rate_asymptotic(table1_channel(320.0), protocol(0.03, 0.006));
        for (const auto& g : pt.per_group) {
            if (g.kept) CHECK(g.contribution > 0.0);
            else CHECK(g.contribution <= 0.0);
        }
    }
}

TEST_CASE("finite PM rate approaches the asymptotic rate at small mu") {
    ChannelParams ch = table1_channel(100.0, 0.03);
    ProtocolParams p = protocol(0.01, 0.004);
    p.rounds = 1e14;
    p.n_alpha = 3.0;
    p.epsilon = 0.5;
    auto fin = rates::pm_rate_finite(ch, p);
    auto asym = rates::pm_rate_asymptotic(ch, p);
    // key comes from matched-signal rounds only, a prob_signal^2 share of
    // the pulses; normalize that overhead out before comparing
    double overhead = p.prob_signal * p.prob_signal;
    CHECK(fin.rate > 0.0);
    CHECK(fin.rate <= asym.rate * overhead * (1.0 + 1e-9));
    CHECK(std::fabs(fin.rate / overhead - asym.rate) / asym.rate < 0.01);
}

TEST_CASE("MDI baseline") {
    SUBCASE("noiseless sanity") {
        ChannelParams ch;
        ch.distance_km = 0.0;
        ch.detector_efficiency = 1.0;
        ch.dark_count_rate = 0.0;
        ch.misalignment = 0.0;
        auto pt = rates::mdi_rate(ch, protocol(0.01, 0.002));
        CHECK(pt.eph == 0.0); // e11 vanishes without noise
        CHECK(pt.rate > 0.0);
    }
    SUBCASE("frozen Table-I point at 100 km, cross-checked against an oracle") {
        ChannelParams ch = table1_channel(100.0, 0.03);
        auto pt = rates::mdi_rate(ch, protocol(0.8, 0.16));
        CHECK(pt.rate == Approx(2.4107499939411100e-6).epsilon(1e-11));
        double oracle = static_cast<double>(
            mdi_oracle(0.02L, 1e-8L, 0.03L, 0.8L, 1.1L));
        CHECK(pt.rate == Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("distance scan") {
    ChannelParams ch = table1_channel(0.0);
    ProtocolParams p = protocol(0.1, 0.02);
    SUBCASE("empty protocol list") {
        auto res = rates::scan_distance(ch, p, {}, {10.0, 20.0});
        CHECK(res.points.empty());
    }
    SUBCASE("unsorted distances rejected") {
        CHECK_THROWS_AS(
            rates::scan_distance(ch, p, {rates::Protocol::plob}, {20.0, 10.0}),
            ConfigError);
    }
    SUBCASE("rates nonnegative and nonincreasing, kept groups shrink") {
        std::vector<double> distances;
        for (double d = 20.0; d <= 420.0; d += 25.0) distances.push_back(d);
        auto res = rates::scan_distance(
            ch, p, {rates::Protocol::pm_asymptotic, rates::Protocol::mdi, rates::Protocol::plob},
            distances);
        double prev_pm = 1e9, prev_mdi = 1e9, prev_plob = 1e9;
        std::size_t prev_kept = 99;
        bool kink_seen = false;
        for (std::size_t i = 0; i < distances.size(); ++i) {
            const auto& pm = res.points[i * 3 + 0];
            const auto& mdi = res.points[i * 3 + 1];
            const auto& plob = res.points[i * 3 + 2];
            CHECK(pm.rate >= 0.0);
            CHECK(pm.rate <= prev_pm * (1.0 + 1e-9));
            CHECK(mdi.rate <= prev_mdi * (1.0 + 1e-9));
            CHECK(plob.rate <= prev_plob);
            std::size_t kept = 0;
            for (const auto& g : pm.per_group) kept += g.kept ? 1 : 0;
            if (kept < prev_kept && prev_kept != 99) kink_seen = true;
            CHECK((prev_kept == 99 || kept <= prev_kept));
            prev_kept = kept;
            prev_pm = pm.rate;
            prev_mdi = mdi.rate;
            prev_plob = plob.rate;
        }
        // unaligned-group contributions hit zero somewhere along the curve
        CHECK(kink_seen);
    }
    SUBCASE("csv format") {
        auto res = rates::scan_distance(ch, p, {rates::Protocol::plob}, {100.0});
        std::string csv = rates::scan_csv(res);
        CHECK(csv.find("distance_km,protocol,rate,eph,groups_kept,crossing_flag\n") == 0);
        CHECK(csv.find("100,plob,") != std::string::npos);
    }
}

TEST_CASE("crossing is stable under grid refinement") {
    ChannelParams ch = table1_channel(0.0);
    ProtocolParams p = protocol(0.1, 0.02);
    auto cross = [&](double step) {
        std::vector<double> d;
        for (double x = 296.0; x <= 324.0; x += step) d.push_back(x);
        auto res = rates::scan_distance(
            ch, p, {rates::Protocol::pm_asymptotic, rates::Protocol::plob}, d);
        auto it = res.first_crossing_km.find(rates::Protocol::pm_asymptotic);
        REQUIRE(it != res.first_crossing_km.end());
        return it->second;
    };
    CHECK(std::fabs(cross(4.0) - cross(1.0)) < 1.0);
}

TEST_CASE("discrete-randomization deviation is negligible at operating intensities") {
    // xi_D(mu)/Q stays tiny for the per-distance optimized mu, which is the
    // regime the decoy analysis actually runs in
    ProtocolParams p = protocol(0.1, 0.02);
    for (double km : {50.0, 150.0, 300.0, 450.0, 500.0}) {
        ChannelParams ch = table1_channel(km);
        double mu = rates::optimize_mu(ch, p, rates::Protocol::pm_asymptotic);
        double ratio = model::discrete_randomization_deviation(mu, 16) / model::gain(ch, mu);
        CHECK(ratio < 1e-6);
    }
}
