#include <doctest.h>

#include <cmath>

#include "pmqkd/model.hpp"

using namespace pmqkd;
using doctest::Approx;

namespace {
ChannelParams channel_at(double km, double pd = 1e-8, double e0 = 0.13) {
    ChannelParams ch;
    ch.distance_km = km;
    ch.dark_count_rate = pd;
    ch.misalignment = e0;
    return ch;
}
} // namespace

TEST_CASE("binary entropy") {
    CHECK(model::binary_entropy(0.0) == 0.0);
    CHECK(model::binary_entropy(1.0) == 0.0);
    CHECK(model::binary_entropy(0.5) == Approx(1.0).epsilon(1e-15));
    // frozen: -p log2 p - (1-p) log2 (1-p) at p = 0.11, high-precision eval
    CHECK(model::binary_entropy(0.11) == Approx(0.49991595816452800).epsilon(1e-14));
    CHECK(model::binary_entropy(0.3) == model::binary_entropy(0.7));
    CHECK_THROWS_AS(model::binary_entropy(-0.1), std::domain_error);
    CHECK_THROWS_AS(model::binary_entropy(1.1), std::domain_error);
    CHECK(model::entropy_cost(0.9) == Approx(1.0));
}

TEST_CASE("poisson pmf") {
    CHECK(model::poisson_pmf(1.0, 0) == Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(model::poisson_pmf(0.0, 0) == 1.0);
    CHECK(model::poisson_pmf(0.0, 3) == 0.0);
    CHECK(model::poisson_pmf(0.5, 2) == Approx(0.075816332464079178).epsilon(1e-14));
    double sum = 0.0;
    for (int k = 0; k <= 60; ++k) sum += model::poisson_pmf(2.0, k);
    CHECK(sum == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("discrete randomized pmf") {
    CHECK(model::discrete_randomized_pmf(0.0, 16, 0) == 1.0);
    // frozen: series e^{-1/2}(1/2 + (1/2)^17/17! + ...); the tail beyond the
    // plain Poisson term is ~1e-20 relative at D = 16
    CHECK(model::discrete_randomized_pmf(0.5, 16, 1) ==
          Approx(0.30326532985631671).epsilon(1e-14));
    double sum = 0.0;
    for (int k = 0; k < 16; ++k) sum += model::discrete_randomized_pmf(0.5, 16, k);
    CHECK(sum == Approx(1.0).epsilon(1e-12));
    // D -> infinity limit recovers the Poisson distribution
    for (int k = 0; k <= 3; ++k)
        CHECK(std::fabs(model::discrete_randomized_pmf(0.5, 64, k) -
                        model::poisson_pmf(0.5, k)) < 1e-12);
    // component exceeding one Poisson term: mu = 2, D = 4, k = 1 picks up 2^5/5!
    double expect = 0.0;
    for (int l = 0; l < 20; ++l) expect += model::poisson_pmf(2.0, 4 * l + 1);
    CHECK(model::discrete_randomized_pmf(2.0, 4, 1) == Approx(expect).epsilon(1e-13));
}

TEST_CASE("yield and gain") {
    ChannelParams ch = channel_at(100.0);
    SUBCASE("frozen values") {
        ChannelParams c2 = ch;          // eta = 0.2 * 10^-1 = 0.02 at 100 km
        c2.dark_count_rate = 0.0;
        c2.detector_efficiency = 1.0;
        c2.distance_km = 100.0;         // eta = 0.1
        CHECK(c2.transmittance() == Approx(0.1).epsilon(1e-12));
        CHECK(model::yield_k(c2, 1) == Approx(0.1).epsilon(1e-12));
        ChannelParams c3 = ch;
        c3.distance_km = 0.0;           // eta = 0.2
        CHECK(model::yield_k(c3, 0) == Approx(2e-8).epsilon(1e-9));
        CHECK(model::yield_k(c3, 2) == Approx(0.3600000128).epsilon(1e-12));
        ChannelParams c4 = ch;
        c4.detector_efficiency = 1.0;   // eta = 0.1 at 100 km
        CHECK(model::gain(c4, 0.2) == Approx(0.019801346297218164).epsilon(1e-13));
        ChannelParams c5 = ch;
        c5.dark_count_rate = 0.0;
        CHECK(model::gain(c5, 0.0) == 0.0);
    }
    SUBCASE("gain equals the photon-number series") {
        for (double mu : {0.1, 0.5, 1.0, 2.0}) {
            double sum = 0.0;
            for (int k = 0; k <= 60; ++k)
                sum += model::poisson_pmf(mu, k) * model::yield_k(ch, k);
            CHECK(std::fabs(sum - model::gain(ch, mu)) < 1e-9);
        }
    }
    SUBCASE("monotonicity") {
        for (int k = 0; k < 20; ++k) CHECK(model::yield_k(ch, k + 1) >= model::yield_k(ch, k));
        ChannelParams closer = ch;
        closer.distance_km = 50.0;
        CHECK(model::yield_k(closer, 3) >= model::yield_k(ch, 3));
        for (double mu = 0.0; mu < 2.0; mu += 0.1)
            CHECK(model::gain(ch, mu + 0.1) >= model::gain(ch, mu));
    }
}

TEST_CASE("mismatch error") {
    CHECK(model::mismatch_error(0, 16) == 0.0);
    double s = std::sin(std::acos(-1.0) / 4.0);
    CHECK(model::mismatch_error(4, 16) == Approx(s * s).epsilon(1e-15)); // = 1/2
    CHECK(model::mismatch_error(7, 16) == Approx(0.038060233744356622).epsilon(1e-13));
    // the two branch formulas meet at j_s = D/4
    double left = std::sin(std::acos(-1.0) * 4 / 16.0);
    double right = std::sin(std::acos(-1.0) / 2.0 - std::acos(-1.0) * 4 / 16.0);
    CHECK(left * left == Approx(right * right).epsilon(1e-15));
    // groups j and D/2 - j share the same intrinsic error
    for (int j = 1; j < 8; ++j)
        CHECK(model::mismatch_error(j, 16) == Approx(model::mismatch_error(8 - j, 16)));
    CHECK_THROWS_AS(model::mismatch_error(8, 16), std::domain_error);
    CHECK_THROWS_AS(model::mismatch_error(-1, 16), std::domain_error);
}

TEST_CASE("bit error rate") {
    SUBCASE("no error source") {
        ChannelParams ch = channel_at(100.0, 0.0, 0.0);
        CHECK(model::bit_error_rate(ch, 0.5, 0, 16) == 0.0);
    }
    SUBCASE("clamped at one half") {
        // eta mu ~ 1 maximizes eta mu e^{-eta mu}/Q ~ 0.58 > 1/2
        ChannelParams ch = channel_at(0.0, 0.0, 0.5);
        CHECK(model::bit_error_rate(ch, 5.0, 4, 16) == 0.5);
    }
    SUBCASE("frozen Table-I-like point at 200 km") {
        ChannelParams ch = channel_at(200.0); // eta = 0.002
        CHECK(model::bit_error_rate(ch, 0.5, 0, 16) ==
              Approx(0.12994240828520829).epsilon(1e-12));
    }
    SUBCASE("degenerate gain") {
        ChannelParams ch = channel_at(100.0, 0.0, 0.1);
        CHECK(model::bit_error_rate(ch, 0.0, 0, 16) == 0.5);
    }
    SUBCASE("monotone in misalignment and in group error") {
        ChannelParams ch = channel_at(150.0);
        double prev = -1.0;
        for (double e0 : {0.0, 0.05, 0.1, 0.2, 0.4}) {
            ChannelParams c = ch;
            c.misalignment = e0;
            double e = model::bit_error_rate(c, 0.4, 1, 16);
            CHECK(e >= prev);
            CHECK(e <= 0.5);
            prev = e;
        }
        CHECK(model::bit_error_rate(ch, 0.4, 2, 16) >= model::bit_error_rate(ch, 0.4, 1, 16));
    }
}

TEST_CASE("discrete randomization deviation") {
    CHECK(model::discrete_randomization_deviation(0.0, 16) == 0.0);
    // frozen: P^0.5_16(1) sqrt(0.5^16/17!)
    CHECK(model::discrete_randomization_deviation(0.5, 16) ==
          Approx(6.2812855995073631e-11).epsilon(1e-12));
}

TEST_CASE("photon distributions normalize") {
    auto p = model::poisson_distribution(0.8, 40);
    double s = 0.0;
    for (double x : p.pmf) s += x;
    CHECK(s == Approx(1.0).epsilon(1e-12));
    auto d = model::discrete_randomized_distribution(0.8, 16);
    s = 0.0;
    for (double x : d.pmf) s += x;
    CHECK(s == Approx(1.0).epsilon(1e-12));
}
