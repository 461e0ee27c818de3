#include <doctest.h>

#include <cmath>
#include <random>

#include "pmqkd/chernoff.hpp"

using namespace pmqkd;
using doctest::Approx;

TEST_CASE("g2") {
    CHECK(decoy::g2(0.0) == 0.0);
    CHECK(decoy::g2(1.0) == Approx(std::log(2.0) - 0.5).epsilon(1e-15));
}

TEST_CASE("inverse bound presets and failure terms") {
    auto iv = decoy::chernoff_inverse(1e6, 6.2);
    CHECK(iv.lower == Approx(1e6 - 6200.0).epsilon(1e-12));
    CHECK(iv.upper == Approx(1e6 + 6200.0).epsilon(1e-12));
    // frozen from high-precision evaluation of the two exponential terms
    CHECK(iv.eps_lower == Approx(4.1514261262792436e-9).epsilon(1e-12));
    CHECK(iv.eps_upper == Approx(4.8663341777022908e-9).epsilon(1e-12));
    CHECK(iv.epsilon() == Approx(9.0177603039815344e-9).epsilon(1e-12));
    CHECK(iv.epsilon() < 1e-7);

    SUBCASE("chi = 0 is one-sided") {
        auto z = decoy::chernoff_inverse(0.0, 6.0);
        CHECK(z.lower == 0.0);
        CHECK(z.eps_lower == 0.0);
        CHECK(z.upper == Approx(18.0));
        CHECK(z.eps_upper == Approx(std::exp(-18.0)).epsilon(1e-13));
    }
    SUBCASE("tiny chi clamps the lower edge at zero") {
        auto z = decoy::chernoff_inverse(4.0, 6.0);
        CHECK(z.lower == 0.0);
        CHECK(z.eps_lower == 0.0);
        CHECK(z.upper > 4.0);
    }
}

TEST_CASE("direct bound presets and failure terms") {
    auto iv = decoy::chernoff_direct(1e6, 6.0);
    CHECK(iv.lower == Approx(1e6 - 6000.0).epsilon(1e-12));
    CHECK(iv.upper == Approx(1e6 + 6000.0).epsilon(1e-12));
    // frozen: per side e^{-36e6/(2e6+6e3)}
    CHECK(iv.eps_lower == Approx(1.6072412958954047e-8).epsilon(1e-12));
    CHECK(iv.epsilon() == Approx(3.2144825917908095e-8).epsilon(1e-12));
    auto z = decoy::chernoff_direct(0.0, 6.0);
    CHECK(z.lower == 0.0);
    CHECK(z.upper == 0.0);
    CHECK(z.epsilon() == 0.0);
}

// Monte Carlo coverage oracle: resample binomial counts and check that the
// claimed failure probability upper-bounds the observed miss rate.
TEST_CASE("coverage of both bounds") {
    std::mt19937_64 rng(12345);
    const double n_alpha = 2.0; // wide enough miss rate to make the check real
    struct Point {
        double n, p;
    } points[] = {{1e6, 0.3}, {3e4, 0.01}, {1e5, 0.5}};
    for (auto [n, p] : points) {
        std::binomial_distribution<long long> bin(static_cast<long long>(n), p);
        double mean = n * p;
        int miss_lo = 0, miss_hi = 0;
        double eps_lo = 0.0, eps_hi = 0.0;
        const int reps = 10000;
        for (int r = 0; r < reps; ++r) {
            double chi = static_cast<double>(bin(rng));
            auto iv = decoy::chernoff_inverse(chi, n_alpha);
            if (mean < iv.lower) ++miss_lo;
            if (mean > iv.upper) ++miss_hi;
            eps_lo = std::max(eps_lo, iv.eps_lower);
            eps_hi = std::max(eps_hi, iv.eps_upper);
        }
        CHECK(miss_lo / double(reps) <= eps_lo);
        CHECK(miss_hi / double(reps) <= eps_hi);

        auto direct = decoy::chernoff_direct(mean, n_alpha);
        int miss = 0;
        for (int r = 0; r < reps; ++r) {
            double chi = static_cast<double>(bin(rng));
            if (chi < direct.lower || chi > direct.upper) ++miss;
        }
        CHECK(miss / double(reps) <= direct.epsilon());
    }
}
