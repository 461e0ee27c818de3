#include "pmqkd/chernoff.hpp"

#include <cmath>
#include <stdexcept>

namespace pmqkd::decoy {

double g2(double x) { return std::log1p(x) - x / (1.0 + x); }

namespace {
// Exponent of the upper-side inverse bound: P(chi <= (1-d) E^U) <= e^{-chi g2u(d)}.
// This is the standard lower-tail exponent rewritten in chi; unlike g2 it does
// not saturate as d -> 1, which matters for small observed counts (a vacuum
// setting sees a few dozen dark-count clicks even at N = 1e12).
double g2_upper(double d) { return d / (1.0 - d) + std::log1p(-d); }
} // namespace

ChernoffInterval chernoff_inverse(double chi, double n_alpha) {
    if (!(chi >= 0.0)) throw std::invalid_argument("chernoff_inverse: chi < 0");
    if (!(n_alpha > 0.0)) throw std::invalid_argument("chernoff_inverse: n_alpha <= 0");
    ChernoffInterval iv;
    iv.value = chi;
    if (chi == 0.0) {
        iv.lower = 0.0;
        iv.eps_lower = 0.0;
        iv.upper = n_alpha * n_alpha / 2.0;          // P(chi = 0) <= e^{-E}
        iv.eps_upper = std::exp(-iv.upper);
        iv.delta_upper = 1.0;
        return iv;
    }
    double half = n_alpha * std::sqrt(chi);
    double lo = chi - half;
    if (lo <= 0.0) {
        iv.lower = 0.0;       // E >= 0 always holds; this side cannot fail
        iv.eps_lower = 0.0;
    } else {
        iv.lower = lo;
        iv.delta_lower = chi / lo - 1.0;
        iv.eps_lower = std::exp(-chi * g2(iv.delta_lower));
    }
    iv.upper = chi + half;
    iv.delta_upper = 1.0 - chi / iv.upper;
    iv.eps_upper = std::exp(-chi * g2_upper(iv.delta_upper));
    return iv;
}

ChernoffInterval chernoff_direct(double expected, double n_alpha) {
    if (!(expected >= 0.0)) throw std::invalid_argument("chernoff_direct: expected < 0");
    if (!(n_alpha > 0.0)) throw std::invalid_argument("chernoff_direct: n_alpha <= 0");
    ChernoffInterval iv;
    iv.value = expected;
    if (expected == 0.0) return iv;                  // degenerate [0,0], eps = 0
    double d = n_alpha / std::sqrt(expected);
    if (d >= 1.0) {
        iv.lower = 0.0;       // chi >= 0 always holds
        iv.eps_lower = 0.0;
        iv.delta_lower = 1.0;
    } else {
        iv.lower = (1.0 - d) * expected;
        iv.delta_lower = d;
        iv.eps_lower = std::exp(-d * d * expected / (2.0 + d));
    }
    iv.upper = (1.0 + d) * expected;
    iv.delta_upper = d;
    iv.eps_upper = std::exp(-d * d * expected / (2.0 + d));
    return iv;
}

} // namespace pmqkd::decoy
