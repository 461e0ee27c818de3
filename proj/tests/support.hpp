#ifndef PMQKD_TESTS_SUPPORT_HPP
#define PMQKD_TESTS_SUPPORT_HPP

// Statistical helpers shared by the unit and acceptance suites. Kept
// independent of the library code they check.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace testsupport {

// Regularized upper incomplete gamma Q(a, x): series for x < a+1, Lentz
// continued fraction otherwise.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
    if (x == 0.0) return 1.0;
    double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a, c = 1e308, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi2_sf(double chi2, int dof) { return gamma_q(dof / 2.0, chi2 / 2.0); }

// log C(n,k) p^k (1-p)^(n-k)
inline double binom_log_pmf(double n, double k, double p) {
    if (p <= 0.0) return k == 0 ? 0.0 : -1e308;
    if (p >= 1.0) return k == n ? 0.0 : -1e308;
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
           k * std::log(p) + (n - k) * std::log1p(-p);
}

// Two-sided tail probability of Binomial(n, p) at observation k: normal
// approximation when the expected counts are large, exact summation when
// they are small (so near-empty cells are judged fairly).
inline double binom_two_sided_tail(double n, double k, double p) {
    double m = n * p, var = n * p * (1.0 - p);
    if (m >= 100.0 && n - m >= 100.0) {
        double z = std::fabs(k - m) / std::sqrt(var);
        return std::erfc(z / std::sqrt(2.0));
    }
    // exact tail on the observed side, doubled (capped at 1)
    double tail = 0.0;
    if (k >= m) {
        for (double i = k; i <= n; ++i) {
            double t = std::exp(binom_log_pmf(n, i, p));
            tail += t;
            if (t < 1e-18 * tail && i > m + 10) break;
        }
    } else {
        for (double i = k; i >= 0.0; --i) tail += std::exp(binom_log_pmf(n, i, p));
    }
    return std::min(1.0, 2.0 * tail);
}

// 5-sigma-equivalent agreement check: two-sided tail above 2 Phi(-nsigma).
inline bool count_within_sigma(double n, double observed, double p, double nsigma) {
    if (n == 0.0) return true;
    double alpha = std::erfc(nsigma / std::sqrt(2.0));
    return binom_two_sided_tail(n, observed, p) >= alpha;
}

// Homogeneity chi-square over paired count cells (per-cell two-proportion
// score statistic, summed); cells with fewer than min_total successes
// combined are skipped.
struct PairedCounts {
    double n1, k1, n2, k2;
};

inline double homogeneity_pvalue(const std::vector<PairedCounts>& cells, double min_total = 10.0) {
    double stat = 0.0;
    int dof = 0;
    for (const auto& c : cells) {
        if (c.k1 + c.k2 < min_total) continue;
        if (c.n1 == 0.0 || c.n2 == 0.0) continue;
        double pooled = (c.k1 + c.k2) / (c.n1 + c.n2);
        if (pooled <= 0.0 || pooled >= 1.0) continue;
        double dvar = pooled * (1.0 - pooled) * (1.0 / c.n1 + 1.0 / c.n2);
        double diff = c.k1 / c.n1 - c.k2 / c.n2;
        stat += diff * diff / dvar;
        ++dof;
    }
    if (dof == 0) return 1.0;
    return chi2_sf(stat, dof);
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace testsupport

#endif
