#include "pmqkd/decoy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pmqkd/model.hpp"

namespace pmqkd::decoy {

std::vector<int> all_groups(int phase_slices) {
    std::vector<int> j(phase_slices / 2);
    for (std::size_t i = 0; i < j.size(); ++i) j[i] = static_cast<int>(i);
    return j;
}

QParity asymptotic_q_parity(const ChannelParams& ch, double mu_t, int k_max) {
    if (!(mu_t > 0.0)) throw std::invalid_argument("asymptotic_q_parity: mu_t <= 0");
    double q = model::gain(ch, mu_t);
    if (q <= 0.0) throw DegenerateDataError("asymptotic_q_parity: zero gain");
    double s_odd = 0.0;
    for (int k = 1; k <= k_max; k += 2)
        s_odd += model::poisson_pmf(mu_t, k) * model::yield_k(ch, k);
    QParity out;
    out.q_odd = s_odd / q;
    out.q_even = 1.0 - out.q_odd; // truncation tail counts against privacy
    return out;
}

double q_fraction(const ChannelParams& ch, double mu_t, int k) {
    double q = model::gain(ch, mu_t);
    if (q <= 0.0) throw DegenerateDataError("q_fraction: zero gain");
    return model::poisson_pmf(mu_t, k) * model::yield_k(ch, k) / q;
}

namespace {
double y1_lower_raw(const GainBounds& q_signal, const GainBounds& q_weak,
                    const GainBounds& q_vacuum, double mu, double nu) {
    if (!(mu > nu && nu > 0.0))
        throw std::invalid_argument("estimate_y1_lower: need mu > nu > 0");
    return mu / (mu * nu - nu * nu) *
           (q_weak.lower * std::exp(nu) -
            q_signal.upper * std::exp(mu) * nu * nu / (mu * mu) -
            (mu * mu - nu * nu) / (mu * mu) * q_vacuum.upper);
}
} // namespace

double estimate_y1_lower(const GainBounds& q_signal, const GainBounds& q_weak,
                         const GainBounds& q_vacuum, double mu, double nu) {
    return std::clamp(y1_lower_raw(q_signal, q_weak, q_vacuum, mu, nu), 0.0, 1.0);
}

namespace {

struct StepOne {
    double y1_lower;
    double eps;
    bool clamped;
};

StepOne step_one(double m_vac, double m_w, double m_s, double n_vac, double n_w, double n_s,
                 const ProtocolParams& p) {
    ChernoffInterval iv_vac = chernoff_inverse(m_vac, p.n_alpha);
    ChernoffInterval iv_w = chernoff_inverse(m_w, p.n_alpha);
    ChernoffInterval iv_s = chernoff_inverse(m_s, p.n_alpha);
    GainBounds qs{iv_s.lower / n_s, iv_s.upper / n_s};
    GainBounds qw{iv_w.lower / n_w, iv_w.upper / n_w};
    GainBounds qv{iv_vac.lower / n_vac, iv_vac.upper / n_vac};
    StepOne out;
    double raw = y1_lower_raw(qs, qw, qv, p.mu, p.nu);
    out.y1_lower = std::clamp(raw, 0.0, 1.0);
    out.clamped = raw < 0.0 || raw > 1.0;
    out.eps = iv_vac.epsilon() + iv_w.epsilon() + iv_s.epsilon();
    return out;
}

} // namespace

DecoyEstimate finite_size_estimate(const TallyTable& tallies, const ProtocolParams& params,
                                   const std::vector<int>& group_set) {
    params.validate();
    tallies.validate();
    if (group_set.empty()) throw std::invalid_argument("finite_size_estimate: empty group set");
    if (tallies.phase_slices() != params.phase_slices)
        throw std::invalid_argument("finite_size_estimate: phase_slices mismatch with tallies");

    double n_vac = static_cast<double>(tallies.sent(Intensity::vacuum));
    double n_w = static_cast<double>(tallies.sent(Intensity::weak));
    double n_s = static_cast<double>(tallies.sent(Intensity::signal));
    if (n_vac == 0.0 || n_w == 0.0 || n_s == 0.0)
        throw std::invalid_argument(
            "finite_size_estimate: all three intensity settings must have sent rounds");

    double m_sj = static_cast<double>(tallies.clicked(Intensity::signal, group_set));
    if (m_sj == 0.0)
        throw DegenerateDataError("finite_size_estimate: no clicks in the kept signal groups");

    // Step I: expectation bounds on the per-setting click totals, gains, Y1*.
    StepOne s1 = step_one(static_cast<double>(tallies.clicked(Intensity::vacuum)),
                          static_cast<double>(tallies.clicked(Intensity::weak)),
                          static_cast<double>(tallies.clicked(Intensity::signal)), n_vac, n_w,
                          n_s, params);

    // M1^L through the expected k = 1 emission count; P^vac(1) = 0.
    double n1_inf = model::poisson_pmf(params.nu, 1) * n_w + model::poisson_pmf(params.mu, 1) * n_s;
    double m1_lower = s1.y1_lower * n1_inf;

    // Step II: the single-photon clicks land in (signal, J) by i.i.d. sampling.
    double n_sj = static_cast<double>(tallies.sent(Intensity::signal, group_set));
    double p_sj_given_1 = model::poisson_pmf(params.mu, 1) * n_sj / n1_inf;
    ChernoffInterval iv2 = chernoff_direct(p_sj_given_1 * m1_lower, params.n_alpha);

    DecoyEstimate est;
    est.method = Method::finite_chernoff;
    est.y1_lower = s1.y1_lower;
    double q1 = iv2.lower / m_sj;
    est.clamped = s1.clamped || q1 > 1.0;
    est.q1_lower = std::clamp(q1, 0.0, 1.0);
    est.eph_upper = std::clamp(1.0 - est.q1_lower, 0.0, 1.0);
    est.failure_probability = s1.eps + iv2.epsilon();
    if (est.failure_probability > params.epsilon) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "finite_size_estimate: eps_eph %.3e exceeds the epsilon budget %.3e; "
                      "raise n_alpha",
                      est.failure_probability, params.epsilon);
        throw EpsilonBudgetError(msg);
    }
    return est;
}

DecoyEstimate asymptotic_estimate(const ChannelParams& ch, const ProtocolParams& params) {
    params.validate();
    ch.validate();
    double qs = model::gain(ch, params.mu);
    double qw = model::gain(ch, params.nu);
    double qv = model::gain(ch, 0.0);
    if (qs <= 0.0) throw DegenerateDataError("asymptotic_estimate: zero signal gain");
    DecoyEstimate est;
    est.method = Method::asymptotic;
    est.y1_lower = estimate_y1_lower({qs, qs}, {qw, qw}, {qv, qv}, params.mu, params.nu);
    double q1 = est.y1_lower * model::poisson_pmf(params.mu, 1) / qs;
    est.clamped = q1 > 1.0;
    est.q1_lower = std::clamp(q1, 0.0, 1.0);
    est.eph_upper = std::clamp(1.0 - est.q1_lower, 0.0, 1.0);
    est.failure_probability = 0.0;
    return est;
}

} // namespace pmqkd::decoy
