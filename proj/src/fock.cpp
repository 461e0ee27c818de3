#include "pmqkd/fock.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "pmqkd/model.hpp"

namespace pmqkd::fock {

FockVector coherent_pair(Complex alpha_a, Complex alpha_b, int k_max) {
    if (k_max < 0) throw std::invalid_argument("coherent_pair: k_max < 0");
    FockVector psi(k_max);
    double pref = std::exp(-0.5 * (std::norm(alpha_a) + std::norm(alpha_b)));
    // amp(m,n) = pref * alpha_a^m alpha_b^n / sqrt(m! n!), built by recurrence
    std::vector<Complex> col(k_max + 1);
    col[0] = pref;
    for (int m = 1; m <= k_max; ++m) col[m] = col[m - 1] * alpha_a / std::sqrt(double(m));
    for (int m = 0; m <= k_max; ++m) {
        Complex amp = col[m];
        psi.at(m, 0) = amp;
        for (int n = 1; n + m <= k_max; ++n) {
            amp *= alpha_b / std::sqrt(double(n));
            psi.at(m, n) = amp;
        }
    }
    return psi;
}

ParityDecomposition parity_decompose(const FockVector& state) {
    ParityDecomposition out{FockVector(state.k_max()), FockVector(state.k_max()), 0.0, 0.0};
    for (int k = 0; k <= state.k_max(); ++k) {
        bool odd = k % 2 == 1;
        for (int m = 0; m <= k; ++m) {
            Complex a = state.at(m, k - m);
            (odd ? out.odd : out.even).at(m, k - m) = a;
        }
    }
    out.p_odd = out.odd.squared_norm();
    out.p_even = out.even.squared_norm();
    return out;
}

FockVector k_photon_component(double delta, int k, int k_max) {
    if (k < 0 || k > k_max) throw std::invalid_argument("k_photon_component: need 0 <= k <= k_max");
    FockVector psi(k_max);
    for (int m = 0; m <= k; ++m) {
        // sqrt(C(k,m)/2^k) e^{i delta (k-m)}
        double log_amp = 0.5 * (std::lgamma(k + 1.0) - std::lgamma(m + 1.0) -
                                std::lgamma(k - m + 1.0) - k * std::log(2.0));
        psi.at(m, k - m) = std::polar(std::exp(log_amp), delta * (k - m));
    }
    return psi;
}

FockVector discrete_pseudo_fock(double mu, int D, int k, double delta, int k_max) {
    if (D < 2) throw std::invalid_argument("discrete_pseudo_fock: D < 2");
    if (k < 0 || k >= D) throw std::invalid_argument("discrete_pseudo_fock: need 0 <= k < D");
    FockVector psi(k_max);
    double pd = model::discrete_randomized_pmf(mu, D, k);
    if (pd == 0.0) {
        if (k == 0) psi.at(0, 0) = 1.0; // vacuum
        return psi;
    }
    for (int l = 0; l * D + k <= k_max; ++l) {
        int kk = l * D + k;
        // e^{-mu/2} mu^{kk/2} / sqrt(kk!) / sqrt(P^mu_D(k))
        double w = std::exp(0.5 * (kk * std::log(mu) - std::lgamma(kk + 1.0)) - mu / 2.0) /
                   std::sqrt(pd);
        FockVector comp = k_photon_component(delta, kk, k_max);
        psi.amplitudes() += w * comp.amplitudes();
        if (mu == 0.0) break;
    }
    if (psi.leakage() > 1e-10)
        std::clog << "discrete_pseudo_fock: truncation leakage " << psi.leakage() << " at k_max "
                  << k_max << "\n";
    return psi;
}

double fidelity(const FockVector& a, const FockVector& b) {
    if (a.k_max() != b.k_max()) throw std::invalid_argument("fidelity: k_max mismatch");
    return std::abs(a.amplitudes().dot(b.amplitudes()));
}

double fidelity(const Operator& rho, const Operator& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw std::invalid_argument("fidelity: dimension mismatch");
    // symmetrize first to absorb floating-point drift
    Operator r = 0.5 * (rho + rho.adjoint());
    Operator s = 0.5 * (sigma + sigma.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> es(r);
    Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) < -1e-9) throw std::invalid_argument("fidelity: input not PSD");
        if (ev(i) < 0.0) ev(i) = 0.0;
    }
    Operator root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
                    es.eigenvectors().adjoint();
    Operator inner = root * s * root;
    inner = 0.5 * (inner + inner.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> es2(inner);
    double f = 0.0;
    for (int i = 0; i < es2.eigenvalues().size(); ++i)
        f += std::sqrt(std::max(0.0, es2.eigenvalues()(i)));
    return f;
}

Operator parity_projector(bool odd, int k_max) {
    int dim = basis_dim(k_max);
    Operator p = Operator::Zero(dim, dim);
    for (int k = 0; k <= k_max; ++k)
        if ((k % 2 == 1) == odd)
            for (int m = 0; m <= k; ++m) {
                int i = basis_index(m, k - m);
                p(i, i) = 1.0;
            }
    return p;
}

Operator mode_phase_unitary(bool on_a, bool on_b, int k_max) {
    int dim = basis_dim(k_max);
    Operator u = Operator::Zero(dim, dim);
    for (int k = 0; k <= k_max; ++k)
        for (int m = 0; m <= k; ++m) {
            int n = k - m;
            int sign = ((on_a ? m : 0) + (on_b ? n : 0)) % 2 == 0 ? 1 : -1;
            int i = basis_index(m, n);
            u(i, i) = sign;
        }
    return u;
}

Operator density(const FockVector& psi) {
    return psi.amplitudes() * psi.amplitudes().adjoint();
}

Operator twirl(const Operator& rho) {
    int dim = static_cast<int>(rho.rows());
    int k_max = 0;
    while (basis_dim(k_max) < dim) ++k_max;
    Operator u = mode_phase_unitary(true, true, k_max);
    return 0.5 * (rho + u * rho * u.adjoint());
}

Operator odd_coherent_density(double mu_total, int k_max) {
    double arm = std::sqrt(mu_total / 2.0);
    Operator rho = Operator::Zero(basis_dim(k_max), basis_dim(k_max));
    for (double delta : {0.0, std::acos(-1.0)}) {
        FockVector pair = coherent_pair(arm, std::polar(arm, delta), k_max);
        ParityDecomposition pd = parity_decompose(pair);
        if (pd.p_odd <= 0.0) continue;
        FockVector odd = pd.odd;
        odd.amplitudes() /= std::sqrt(pd.p_odd);
        rho += 0.5 * density(odd);
    }
    return rho;
}

} // namespace pmqkd::fock
