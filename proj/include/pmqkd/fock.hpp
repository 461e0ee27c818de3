#ifndef PMQKD_FOCK_HPP
#define PMQKD_FOCK_HPP

#include <Eigen/Dense>
#include <complex>

// Two-mode truncated Fock space: just enough machinery to verify the
// encoding-symmetry claims numerically (parity projectors, twirling,
// phase-randomized coherent pairs, pseudo-Fock states, Uhlmann fidelity).

namespace pmqkd::fock {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;

/// Basis over |m,n> with m + n <= k_max, ordered by total photon number.
inline int basis_dim(int k_max) { return (k_max + 1) * (k_max + 2) / 2; }
inline int basis_index(int m, int n) {
    int k = m + n;
    return k * (k + 1) / 2 + m;
}

class FockVector {
  public:
    explicit FockVector(int k_max)
        : k_max_(k_max), amp_(Eigen::VectorXcd::Zero(basis_dim(k_max))) {}

    int k_max() const { return k_max_; }
    Eigen::VectorXcd& amplitudes() { return amp_; }
    const Eigen::VectorXcd& amplitudes() const { return amp_; }

    Complex& at(int m, int n) { return amp_(basis_index(m, n)); }
    Complex at(int m, int n) const { return amp_(basis_index(m, n)); }

    double squared_norm() const { return amp_.squaredNorm(); }
    /// Truncation leakage 1 - ||psi||^2; reported alongside derived values.
    double leakage() const { return 1.0 - squared_norm(); }

  private:
    int k_max_;
    Eigen::VectorXcd amp_;
};

/// |alpha_a>_A (x) |alpha_b>_B, truncated at total photon number k_max.
FockVector coherent_pair(Complex alpha_a, Complex alpha_b, int k_max);

struct ParityDecomposition {
    FockVector odd;
    FockVector even;
    double p_odd;
    double p_even;
};

/// Split by (m+n) parity; p_odd + p_even = ||state||^2.
ParityDecomposition parity_decompose(const FockVector& state);

/// |k-bar^delta> = (a^dag + e^{i delta} b^dag)^k / sqrt(2^k k!) |00>.
FockVector k_photon_component(double delta, int k, int k_max);

/// |lambda-bar_k^delta>: the k-th pseudo-Fock state of D-slice discrete
/// randomization at total intensity mu.
FockVector discrete_pseudo_fock(double mu, int D, int k, double delta, int k_max);

/// Pure-state fidelity |<a|b>|.
double fidelity(const FockVector& a, const FockVector& b);

/// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)). Rejects inputs with
/// an eigenvalue below -1e-9; smaller negative drift is clipped to zero.
double fidelity(const Operator& rho, const Operator& sigma);

/// Projector onto the odd (even) total-photon-number subspace.
Operator parity_projector(bool odd, int k_max);

/// e^{i pi a^dag a} on the selected modes; on_a && on_b gives U_A (x) U_B.
Operator mode_phase_unitary(bool on_a, bool on_b, int k_max);

Operator density(const FockVector& psi);

/// (rho + U rho U^dag)/2 with U = U_A (x) U_B.
Operator twirl(const Operator& rho);

/// Normalized odd part of the 0/pi-randomized coherent pair with arm
/// intensity mu_total/2 (the state whose yield the decoy bound tracks).
Operator odd_coherent_density(double mu_total, int k_max);

} // namespace pmqkd::fock

#endif
