#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace dicke {

// Basis convention: qubit 0 is the most significant bit of a basis index and
// the leftmost label of a ket. Bit value 0 is |down>, 1 is |up> (excited).

using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline std::size_t basis_size(int n_qubits) { return std::size_t{1} << n_qubits; }

/// Number of qubits in |up> for a basis index.
int excitation_count(std::size_t basis_index);

struct QubitState {
    ComplexVector amplitudes;
    int n_qubits = 0;

    /// Throws std::invalid_argument unless the norm is 1 within `tol`.
    void validate(double tol = 1e-12) const;
};

struct QubitDensity {
    ComplexMatrix matrix;
    int n_qubits = 0;

    /// Hermitian, unit trace and positive semidefinite within tolerance.
    void validate(double tol = 1e-10) const;
    double purity() const;
};

QubitDensity density_of(const QubitState& state);
QubitDensity maximally_mixed(int n_qubits);

/// Equal superposition of every basis state with m excitations.
QubitState dicke_state(int n, int m);

/// Amplitudes proportional to the couplings on the single-excitation states:
/// the qubit state left behind once one phonon has been fully transferred.
QubitState coupling_weighted_w_state(const std::vector<double>& couplings);

/// (sum Omega_i)^2 / (N sum Omega_i^2).
double w_fidelity_analytic(const std::vector<double>& couplings);

/// Single-qubit R(theta, phi):
///   |down> -> cos(theta/2)|down> - i e^{-i phi} sin(theta/2)|up>
///   |up>   -> -i e^{+i phi} sin(theta/2)|down> + cos(theta/2)|up>
Eigen::Matrix2cd single_qubit_rotation(double theta, double phi);

/// Tensor power of single_qubit_rotation over n qubits.
ComplexMatrix collective_rotation(double theta, double phi, int n);

/// R^dagger rho R, the conjugation used by rotated_parity.
QubitDensity rotated_density(const QubitDensity& rho, double theta, double phi);

/// Expectation of the operator that is +1 on basis states with an even number
/// of excitations and -1 on odd ones.
double parity_expectation(const QubitDensity& rho);

/// tr(R^dagger(theta, phi) rho R(theta, phi) Pi).
double rotated_parity(const QubitDensity& rho, double theta, double phi);

/// Populations grouped by the number of qubits in |down>, index 0..N.
std::vector<double> bright_count_populations(const QubitDensity& rho);

/// rho_{du,ud} + rho_{ud,du} for two qubits.
double odd_coherence(const QubitDensity& rho);

/// 1/2 (odd populations + odd coherences); equals <D(2,1)|rho|D(2,1)>.
double fidelity_two_qubit(const QubitDensity& rho);

/// <D(N,m)|rho|D(N,m)>.
double dicke_fidelity(const QubitDensity& rho, int m);

}  // namespace dicke
