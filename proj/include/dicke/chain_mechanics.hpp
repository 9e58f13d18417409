#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dicke {

/// Form of the axial confinement.
///
/// Electrostatic: every ion of equal charge sees the same curvature
/// m_ref * omega_z^2, so lighter ions oscillate faster when alone.
/// MassScaled: curvature proportional to mass (every ion alone oscillates
/// at omega_z); kept for comparison, it makes the centre-of-mass motion an
/// exact eigenmode for any mass ratio.
enum class AxialTrap { Electrostatic, MassScaled };

/// One linear chain. Masses in atomic mass units, ordered by position.
struct ChainConfig {
    std::vector<double> masses;
    std::size_t reference_index = 0;
    double omega_z = 1.0;        ///< rad/s; single reference ion
    double k_projection = 0.1;   ///< 1/m, or 1/z0_ref in dimensionless mode
    bool dimensionless = true;
    AxialTrap trap = AxialTrap::Electrostatic;

    std::size_t size() const { return masses.size(); }

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;

    /// Length unit (e^2 / (4 pi eps0 m_ref omega_z^2))^(1/3) in metres.
    double length_scale() const;

    /// Zero-point extent sqrt(hbar / (2 m_ref omega_z)) in metres.
    double reference_zero_point() const;
};

/// Where the ancilla sits for a chain of n qubits plus one ancilla.
enum class AncillaPlacement { Center, End };
/// Which slot "adjacent to the center" means when the chain length is even.
enum class OddSlot { Lower, Upper };

std::size_t ancilla_slot(std::size_t n_qubits, AncillaPlacement placement,
                         OddSlot odd_slot = OddSlot::Lower);

/// Chain of n_qubits ions of mass qubit_mass with one ancilla of mass
/// mu * qubit_mass inserted at `slot`. The reference ion is the first qubit.
ChainConfig make_mixed_chain(std::size_t n_qubits, std::size_t slot, double mu,
                             double qubit_mass = 1.0);

struct EquilibriumSolution {
    std::vector<double> positions;  ///< scaled units, strictly increasing
    double residual_gradient_norm = 0.0;
    int iterations = 0;
};

/// Scaled potential sum_i w_i u_i^2 / 2 + sum_{i<j} 1/|u_i - u_j|, with w_i
/// set by the trap form.
double scaled_potential(const ChainConfig& config, const std::vector<double>& u);
Eigen::VectorXd scaled_gradient(const ChainConfig& config, const std::vector<double>& u);
Eigen::MatrixXd scaled_hessian(const ChainConfig& config, const std::vector<double>& u);

/// Damped Newton iteration from a uniformly spaced seed.
/// Throws ConvergenceError after 500 iterations without |grad| < 1e-12.
EquilibriumSolution solve_equilibrium(const ChainConfig& config);

struct ModeSet {
    /// Ascending. rad/s, or units of omega_z in dimensionless mode.
    std::vector<double> frequencies;
    /// Column k is mode k in mass-weighted coordinates; sum of entries > 0.
    Eigen::MatrixXd eigenvectors;
    /// (ion, mode): z_i = b_ik sqrt(hbar / (2 m_i omega_k)). Metres, or units
    /// of the reference ion's zero-point extent in dimensionless mode.
    Eigen::MatrixXd amplitudes;
    /// (ion, mode): k_projection * z_i.
    Eigen::MatrixXd lamb_dicke;
    std::size_t inphase_index = 0;
    bool dimensionless = true;
    /// Human-readable notes, e.g. Lamb-Dicke parameters above 0.3.
    std::vector<std::string> diagnostics;

    std::size_t ions() const { return static_cast<std::size_t>(amplitudes.rows()); }
    std::size_t modes() const { return frequencies.size(); }
    double inphase_frequency() const { return frequencies.at(inphase_index); }
};

inline constexpr double kLambDickeWarning = 0.3;

/// Eigendecomposition of the mass-weighted Hessian.
/// Throws InstabilityError on a non-positive eigenvalue.
ModeSet solve_axial_modes(const ChainConfig& config, const EquilibriumSolution& eq);

inline ModeSet solve_axial_modes(const ChainConfig& config) {
    return solve_axial_modes(config, solve_equilibrium(config));
}

/// Omega_i = carrier_rate * eta_i on the in-phase mode, in the order given.
std::vector<double> coupling_strengths(const ModeSet& modes,
                                       const std::vector<std::size_t>& addressed,
                                       double carrier_rate = 1.0);

}  // namespace dicke
