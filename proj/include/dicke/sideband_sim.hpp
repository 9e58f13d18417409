#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dicke/chain_mechanics.hpp"
#include "dicke/dicke_core.hpp"

namespace dicke {

/// N qubits times Fock states 0..fock_cutoff. Index = qubit_basis * (cutoff+1) + n.
struct JointSpace {
    int n_qubits = 1;
    int fock_cutoff = 1;

    void validate() const;
    std::size_t fock_levels() const { return static_cast<std::size_t>(fock_cutoff) + 1; }
    std::size_t dimension() const { return basis_size(n_qubits) * fock_levels(); }
    std::size_t index(std::size_t qubit_basis, int phonons) const {
        return qubit_basis * fock_levels() + static_cast<std::size_t>(phonons);
    }
};

struct JointState {
    ComplexVector amplitudes;
    JointSpace space;
};

/// Resonant red-sideband Hamiltonian in the Lamb-Dicke limit,
///   H = sum_i (Omega_i / 2) (sigma_i^+ a + sigma_i^- a^dagger),
/// real symmetric in the product basis.
struct Hamiltonian {
    JointSpace space;
    Eigen::MatrixXd matrix;
};

/// |down...down> (x) |m>.
JointState initial_state(const JointSpace& space, int m);

Hamiltonian rsb_hamiltonian(const JointSpace& space, const std::vector<double>& couplings);

/// Diagonal of a^dagger a + sum_i |up><up|_i.
Eigen::VectorXd excitation_number(const JointSpace& space);

/// exp(-i H t) from a cached eigendecomposition.
class Propagator {
public:
    explicit Propagator(const Hamiltonian& h);

    JointState evolve(const JointState& state, double t) const;
    const JointSpace& space() const { return space_; }
    const Eigen::VectorXd& energies() const { return energies_; }
    const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

private:
    JointSpace space_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd eigenvectors_;
};

/// One-shot propagation; builds a Propagator.
JointState evolve(const JointState& state, const Hamiltonian& h, double t);

/// Partial trace over the motion.
QubitDensity reduce_to_qubits(const JointState& state);

std::vector<double> phonon_distribution(const JointState& state);

struct PulseResult {
    double duration = 0.0;  ///< units of 1/Omega_0
    double fidelity = 0.0;
    QubitDensity reduced_density;
    std::vector<double> phonon_distribution;
};

struct SearchOptions {
    int grid_divisions = 50;     ///< coarse step pi / (grid_divisions * Omega')
    double time_tolerance = 1e-6;
    double cap_half_periods = 20.0;  ///< give up after cap_half_periods * pi / Omega'
    int maxima = 1;              ///< best of the first `maxima` local maxima
};

/// Golden-section search for a maximum of f on [a, b], to bracket width `tol`.
template <class F>
std::pair<double, double> golden_section_maximize(F&& f, double a, double b, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double t = 0.5 * (a + b);
    return {t, f(t)};
}

/// First local maximum of <D(N,m)|rho(t)|D(N,m)> starting from |down...down>|m>.
/// Throws SearchError if no maximum appears before the cap.
PulseResult first_max_fidelity(const std::vector<double>& couplings, int m,
                               const SearchOptions& options = {});

/// Same, with couplings from the chain's in-phase mode at unit carrier rate.
PulseResult first_max_fidelity(const ChainConfig& config, const std::vector<std::size_t>& addressed,
                               int m, const SearchOptions& options = {});

/// Chain family parameterised by the ancilla-to-qubit mass ratio.
struct SweepTemplate {
    std::size_t n_qubits = 2;
    AncillaPlacement placement = AncillaPlacement::Center;
    OddSlot odd_slot = OddSlot::Lower;
    std::optional<std::size_t> explicit_slot;  ///< overrides placement
    double qubit_mass = 1.0;
    double omega_z = 1.0;
    double k_projection = 0.1;
    bool dimensionless = true;
    AxialTrap trap = AxialTrap::Electrostatic;

    std::size_t ancilla_index() const;
    std::vector<std::size_t> qubit_indices() const;
    ChainConfig build(double mu) const;
};

struct SweepRow {
    double mu = 0.0;
    double t_star = 0.0;
    double fidelity = 0.0;
    std::vector<double> phonon_populations;
    std::optional<QubitDensity> reduced_density;
    std::string error;  ///< empty on success

    bool ok() const { return error.empty(); }
};

std::vector<double> mass_ratio_grid(double start, double stop, int points, bool logarithmic);

/// OpenMP over grid points; rows come back in grid order.
std::vector<SweepRow> fidelity_vs_mass_ratio(const SweepTemplate& base, const std::vector<double>& mu_grid,
                                             int m, const SearchOptions& options = {});

/// Serial reference for fidelity_vs_mass_ratio.
std::vector<SweepRow> fidelity_vs_mass_ratio_serial(const SweepTemplate& base,
                                                    const std::vector<double>& mu_grid, int m,
                                                    const SearchOptions& options = {});

}  // namespace dicke
