#include "dicke/sideband_sim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "dicke/constants.hpp"
#include "dicke/errors.hpp"

namespace dicke {

namespace {

using cd = std::complex<double>;

void require_compatible(const JointState& state, const JointSpace& space) {
    if (state.space.n_qubits != space.n_qubits || state.space.fock_cutoff != space.fock_cutoff ||
        static_cast<std::size_t>(state.amplitudes.size()) != space.dimension())
        throw std::invalid_argument("state and operator live in different joint spaces");
}

/// F(t) = sum_n |<D| (x) <n| psi(t)>|^2 evaluated in the energy basis.
class FidelityTrace {
public:
    FidelityTrace(const Propagator& prop, const JointState& psi0, int m) {
        const JointSpace& space = prop.space();
        const Eigen::MatrixXd& v = prop.eigenvectors();
        energies_ = prop.energies();
        coeffs_ = v.transpose().cast<cd>() * psi0.amplitudes;

        const QubitState target = dicke_state(space.n_qubits, m);
        const auto levels = static_cast<Eigen::Index>(space.fock_levels());
        overlap_ = ComplexMatrix::Zero(levels, v.cols());
        for (std::size_t b = 0; b < basis_size(space.n_qubits); ++b) {
            const cd amp = std::conj(target.amplitudes[static_cast<Eigen::Index>(b)]);
            if (amp == cd(0.0)) continue;
            for (Eigen::Index n = 0; n < levels; ++n)
                overlap_.row(n) += amp * v.row(static_cast<Eigen::Index>(space.index(b, static_cast<int>(n)))).cast<cd>();
        }
    }

    double operator()(double t) const {
        ComplexVector phased(coeffs_.size());
        for (Eigen::Index k = 0; k < coeffs_.size(); ++k)
            phased[k] = coeffs_[k] * std::polar(1.0, -energies_[k] * t);
        return (overlap_ * phased).squaredNorm();
    }

private:
    Eigen::VectorXd energies_;
    ComplexVector coeffs_;
    ComplexMatrix overlap_;
};

SweepRow sweep_row(const SweepTemplate& base, double mu, int m, const SearchOptions& options) {
    SweepRow row;
    row.mu = mu;
    try {
        const PulseResult r = first_max_fidelity(base.build(mu), base.qubit_indices(), m, options);
        row.t_star = r.duration;
        row.fidelity = r.fidelity;
        row.phonon_populations = r.phonon_distribution;
        row.reduced_density = r.reduced_density;
    } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "mu=" << mu << ": " << e.what();
        row.error = msg.str();
    }
    return row;
}

}  // namespace

void JointSpace::validate() const {
    if (n_qubits < 1 || n_qubits > 12) throw std::invalid_argument("qubit count must be in [1, 12]");
    if (fock_cutoff < 0) throw std::invalid_argument("fock cutoff must be non-negative");
}

JointState initial_state(const JointSpace& space, int m) {
    space.validate();
    if (m < 0 || m > space.fock_cutoff) throw std::invalid_argument("phonon number exceeds the Fock cutoff");
    JointState s{ComplexVector::Zero(static_cast<Eigen::Index>(space.dimension())), space};
    s.amplitudes[static_cast<Eigen::Index>(space.index(0, m))] = 1.0;
    return s;
}

Hamiltonian rsb_hamiltonian(const JointSpace& space, const std::vector<double>& couplings) {
    space.validate();
    if (couplings.size() != static_cast<std::size_t>(space.n_qubits))
        throw std::invalid_argument("one coupling per qubit required");
    for (double c : couplings)
        if (!std::isfinite(c)) throw std::invalid_argument("couplings must be finite");

    const auto dim = static_cast<Eigen::Index>(space.dimension());
    Hamiltonian h{space, Eigen::MatrixXd::Zero(dim, dim)};
    const int n = space.n_qubits;
    for (std::size_t b = 0; b < basis_size(n); ++b) {
        for (int q = 0; q < n; ++q) {
            const std::size_t bit = std::size_t{1} << (n - 1 - q);
            if (b & bit) continue;
            // sigma_q^+ a : |down_q, p> -> sqrt(p) |up_q, p-1>
            for (int p = 1; p <= space.fock_cutoff; ++p) {
                const auto from = static_cast<Eigen::Index>(space.index(b, p));
                const auto to = static_cast<Eigen::Index>(space.index(b | bit, p - 1));
                const double elem = 0.5 * couplings[static_cast<std::size_t>(q)] * std::sqrt(static_cast<double>(p));
                h.matrix(to, from) += elem;
                h.matrix(from, to) += elem;
            }
        }
    }
    return h;
}

Eigen::VectorXd excitation_number(const JointSpace& space) {
    Eigen::VectorXd diag(static_cast<Eigen::Index>(space.dimension()));
    for (std::size_t b = 0; b < basis_size(space.n_qubits); ++b)
        for (int p = 0; p <= space.fock_cutoff; ++p)
            diag[static_cast<Eigen::Index>(space.index(b, p))] = excitation_count(b) + p;
    return diag;
}

Propagator::Propagator(const Hamiltonian& h) : space_(h.space) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix);
    if (solver.info() != Eigen::Success) throw std::runtime_error("Hamiltonian eigensolver failed");
    energies_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
}

JointState Propagator::evolve(const JointState& state, double t) const {
    require_compatible(state, space_);
    if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be non-negative");
    const ComplexVector coeffs = eigenvectors_.transpose().cast<cd>() * state.amplitudes;
    ComplexVector phased(coeffs.size());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) phased[k] = coeffs[k] * std::polar(1.0, -energies_[k] * t);
    return {eigenvectors_.cast<cd>() * phased, space_};
}

JointState evolve(const JointState& state, const Hamiltonian& h, double t) {
    return Propagator(h).evolve(state, t);
}

QubitDensity reduce_to_qubits(const JointState& state) {
    const JointSpace& space = state.space;
    const auto qdim = static_cast<Eigen::Index>(basis_size(space.n_qubits));
    const auto levels = static_cast<Eigen::Index>(space.fock_levels());
    // Row-major view: rows are qubit basis states, columns phonon numbers.
    const Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(
        state.amplitudes.data(), qdim, levels);
    return {psi * psi.adjoint(), space.n_qubits};
}

std::vector<double> phonon_distribution(const JointState& state) {
    std::vector<double> p(state.space.fock_levels(), 0.0);
    for (std::size_t b = 0; b < basis_size(state.space.n_qubits); ++b)
        for (int n = 0; n <= state.space.fock_cutoff; ++n)
            p[static_cast<std::size_t>(n)] += std::norm(state.amplitudes[static_cast<Eigen::Index>(state.space.index(b, n))]);
    return p;
}

PulseResult first_max_fidelity(const std::vector<double>& couplings, int m, const SearchOptions& options) {
    if (m < 1) throw std::invalid_argument("need at least one phonon");
    if (options.grid_divisions < 2 || options.maxima < 1 || !(options.time_tolerance > 0.0))
        throw std::invalid_argument("invalid search options");
    const double omega_eff = std::sqrt(std::inner_product(couplings.begin(), couplings.end(), couplings.begin(), 0.0));
    if (!(omega_eff > 0.0)) throw std::invalid_argument("all couplings are zero");

    // Excitation number is conserved, so cutoff m is exact.
    const JointSpace space{static_cast<int>(couplings.size()), m};
    const Propagator prop(rsb_hamiltonian(space, couplings));
    const JointState psi0 = initial_state(space, m);
    const FidelityTrace fidelity(prop, psi0, m);

    const double dt = constants::pi / (options.grid_divisions * omega_eff);
    const double t_cap = options.cap_half_periods * constants::pi / omega_eff;

    double best_t = 0.0, best_f = -1.0;
    int found = 0;
    double f_prev = fidelity(0.0);
    double f_cur = fidelity(dt);
    for (int k = 1; found < options.maxima; ++k) {
        const double t = k * dt;
        if (t > t_cap) break;
        const double f_next = fidelity(t + dt);
        if (f_cur > f_prev && f_cur >= f_next) {
            const auto [t_opt, f_opt] = golden_section_maximize(fidelity, t - dt, t + dt, options.time_tolerance);
            if (f_opt > best_f) {
                best_f = f_opt;
                best_t = t_opt;
            }
            ++found;
        }
        f_prev = f_cur;
        f_cur = f_next;
    }
    if (found == 0) {
        std::ostringstream msg;
        msg << "no fidelity maximum before t = " << t_cap << " / Omega_0";
        throw SearchError(msg.str());
    }

    const JointState psi = prop.evolve(psi0, best_t);
    PulseResult result;
    result.duration = best_t;
    result.reduced_density = reduce_to_qubits(psi);
    result.fidelity = std::clamp(dicke_fidelity(result.reduced_density, m), 0.0, 1.0);
    result.phonon_distribution = phonon_distribution(psi);
    return result;
}

PulseResult first_max_fidelity(const ChainConfig& config, const std::vector<std::size_t>& addressed, int m,
                               const SearchOptions& options) {
    const ModeSet modes = solve_axial_modes(config);
    return first_max_fidelity(coupling_strengths(modes, addressed, 1.0), m, options);
}

std::size_t SweepTemplate::ancilla_index() const {
    if (explicit_slot) {
        if (*explicit_slot > n_qubits) throw std::invalid_argument("ancilla slot out of range");
        return *explicit_slot;
    }
    return ancilla_slot(n_qubits, placement, odd_slot);
}

std::vector<std::size_t> SweepTemplate::qubit_indices() const {
    const std::size_t anc = ancilla_index();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i <= n_qubits; ++i)
        if (i != anc) idx.push_back(i);
    return idx;
}

ChainConfig SweepTemplate::build(double mu) const {
    ChainConfig c = make_mixed_chain(n_qubits, ancilla_index(), mu, qubit_mass);
    c.omega_z = omega_z;
    c.k_projection = k_projection;
    c.dimensionless = dimensionless;
    c.trap = trap;
    c.validate();
    return c;
}

std::vector<double> mass_ratio_grid(double start, double stop, int points, bool logarithmic) {
    if (points < 1) throw std::invalid_argument("grid needs at least one point");
    if (!(start > 0.0) || !(stop > 0.0)) throw std::invalid_argument("mass ratios must be positive");
    std::vector<double> grid(static_cast<std::size_t>(points));
    if (points == 1) {
        grid[0] = start;
        return grid;
    }
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / (points - 1);
        grid[static_cast<std::size_t>(i)] = logarithmic ? start * std::pow(stop / start, f) : start + f * (stop - start);
    }
    grid.back() = stop;
    return grid;
}

std::vector<SweepRow> fidelity_vs_mass_ratio(const SweepTemplate& base, const std::vector<double>& mu_grid, int m,
                                             const SearchOptions& options) {
    std::vector<SweepRow> rows(mu_grid.size());
    const auto n = static_cast<std::ptrdiff_t>(mu_grid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        rows[static_cast<std::size_t>(i)] = sweep_row(base, mu_grid[static_cast<std::size_t>(i)], m, options);
    return rows;
}

std::vector<SweepRow> fidelity_vs_mass_ratio_serial(const SweepTemplate& base, const std::vector<double>& mu_grid,
                                                    int m, const SearchOptions& options) {
    std::vector<SweepRow> rows;
    rows.reserve(mu_grid.size());
    for (double mu : mu_grid) rows.push_back(sweep_row(base, mu, m, options));
    return rows;
}

}  // namespace dicke
