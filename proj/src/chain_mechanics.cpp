#include "dicke/chain_mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "dicke/constants.hpp"
#include "dicke/errors.hpp"

namespace dicke {

namespace {

constexpr int kNewtonCap = 500;
constexpr double kGradientTolerance = 1e-12;
// Below this the gradient is at the rounding floor; stalling there is success.
constexpr double kGradientFloor = 1e-10;

std::vector<double> trap_weights(const ChainConfig& config) {
    std::vector<double> w(config.size(), 1.0);
    if (config.trap == AxialTrap::MassScaled) {
        const double m_ref = config.masses[config.reference_index];
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = config.masses[i] / m_ref;
    }
    return w;
}

bool strictly_increasing(const std::vector<double>& u) {
    return std::adjacent_find(u.begin(), u.end(), std::greater_equal<>()) == u.end();
}

}  // namespace

void ChainConfig::validate() const {
    if (masses.size() < 2)
        throw std::invalid_argument("chain needs at least 2 ions");
    for (double m : masses)
        if (!(m > 0.0) || !std::isfinite(m))
            throw std::invalid_argument("ion masses must be positive");
    if (reference_index >= masses.size())
        throw std::invalid_argument("reference_index out of range");
    if (!(omega_z > 0.0) || !std::isfinite(omega_z))
        throw std::invalid_argument("omega_z must be positive");
    if (!(k_projection >= 0.0) || !std::isfinite(k_projection))
        throw std::invalid_argument("k_projection must be non-negative");
}

double ChainConfig::length_scale() const {
    using namespace constants;
    const double m = masses.at(reference_index) * atomic_mass_unit;
    const double k = elementary_charge * elementary_charge / (4.0 * pi * vacuum_permittivity);
    return std::cbrt(k / (m * omega_z * omega_z));
}

double ChainConfig::reference_zero_point() const {
    using namespace constants;
    const double m = masses.at(reference_index) * atomic_mass_unit;
    return std::sqrt(hbar / (2.0 * m * omega_z));
}

std::size_t ancilla_slot(std::size_t n_qubits, AncillaPlacement placement, OddSlot odd_slot) {
    if (n_qubits < 1) throw std::invalid_argument("need at least one qubit ion");
    if (placement == AncillaPlacement::End) return n_qubits;
    if (n_qubits % 2 == 0) return n_qubits / 2;
    // N odd: N+1 ions, two slots straddle the centre.
    return odd_slot == OddSlot::Lower ? (n_qubits - 1) / 2 : (n_qubits + 1) / 2;
}

ChainConfig make_mixed_chain(std::size_t n_qubits, std::size_t slot, double mu, double qubit_mass) {
    if (slot > n_qubits) throw std::invalid_argument("ancilla slot out of range");
    if (!(mu > 0.0)) throw std::invalid_argument("mass ratio must be positive");
    ChainConfig config;
    config.masses.assign(n_qubits, qubit_mass);
    config.masses.insert(config.masses.begin() + static_cast<std::ptrdiff_t>(slot), mu * qubit_mass);
    config.reference_index = slot == 0 ? 1 : 0;
    return config;
}

double scaled_potential(const ChainConfig& config, const std::vector<double>& u) {
    const auto w = trap_weights(config);
    double v = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        v += 0.5 * w[i] * u[i] * u[i];
        for (std::size_t j = i + 1; j < u.size(); ++j) v += 1.0 / std::abs(u[i] - u[j]);
    }
    return v;
}

Eigen::VectorXd scaled_gradient(const ChainConfig& config, const std::vector<double>& u) {
    const auto w = trap_weights(config);
    const auto n = static_cast<Eigen::Index>(u.size());
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double gi = w[i] * u[i];
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = u[i] - u[j];
            gi -= std::copysign(1.0 / (d * d), d);
        }
        g[i] = gi;
    }
    return g;
}

Eigen::MatrixXd scaled_hessian(const ChainConfig& config, const std::vector<double>& u) {
    const auto w = trap_weights(config);
    const auto n = static_cast<Eigen::Index>(u.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) = w[i];
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double c = 2.0 / std::pow(std::abs(u[i] - u[j]), 3);
            h(i, i) += c;
            h(i, j) = -c;
        }
    }
    return h;
}

EquilibriumSolution solve_equilibrium(const ChainConfig& config) {
    config.validate();
    const std::size_t n = config.size();

    // Uniform seed with an empirical spacing for equal ions.
    const double spacing = 2.018 / std::pow(static_cast<double>(n), 0.559);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i)
        u[i] = (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) * spacing;

    EquilibriumSolution sol;
    double energy = scaled_potential(config, u);
    Eigen::VectorXd g = scaled_gradient(config, u);
    double gnorm = g.norm();

    for (int it = 0; it < kNewtonCap; ++it) {
        sol.iterations = it;
        if (gnorm < kGradientTolerance) break;

        const Eigen::MatrixXd h = scaled_hessian(config, u);
        const Eigen::VectorXd step = h.ldlt().solve(-g);

        double alpha = 1.0;
        std::vector<double> trial(n);
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings, alpha *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + alpha * step[static_cast<Eigen::Index>(i)];
            if (!strictly_increasing(trial)) continue;
            const double e = scaled_potential(config, trial);
            if (e <= energy || scaled_gradient(config, trial).norm() < gnorm) {
                accepted = true;
                energy = e;
                break;
            }
        }
        if (!accepted) {
            if (gnorm < kGradientFloor) break;
            throw ConvergenceError("equilibrium line search stalled", gnorm);
        }
        const double previous = gnorm;
        u = trial;
        g = scaled_gradient(config, u);
        gnorm = g.norm();
        if (gnorm >= previous && gnorm < kGradientFloor) break;
    }

    if (!(gnorm < kGradientFloor)) {
        std::ostringstream msg;
        msg << "equilibrium did not converge in " << kNewtonCap << " iterations (|grad| = " << gnorm << ")";
        throw ConvergenceError(msg.str(), gnorm);
    }
    sol.positions = std::move(u);
    sol.residual_gradient_norm = gnorm;
    return sol;
}

ModeSet solve_axial_modes(const ChainConfig& config, const EquilibriumSolution& eq) {
    config.validate();
    const std::size_t n = config.size();
    if (eq.positions.size() != n)
        throw std::invalid_argument("equilibrium does not match chain length");

    const double m_ref = config.masses[config.reference_index];
    Eigen::VectorXd inv_sqrt_mu(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        inv_sqrt_mu[static_cast<Eigen::Index>(i)] = 1.0 / std::sqrt(config.masses[i] / m_ref);

    // Curvature is in units of m_ref omega_z^2, so eigenvalues are (omega/omega_z)^2.
    const Eigen::MatrixXd hessian = scaled_hessian(config, eq.positions);
    const Eigen::MatrixXd weighted = inv_sqrt_mu.asDiagonal() * hessian * inv_sqrt_mu.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(weighted);
    if (solver.info() != Eigen::Success)
        throw InstabilityError("mode eigensolver failed");

    ModeSet modes;
    modes.dimensionless = config.dimensionless;
    modes.eigenvectors = solver.eigenvectors();
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    const auto cols = modes.eigenvectors.cols();

    for (Eigen::Index k = 0; k < cols; ++k) {
        if (!(lambda[k] > 0.0)) {
            std::ostringstream msg;
            msg << "unstable crystal: mode " << k << " has curvature " << lambda[k];
            throw InstabilityError(msg.str());
        }
        if (modes.eigenvectors.col(k).sum() < 0.0) modes.eigenvectors.col(k) *= -1.0;
        const double nu = std::sqrt(lambda[k]);
        modes.frequencies.push_back(config.dimensionless ? nu : nu * config.omega_z);
    }

    bool found = false;
    for (Eigen::Index k = 0; k < cols && !found; ++k) {
        if ((modes.eigenvectors.col(k).array() > 0.0).all()) {
            modes.inphase_index = static_cast<std::size_t>(k);
            found = true;
        }
    }
    if (!found) throw InstabilityError("no axial mode with all components of one sign");

    modes.amplitudes.resize(static_cast<Eigen::Index>(n), cols);
    const double z0 = config.dimensionless ? 1.0 : config.reference_zero_point();
    for (Eigen::Index k = 0; k < cols; ++k) {
        const double nu = std::sqrt(lambda[k]);
        for (Eigen::Index i = 0; i < modes.amplitudes.rows(); ++i) {
            // sqrt(hbar / (2 m_i omega_k)) = z0_ref * sqrt(m_ref/m_i) / sqrt(omega_k/omega_z)
            modes.amplitudes(i, k) = modes.eigenvectors(i, k) * z0 * inv_sqrt_mu[i] / std::sqrt(nu);
        }
    }
    modes.lamb_dicke = config.k_projection * modes.amplitudes;

    const Eigen::Index ip = static_cast<Eigen::Index>(modes.inphase_index);
    for (Eigen::Index i = 0; i < modes.lamb_dicke.rows(); ++i) {
        if (std::abs(modes.lamb_dicke(i, ip)) > kLambDickeWarning) {
            std::ostringstream msg;
            msg << "ion " << i << ": Lamb-Dicke parameter " << modes.lamb_dicke(i, ip)
                << " exceeds " << kLambDickeWarning << "; linear sideband coupling is approximate";
            modes.diagnostics.push_back(msg.str());
        }
    }
    return modes;
}

std::vector<double> coupling_strengths(const ModeSet& modes, const std::vector<std::size_t>& addressed,
                                       double carrier_rate) {
    if (addressed.empty()) throw std::invalid_argument("addressed ion set is empty");
    std::vector<std::size_t> sorted = addressed;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("addressed ion set has duplicates");

    std::vector<double> omega;
    omega.reserve(addressed.size());
    const auto k = static_cast<Eigen::Index>(modes.inphase_index);
    for (std::size_t i : addressed) {
        if (i >= modes.ions()) throw std::invalid_argument("addressed ion index out of range");
        omega.push_back(carrier_rate * modes.lamb_dicke(static_cast<Eigen::Index>(i), k));
    }
    return omega;
}

}  // namespace dicke
