#include "dicke/dicke_core.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace dicke {

namespace {

using cd = std::complex<double>;

void require_qubits(int n) {
    if (n < 1 || n > 20) throw std::invalid_argument("qubit count must be in [1, 20]");
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

int excitation_count(std::size_t basis_index) {
    return std::popcount(basis_index);
}

void QubitState::validate(double tol) const {
    require_qubits(n_qubits);
    if (static_cast<std::size_t>(amplitudes.size()) != basis_size(n_qubits))
        throw std::invalid_argument("state vector length does not match 2^n_qubits");
    if (std::abs(amplitudes.norm() - 1.0) > tol)
        throw std::invalid_argument("state is not normalized");
}

void QubitDensity::validate(double tol) const {
    require_qubits(n_qubits);
    const auto d = static_cast<Eigen::Index>(basis_size(n_qubits));
    if (matrix.rows() != d || matrix.cols() != d)
        throw std::invalid_argument("density dimension does not match 2^n_qubits");
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("density is not Hermitian");
    if (std::abs(matrix.trace() - cd(1.0)) > tol)
        throw std::invalid_argument("density trace differs from 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("density is not positive semidefinite");
}

double QubitDensity::purity() const {
    return (matrix * matrix).trace().real();
}

QubitDensity density_of(const QubitState& state) {
    return {state.amplitudes * state.amplitudes.adjoint(), state.n_qubits};
}

QubitDensity maximally_mixed(int n_qubits) {
    require_qubits(n_qubits);
    const auto d = static_cast<Eigen::Index>(basis_size(n_qubits));
    return {ComplexMatrix::Identity(d, d) / static_cast<double>(d), n_qubits};
}

QubitState dicke_state(int n, int m) {
    require_qubits(n);
    if (m < 0 || m > n) throw std::invalid_argument("excitation number out of range");
    const std::size_t dim = basis_size(n);
    const double amp = 1.0 / std::sqrt(binomial(n, m));
    QubitState s{ComplexVector::Zero(static_cast<Eigen::Index>(dim)), n};
    for (std::size_t b = 0; b < dim; ++b)
        if (excitation_count(b) == m) s.amplitudes[static_cast<Eigen::Index>(b)] = amp;
    return s;
}

QubitState coupling_weighted_w_state(const std::vector<double>& couplings) {
    const int n = static_cast<int>(couplings.size());
    require_qubits(n);
    const double norm = std::sqrt(std::inner_product(couplings.begin(), couplings.end(), couplings.begin(), 0.0));
    if (norm == 0.0) throw std::invalid_argument("all couplings are zero");
    QubitState s{ComplexVector::Zero(static_cast<Eigen::Index>(basis_size(n))), n};
    for (int q = 0; q < n; ++q) {
        const std::size_t b = std::size_t{1} << (n - 1 - q);
        s.amplitudes[static_cast<Eigen::Index>(b)] = couplings[static_cast<std::size_t>(q)] / norm;
    }
    return s;
}

double w_fidelity_analytic(const std::vector<double>& couplings) {
    if (couplings.empty()) throw std::invalid_argument("no couplings given");
    double sum = 0.0, sum_sq = 0.0;
    for (double c : couplings) {
        if (!std::isfinite(c)) throw std::invalid_argument("couplings must be finite reals");
        sum += c;
        sum_sq += c * c;
    }
    if (sum_sq == 0.0) throw std::invalid_argument("all couplings are zero");
    return sum * sum / (static_cast<double>(couplings.size()) * sum_sq);
}

Eigen::Matrix2cd single_qubit_rotation(double theta, double phi) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const cd minus_i(0.0, -1.0);
    Eigen::Matrix2cd r;
    // Columns are the images of |down> and |up>.
    r(0, 0) = c;
    r(1, 0) = minus_i * std::polar(1.0, -phi) * s;
    r(0, 1) = minus_i * std::polar(1.0, phi) * s;
    r(1, 1) = c;
    return r;
}

ComplexMatrix collective_rotation(double theta, double phi, int n) {
    require_qubits(n);
    const Eigen::Matrix2cd r = single_qubit_rotation(theta, phi);
    ComplexMatrix out = ComplexMatrix::Ones(1, 1);
    for (int q = 0; q < n; ++q) {
        ComplexMatrix next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j)
                next.block<2, 2>(2 * i, 2 * j) = out(i, j) * r;
        out = std::move(next);
    }
    return out;
}

QubitDensity rotated_density(const QubitDensity& rho, double theta, double phi) {
    const ComplexMatrix r = collective_rotation(theta, phi, rho.n_qubits);
    return {r.adjoint() * rho.matrix * r, rho.n_qubits};
}

double parity_expectation(const QubitDensity& rho) {
    double p = 0.0;
    for (Eigen::Index b = 0; b < rho.matrix.rows(); ++b) {
        const double sign = excitation_count(static_cast<std::size_t>(b)) % 2 == 0 ? 1.0 : -1.0;
        p += sign * rho.matrix(b, b).real();
    }
    return p;
}

double rotated_parity(const QubitDensity& rho, double theta, double phi) {
    return parity_expectation(rotated_density(rho, theta, phi));
}

std::vector<double> bright_count_populations(const QubitDensity& rho) {
    std::vector<double> pops(static_cast<std::size_t>(rho.n_qubits) + 1, 0.0);
    for (Eigen::Index b = 0; b < rho.matrix.rows(); ++b) {
        const int down = rho.n_qubits - excitation_count(static_cast<std::size_t>(b));
        pops[static_cast<std::size_t>(down)] += rho.matrix(b, b).real();
    }
    return pops;
}

double odd_coherence(const QubitDensity& rho) {
    if (rho.n_qubits != 2) throw std::invalid_argument("odd_coherence needs two qubits");
    return (rho.matrix(1, 2) + rho.matrix(2, 1)).real();
}

double fidelity_two_qubit(const QubitDensity& rho) {
    if (rho.n_qubits != 2) throw std::invalid_argument("fidelity_two_qubit needs two qubits");
    const double odd = rho.matrix(1, 1).real() + rho.matrix(2, 2).real();
    return 0.5 * (odd + odd_coherence(rho));
}

double dicke_fidelity(const QubitDensity& rho, int m) {
    const auto d = static_cast<Eigen::Index>(basis_size(rho.n_qubits));
    if (rho.matrix.rows() != d || rho.matrix.cols() != d)
        throw std::invalid_argument("density dimension does not match n_qubits");
    const QubitState target = dicke_state(rho.n_qubits, m);
    return (target.amplitudes.adjoint() * rho.matrix * target.amplitudes)(0, 0).real();
}

}  // namespace dicke
