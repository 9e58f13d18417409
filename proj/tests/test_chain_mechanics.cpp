#include <doctest.h>

#include <cmath>
#include <random>

#include "dicke/chain_mechanics.hpp"
#include "dicke/errors.hpp"
#include "oracles.hpp"

using namespace dicke;

namespace {

ChainConfig equal_chain(std::size_t n) {
    ChainConfig c;
    c.masses.assign(n, 1.0);
    return c;
}

}  // namespace

TEST_CASE("two equal ions sit at +-(1/4)^(1/3) with modes 1 and sqrt(3)") {
    const ChainConfig c = equal_chain(2);
    const auto eq = solve_equilibrium(c);
    const double d = std::cbrt(0.25);
    CHECK(eq.positions[0] == doctest::Approx(-d).epsilon(1e-12));
    CHECK(eq.positions[1] == doctest::Approx(d).epsilon(1e-12));
    const auto ms = solve_axial_modes(c, eq);
    CHECK(ms.frequencies[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ms.frequencies[1] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("three equal ions: +-(5/4)^(1/3) and 1, sqrt3, sqrt(29/5)") {
    const ChainConfig c = equal_chain(3);
    const auto eq = solve_equilibrium(c);
    const double d = std::cbrt(1.25);
    CHECK(eq.positions[0] == doctest::Approx(-d).epsilon(1e-12));
    CHECK(std::abs(eq.positions[1]) < 1e-12);
    CHECK(eq.positions[2] == doctest::Approx(d).epsilon(1e-12));
    const auto ms = solve_axial_modes(c, eq);
    CHECK(ms.frequencies[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ms.frequencies[1] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(ms.frequencies[2] == doctest::Approx(std::sqrt(29.0 / 5.0)).epsilon(1e-12));
}

TEST_CASE("equal-mass chains: antisymmetric, in-phase at omega_z with equal amplitudes") {
    for (std::size_t n = 2; n <= 9; ++n) {
        CAPTURE(n);
        const ChainConfig c = equal_chain(n);
        const auto eq = solve_equilibrium(c);
        CHECK(eq.residual_gradient_norm < 1e-10);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(eq.positions[i] + eq.positions[n - 1 - i]) < 1e-10);
        for (std::size_t i = 1; i < n; ++i) CHECK(eq.positions[i] > eq.positions[i - 1]);
        const auto ms = solve_axial_modes(c, eq);
        CHECK(ms.inphase_index == 0);
        CHECK(std::abs(ms.inphase_frequency() - 1.0) < 1e-10);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(ms.amplitudes(i, 0) - 1.0 / std::sqrt(double(n))) < 1e-10);
    }
}

TEST_CASE("Newton solver matches brute-force coordinate descent") {
    for (bool scaled : {false, true}) {
        for (std::size_t n = 2; n <= 7; ++n) {
            for (double mu : {0.5, 1.0, 27.0 / 25.0, 2.0, 10.0}) {
                for (std::size_t slot = 0; slot < n; ++slot) {
                    ChainConfig c = make_mixed_chain(n - 1, slot, mu);
                    if (scaled) c.trap = AxialTrap::MassScaled;
                    CAPTURE(n);
                    CAPTURE(mu);
                    CAPTURE(slot);
                    const auto eq = solve_equilibrium(c);
                    const auto ref = oracle::brute_force_equilibrium(oracle::weights(c.masses, c.reference_index, scaled));
                    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(eq.positions[i] - ref[i]) < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("mode frequencies match a finite-difference generalized eigenproblem") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> mass(0.3, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        ChainConfig c;
        const std::size_t n = 2 + trial % 5;
        for (std::size_t i = 0; i < n; ++i) c.masses.push_back(mass(rng));
        c.reference_index = trial % n;
        const auto eq = solve_equilibrium(c);
        const auto ms = solve_axial_modes(c, eq);
        const auto w = oracle::weights(c.masses, c.reference_index, false);
        const Eigen::VectorXd lam =
            oracle::generalized_modes(oracle::numeric_hessian(w, eq.positions), c.masses, c.reference_index);
        for (std::size_t k = 0; k < n; ++k) CHECK(ms.frequencies[k] == doctest::Approx(std::sqrt(lam(k))).epsilon(1e-6));
    }
}

TEST_CASE("mode invariants: orthonormal, ascending, positive, in-phase all one sign") {
    for (double mu : {0.1, 0.5, 1.0, 2.0, 10.0, 30.0}) {
        for (std::size_t nq = 1; nq <= 6; ++nq) {
            const ChainConfig c = make_mixed_chain(nq, ancilla_slot(nq, AncillaPlacement::Center), mu);
            const auto ms = solve_axial_modes(c);
            const Eigen::Index n = static_cast<Eigen::Index>(c.size());
            CHECK((ms.eigenvectors.transpose() * ms.eigenvectors - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-10);
            for (std::size_t k = 0; k < ms.modes(); ++k) {
                CHECK(ms.frequencies[k] > 0.0);
                if (k) CHECK(ms.frequencies[k] >= ms.frequencies[k - 1]);
            }
            const auto col = ms.eigenvectors.col(static_cast<Eigen::Index>(ms.inphase_index));
            CHECK(col.minCoeff() > 0.0);
            CHECK(ms.lamb_dicke.isApprox(c.k_projection * ms.amplitudes));
        }
    }
}

TEST_CASE("mass-scaled confinement keeps the centre of mass at omega_z") {
    for (double mu : {0.2, 3.0, 10.0}) {
        ChainConfig c = make_mixed_chain(3, 1, mu);
        c.trap = AxialTrap::MassScaled;
        const auto ms = solve_axial_modes(c);
        CHECK(std::abs(ms.inphase_frequency() - 1.0) < 1e-10);
    }
}

TEST_CASE("Mg-Mg-Al chain in SI units") {
    ChainConfig c;
    c.masses = {24.98583696, 24.98583696, 26.98153853};
    c.omega_z = 2.0 * 3.141592653589793 * 2.55e6;
    c.k_projection = 2.0 * 3.141592653589793 / 280e-9 * std::sqrt(0.5);
    c.dimensionless = false;
    const auto eq = solve_equilibrium(c);
    const double spacing = (eq.positions[1] - eq.positions[0]) * c.length_scale();
    CHECK(spacing == doctest::Approx(3.0e-6).epsilon(0.01));
    const auto ms = solve_axial_modes(c, eq);
    CHECK(ms.inphase_index == 0);
    CHECK(ms.frequencies[0] / c.omega_z == doctest::Approx(0.98666).epsilon(1e-4));
    const double ratio = ms.amplitudes(0, 0) / ms.amplitudes(1, 0);
    CHECK(ratio > 0.98);
    CHECK(ratio < 1.0);
    // Ground-state extent of a single Mg ion at 2.55 MHz is about 8.9 nm.
    CHECK(c.reference_zero_point() == doctest::Approx(8.906e-9).epsilon(0.01));
}

TEST_CASE("ancilla slots") {
    CHECK(ancilla_slot(2, AncillaPlacement::Center) == 1);
    CHECK(ancilla_slot(2, AncillaPlacement::End) == 2);
    CHECK(ancilla_slot(3, AncillaPlacement::Center) == 1);
    CHECK(ancilla_slot(3, AncillaPlacement::Center, OddSlot::Upper) == 2);
    CHECK(ancilla_slot(4, AncillaPlacement::Center) == 2);
    const ChainConfig c = make_mixed_chain(2, 0, 3.0, 9.0);
    CHECK(c.masses == std::vector<double>{27.0, 9.0, 9.0});
    CHECK(c.reference_index == 1);
}

TEST_CASE("invalid chains and coupling requests are rejected") {
    ChainConfig c = equal_chain(1);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = equal_chain(3);
    c.masses[1] = -1.0;
    CHECK_THROWS_AS(solve_equilibrium(c), std::invalid_argument);
    c = equal_chain(3);
    c.reference_index = 3;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = equal_chain(3);
    c.omega_z = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = equal_chain(3);
    c.k_projection = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    const auto ms = solve_axial_modes(equal_chain(3));
    CHECK_THROWS_AS(coupling_strengths(ms, {}), std::invalid_argument);
    CHECK_THROWS_AS(coupling_strengths(ms, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(coupling_strengths(ms, {5}), std::invalid_argument);
    const auto om = coupling_strengths(ms, {0, 2}, 2.0);
    CHECK(om[0] == doctest::Approx(2.0 * 0.1 / std::sqrt(3.0)));
}

TEST_CASE("large Lamb-Dicke parameters produce a diagnostic") {
    ChainConfig c = equal_chain(2);
    CHECK(solve_axial_modes(c).diagnostics.empty());
    c.k_projection = 1.0;
    CHECK_FALSE(solve_axial_modes(c).diagnostics.empty());
}

TEST_CASE("couplings are carrier rate times Lamb-Dicke parameters") {
    ChainConfig c = equal_chain(4);
    c.k_projection = 0.2;
    const auto ms = solve_axial_modes(c);
    const auto om = coupling_strengths(ms, {0, 1, 2, 3});
    for (double o : om) CHECK(o == doctest::Approx(0.1).epsilon(1e-12));
    const auto one = coupling_strengths(ms, {2}, 3.0);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == doctest::Approx(0.3).epsilon(1e-12));
}
