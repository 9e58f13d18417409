#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dicke/config_file.hpp"
#include "dicke/experiment.hpp"

using namespace dicke;

namespace {

ChainFile mg_mg_al() {
    std::istringstream in(R"(masses = 24.98583696, 24.98583696, 26.98153853
ancilla_index = 2
axial_frequency = 2.55e6
k_projection = 3.173e7
)");
    return parse_chain_file(in);
}

ExperimentOptions quick(std::uint64_t seed) {
    ExperimentOptions o;
    o.shots = 3000;
    o.bootstrap = 30;
    o.phase_points = 8;
    o.seed = seed;
    return o;
}

QubitDensity imperfect_state() {
    QubitDensity rho{density_of(dicke_state(2, 1)).matrix * 0.74, 2};
    rho.matrix(1, 1) += 0.03;
    rho.matrix(2, 2) += 0.03;
    rho.matrix(0, 0) += 0.12;
    rho.matrix(3, 3) += 0.08;
    return rho;
}

}  // namespace

TEST_CASE("fixed seed gives an identical report") {
    const ChainFile f = mg_mg_al();
    const std::string a = experiment_json(run_experiment(f, quick(4))).dump();
    const std::string b = experiment_json(run_experiment(f, quick(4))).dump();
    CHECK(a == b);
    CHECK(a != experiment_json(run_experiment(f, quick(5))).dump());
}

TEST_CASE("noiseless preparation: near-unit fidelity, flat first scan, period-pi second scan") {
    const ExperimentReport r = run_experiment(mg_mg_al(), quick(1));
    CHECK(r.simulated_fidelity > 0.9999);
    CHECK(r.fidelity > 0.99);
    CHECK(r.fidelity <= 1.0 + 1e-12);
    CHECK(r.first_scan.amplitude < 0.02);
    CHECK(r.second_scan.amplitude == doctest::Approx(1.0).epsilon(0.03));
    CHECK(std::abs(r.second_scan.fundamental_amplitude) < 0.03);
    for (std::size_t k = 0; k < r.true_second_parities.size(); ++k)
        CHECK(r.true_second_parities[k] == doctest::Approx(-std::cos(2 * r.second_scan.phis[k])).epsilon(1e-3));
}

TEST_CASE("imperfect state: coherence, contrast and fidelity follow the density matrix") {
    ExperimentOptions o = quick(2);
    o.shots = 10000;
    o.prepared_state = imperfect_state();
    const ExperimentReport r = run_experiment(mg_mg_al(), o);
    CHECK(r.simulated_fidelity == doctest::Approx(0.77).epsilon(1e-12));
    CHECK(r.first_scan.coherence_term == doctest::Approx(0.74).epsilon(0.04));
    CHECK(r.second_scan.amplitude == doctest::Approx(0.67).epsilon(0.05));
    CHECK(r.populations.c[1] == doctest::Approx(0.80).epsilon(0.03));
    CHECK(std::abs(r.fidelity - 0.77) < 4 * r.fidelity_error + 0.01);
}

TEST_CASE("preconditions and stage labels") {
    const ChainFile f = mg_mg_al();
    ExperimentOptions o = quick(1);
    o.shots = 10;
    CHECK_THROWS_AS(run_experiment(f, o), std::invalid_argument);

    ChainFile three = f;
    three.qubit_ions = {0, 1, 2};
    CHECK_THROWS_AS(run_experiment(three, quick(1)), std::invalid_argument);

    o = quick(1);
    o.prepared_state = maximally_mixed(3);
    try {
        run_experiment(f, o);
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).rfind("preparation:", 0) == 0);
    }
}

TEST_CASE("parity table has one row per analysis phase") {
    const ExperimentReport r = run_experiment(mg_mg_al(), quick(3));
    std::ostringstream out;
    write_parity_csv(out, r);
    std::istringstream in(out.str());
    std::string line;
    int rows = 0;
    std::getline(in, line);
    CHECK(line == "# dicke-parity/v1");
    std::getline(in, line);
    CHECK(line.rfind("phi,parity_first", 0) == 0);
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 8);
}
