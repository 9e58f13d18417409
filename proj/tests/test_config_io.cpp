#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dicke/config_file.hpp"
#include "dicke/errors.hpp"
#include "dicke/report_io.hpp"

using namespace dicke;

namespace {

ChainFile parse(const std::string& text) {
    std::istringstream in(text);
    return parse_chain_file(in);
}

std::size_t data_error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const DataError& e) {
        return e.line();
    }
    return 999;
}

}  // namespace

TEST_CASE("explicit chain in SI units") {
    const ChainFile f = parse(R"(# comment
masses = 25, 25, 27
ancilla_index = 2
axial_frequency = 2.55e6   # Hz
k_projection = 3.0e7
carrier_rabi_frequency = 1e5
lambda_bright = 20
)");
    CHECK(f.chain.masses == std::vector<double>{25, 25, 27});
    CHECK_FALSE(f.chain.dimensionless);
    CHECK(f.chain.omega_z == doctest::Approx(2 * M_PI * 2.55e6));
    CHECK(f.qubit_ions == std::vector<std::size_t>{0, 1});
    CHECK(*f.ancilla_index == 2);
    CHECK(*f.carrier_rate == doctest::Approx(2 * M_PI * 1e5));
    CHECK(f.readout.lambda_bright == 20.0);
    CHECK(f.readout.lambda_dark == 0.3);
    CHECK(*f.sweep.explicit_slot == 2);
    CHECK(f.sweep.n_qubits == 2);
    CHECK(f.sweep.qubit_mass == 25.0);
}

TEST_CASE("template chain in scaled units") {
    const ChainFile f = parse("dimensionless = true\nn_qubits = 3\nmass_ratio = 2\nodd_slot = upper\n");
    CHECK(f.chain.dimensionless);
    CHECK(f.chain.masses == std::vector<double>{1, 1, 2, 1});
    CHECK(f.qubit_ions == std::vector<std::size_t>{0, 1, 3});
    const ChainFile e = parse("dimensionless = true\nn_qubits = 2\nancilla_position = end\ntrap = mass_scaled\n");
    CHECK(e.chain.masses == std::vector<double>{1, 1, 1});
    CHECK(*e.ancilla_index == 2);
    CHECK(e.chain.trap == AxialTrap::MassScaled);
}

TEST_CASE("malformed files name the offending line") {
    CHECK(data_error_line("dimensionless = true\nn_qubits = 2\nbogus = 1\n") == 3);
    CHECK(data_error_line("dimensionless = true\nn_qubits = 2\nn_qubits = 3\n") == 3);
    CHECK(data_error_line("dimensionless = true\n\nmasses = 1, x, 1\n") == 3);
    CHECK(data_error_line("dimensionless = true\nmasses 1, 1\n") == 2);
    CHECK(data_error_line("dimensionless = maybe\nn_qubits = 2\n") == 1);
    CHECK_THROWS_AS(parse("masses = 1, 1\n"), DataError);
    CHECK_THROWS_AS(parse("dimensionless = true\nmasses = 1, -1\n"), DataError);
    CHECK_THROWS_AS(parse("dimensionless = true\nmasses = 1, 1\nqubit_ions = 0, 4\n"), DataError);
    CHECK_THROWS_AS(parse("dimensionless = true\n"), DataError);
    CHECK_THROWS_AS(load_chain_file("/nonexistent/chain.conf"), DataError);
}

TEST_CASE("state and density JSON round trips") {
    const QubitState s = dicke_state(3, 1);
    const QubitState s2 = qubit_state_from_json(nlohmann::json::parse(to_json(s).dump()));
    CHECK(s2.n_qubits == 3);
    CHECK((s2.amplitudes - s.amplitudes).norm() == 0.0);

    QubitDensity rho = density_of(coupling_weighted_w_state({0.3, 0.4}));
    rho.matrix(1, 2) *= std::complex<double>(0.0, 1.0);
    rho.matrix(2, 1) = std::conj(rho.matrix(1, 2));
    const QubitDensity r2 = qubit_density_from_json(nlohmann::json::parse(to_json(rho).dump()));
    CHECK((r2.matrix - rho.matrix).norm() == 0.0);

    CHECK_THROWS_AS(qubit_density_from_json(nlohmann::json::parse(R"({"n_qubits":1,"matrix":[[[1,0]]]})")), DataError);
    CHECK_THROWS_AS(qubit_state_from_json(nlohmann::json::parse(R"({"n_qubits":1})")), DataError);
}

TEST_CASE("readout model JSON accepts a bare or nested model") {
    ReadoutModel m;
    m.gamma = 321.0;
    const auto j = to_json(m);
    CHECK(readout_model_from_json(j).gamma == 321.0);
    CHECK(readout_model_from_json(nlohmann::json{{"model", j}}).gamma == 321.0);
    CHECK_THROWS_AS(readout_model_from_json(nlohmann::json{{"gamma", 1}}), DataError);
}

TEST_CASE("shot records and histograms") {
    std::istringstream in("# counts\n3\n\n 17 \n0\n");
    const auto shots = read_shots(in);
    CHECK(shots == std::vector<int>{3, 17, 0});
    std::ostringstream out;
    write_shots(out, shots);
    CHECK(out.str() == "3\n17\n0\n");

    std::istringstream bad("1\n2\n150\n");
    try {
        read_shots(bad);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.line() == 3);
    }
    std::istringstream text("1\nabc\n");
    CHECK_THROWS_AS(read_shots(text), DataError);

    const Histogram h = histogram_of(shots);
    std::ostringstream hs;
    write_histogram_csv(hs, h);
    std::istringstream back(hs.str());
    CHECK(read_histogram_csv(back).counts == h.counts);
}

TEST_CASE("sweep CSV keeps failed rows in place") {
    std::vector<SweepRow> rows(2);
    rows[0].mu = 0.5;
    rows[0].t_star = 3.0;
    rows[0].fidelity = 0.9;
    rows[0].phonon_populations = {0.99, 0.01};
    rows[1].mu = -1.0;
    rows[1].error = "mu=-1: bad, worse";
    std::ostringstream out;
    write_sweep_csv(out, rows, 1, 2.0);
    CHECK(out.str() ==
          "# dicke-sweep/v1\n"
          "mu,t_star,t_star_s,fidelity,p_0,p_1,error\n"
          "0.5,3,1.5,0.9,0.99,0.01,\n"
          "-1,,,,,,mu=-1: bad; worse\n");
}
