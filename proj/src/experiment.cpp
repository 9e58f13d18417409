#include "dicke/experiment.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dicke/constants.hpp"
#include "dicke/errors.hpp"
#include "dicke/report_io.hpp"

namespace dicke {

namespace {

std::uint64_t derive(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t x = seed * 0x9e3779b97f4a7c15ULL + (k + 1) * 0xd1b54a32d192ed03ULL;
    x ^= x >> 31;
    x *= 0xbf58476d1ce4e5b9ULL;
    return x ^ (x >> 29);
}

Populations as_populations(const QubitDensity& rho) {
    const std::vector<double> p = bright_count_populations(rho);
    Populations c{std::max(p[0], 0.0), std::max(p[1], 0.0), std::max(p[2], 0.0)};
    const double s = c[0] + c[1] + c[2];
    for (double& v : c) v /= s;
    return c;
}

ParityScanResult scan(const QubitDensity& rho, const CompositeDists& truth, const CompositeDists& fitted,
                      const ExperimentOptions& options, std::uint64_t stream, std::vector<double>& truth_out) {
    std::vector<ParityScanPoint> points;
    for (int k = 0; k < options.phase_points; ++k) {
        const double phi = 2.0 * constants::pi * k / options.phase_points;
        const QubitDensity rotated = rotated_density(rho, 0.5 * constants::pi, phi);
        truth_out.push_back(parity_expectation(rotated));
        points.push_back({phi, synthesize_shots(as_populations(rotated), truth, options.shots,
                                                derive(options.seed, stream + static_cast<std::uint64_t>(k)))});
    }
    FitOptions fo;
    fo.bootstrap = options.bootstrap;
    fo.seed = derive(options.seed, stream + 999);
    return parity_scan_analysis(points, fitted, fo);
}

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
    const std::string prefix = std::string(stage) + ": ";
    try {
        return f();
    } catch (const DataError& e) {
        throw DataError(prefix + e.what(), e.line());
    } catch (const IdentifiabilityError& e) {
        throw IdentifiabilityError(prefix + e.what());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(prefix + e.what(), e.residual());
    } catch (const InstabilityError& e) {
        throw InstabilityError(prefix + e.what());
    } catch (const SearchError& e) {
        throw SearchError(prefix + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(prefix + e.what());
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(prefix + e.what());
    }
}

}  // namespace

ExperimentReport run_experiment(const ChainFile& file, const ExperimentOptions& options) {
    if (options.shots < 100) throw std::invalid_argument("experiment needs at least 100 shots per set");
    if (options.phase_points < 4) throw std::invalid_argument("experiment needs at least 4 analysis phases");
    if (file.qubit_ions.size() != 2) throw std::invalid_argument("two-ion readout model needs exactly two qubit ions");

    ExperimentReport report;
    report.true_readout = file.readout;

    staged("preparation", [&] {
        if (options.prepared_state) {
            report.prepared = *options.prepared_state;
            report.prepared.validate();
            if (report.prepared.n_qubits != 2) throw std::invalid_argument("prepared state must have two qubits");
        } else {
            const ModeSet modes = solve_axial_modes(file.chain);
            report.couplings = coupling_strengths(modes, file.qubit_ions, 1.0);
            report.preparation = first_max_fidelity(report.couplings, 1);
            report.prepared = report.preparation->reduced_density;
        }
    });
    report.simulated_fidelity = fidelity_two_qubit(report.prepared);

    const CompositeDists truth = composite_dists(file.readout);
    const int n_max = file.readout.n_max;

    const auto bright = synthesize_shots({0.0, 0.0, 1.0}, truth, options.shots, derive(options.seed, 0));
    const auto dark = synthesize_shots({1.0, 0.0, 0.0}, truth, options.shots, derive(options.seed, 1));
    report.calibration = staged("calibration", [&] {
        return calibrate(histogram_of(bright, n_max), histogram_of(dark, n_max), file.readout);
    });
    const CompositeDists fitted = composite_dists(report.calibration.model);

    FitOptions fo;
    fo.bootstrap = options.bootstrap;
    fo.seed = derive(options.seed, 2);
    const auto population_shots =
        synthesize_shots(as_populations(report.prepared), truth, options.shots, derive(options.seed, 3));
    report.populations =
        staged("population fit", [&] { return ml_fit(std::span<const int>(population_shots), fitted, fo); });

    report.first_scan = staged("first parity scan", [&] {
        return scan(report.prepared, truth, fitted, options, 1000, report.true_first_parities);
    });
    const QubitDensity after_first = rotated_density(report.prepared, 0.5 * constants::pi, 0.0);
    report.second_scan = staged("second parity scan", [&] {
        return scan(after_first, truth, fitted, options, 2000, report.true_second_parities);
    });

    report.odd_population = report.populations.c[1];
    report.fidelity = 0.5 * (report.odd_population + report.first_scan.coherence_term);
    report.fidelity_error = 0.5 * std::hypot(report.populations.standard_error[1], report.first_scan.coherence_error);
    return report;
}

nlohmann::json experiment_json(const ExperimentReport& r) {
    using nlohmann::json;
    auto scan_json = [](const ParityScanResult& s, const std::vector<double>& truth) {
        json j;
        j["phi"] = s.phis;
        j["parity"] = s.parities;
        j["parity_error"] = s.parity_errors;
        j["true_parity"] = truth;
        j["amplitude"] = s.amplitude;
        j["phase"] = s.phase;
        j["offset"] = s.offset;
        j["coherence_term"] = s.coherence_term;
        j["coherence_error"] = s.coherence_error;
        j["period_2pi_amplitude"] = std::isnan(s.fundamental_amplitude) ? json(nullptr) : json(s.fundamental_amplitude);
        return j;
    };

    json j;
    j["schema"] = "dicke-experiment/v1";
    if (!r.couplings.empty()) j["couplings"] = r.couplings;
    if (r.preparation) {
        j["preparation"] = {{"t_star", r.preparation->duration},
                            {"fidelity", r.preparation->fidelity},
                            {"phonon_populations", r.preparation->phonon_distribution}};
    }
    j["prepared_density"] = to_json(r.prepared);
    j["simulated_fidelity"] = r.simulated_fidelity;
    j["readout_true"] = to_json(r.true_readout);
    j["calibration"] = {{"model", to_json(r.calibration.model)},
                        {"log_likelihood", r.calibration.log_likelihood},
                        {"deviance", r.calibration.deviance},
                        {"degrees_of_freedom", r.calibration.degrees_of_freedom}};
    j["populations"] = to_json(r.populations);
    j["first_rotation_scan"] = scan_json(r.first_scan, r.true_first_parities);
    j["second_rotation_scan"] = scan_json(r.second_scan, r.true_second_parities);
    j["odd_population"] = r.odd_population;
    j["coherence_term"] = r.first_scan.coherence_term;
    j["fidelity"] = r.fidelity;
    j["fidelity_error"] = r.fidelity_error;
    return j;
}

void write_parity_csv(std::ostream& out, const ExperimentReport& r) {
    out << "# " << kParitySchema << '\n';
    out << "phi,parity_first,error_first,true_first,parity_second,error_second,true_second\n";
    for (std::size_t k = 0; k < r.first_scan.phis.size(); ++k) {
        out << format_number(r.first_scan.phis[k]) << ',' << format_number(r.first_scan.parities[k]) << ','
            << format_number(r.first_scan.parity_errors[k]) << ',' << format_number(r.true_first_parities[k]) << ','
            << format_number(r.second_scan.parities[k]) << ',' << format_number(r.second_scan.parity_errors[k]) << ','
            << format_number(r.true_second_parities[k]) << '\n';
    }
}

}  // namespace dicke
