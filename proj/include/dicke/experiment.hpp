#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "dicke/config_file.hpp"
#include "dicke/detection_fit.hpp"
#include "dicke/dicke_core.hpp"
#include "dicke/sideband_sim.hpp"

namespace dicke {

struct ExperimentOptions {
    std::size_t shots = 10000;  ///< per shot set (references, populations, each scan phase)
    std::uint64_t seed = 1;
    int phase_points = 16;      ///< analysis phases spread over [0, 2 pi)
    int bootstrap = 200;
    /// Replaces the simulated preparation, e.g. to model an imperfect state.
    std::optional<QubitDensity> prepared_state;
};

struct ExperimentReport {
    std::vector<double> couplings;
    std::optional<PulseResult> preparation;
    QubitDensity prepared;
    double simulated_fidelity = 0.0;
    ReadoutModel true_readout;
    CalibrationResult calibration;
    FitResult populations;
    ParityScanResult first_scan;   ///< R(pi/2, phi)
    ParityScanResult second_scan;  ///< R(pi/2, 0) then R(pi/2, phi)
    std::vector<double> true_first_parities;
    std::vector<double> true_second_parities;
    double odd_population = 0.0;
    double fidelity = 0.0;
    double fidelity_error = 0.0;
};

/// Synthetic end-to-end run on a two-qubit chain: prepare the W state with one
/// red-sideband pulse, generate reference, population and parity-scan shots
/// with the file's readout model, calibrate, fit and combine into a fidelity.
/// Throws std::invalid_argument when shots < 100 or the chain does not have
/// exactly two qubit ions.
ExperimentReport run_experiment(const ChainFile& file, const ExperimentOptions& options);

nlohmann::json experiment_json(const ExperimentReport& report);

/// phi,parity_first,error_first,true_first,parity_second,error_second,true_second
void write_parity_csv(std::ostream& out, const ExperimentReport& report);

}  // namespace dicke
