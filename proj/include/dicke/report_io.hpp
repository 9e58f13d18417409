#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dicke/chain_mechanics.hpp"
#include "dicke/detection_fit.hpp"
#include "dicke/dicke_core.hpp"
#include "dicke/sideband_sim.hpp"

namespace dicke {

// Frozen table schemas. The first line of every CSV is a "# <schema>" tag.
inline constexpr const char* kModesSchema = "dicke-modes/v1";
inline constexpr const char* kSweepSchema = "dicke-sweep/v1";
inline constexpr const char* kHistogramSchema = "dicke-histogram/v1";
inline constexpr const char* kParitySchema = "dicke-parity/v1";

/// frequency,z_0,eta_0,...,z_{n-1},eta_{n-1},inphase  (one row per mode)
void write_modes_csv(std::ostream& out, const ModeSet& modes);
nlohmann::json modes_json(const ChainConfig& config, const EquilibriumSolution& eq, const ModeSet& modes);

/// mu,t_star,t_star_s,fidelity,p_0..p_m,error
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, int m,
                     std::optional<double> carrier_rate = std::nullopt);
nlohmann::json sweep_json(const std::vector<SweepRow>& rows, int m, std::optional<double> carrier_rate = std::nullopt);

nlohmann::json to_json(const QubitState& state);
nlohmann::json to_json(const QubitDensity& rho);
QubitState qubit_state_from_json(const nlohmann::json& j);
QubitDensity qubit_density_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ReadoutModel& model);
ReadoutModel readout_model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FitResult& fit);

/// One integer per line; blank lines and '#' comments skipped.
/// Throws DataError naming the line of any malformed or out-of-range entry.
std::vector<int> read_shots(std::istream& in, int n_max = kDefaultMaxCount);
void write_shots(std::ostream& out, const std::vector<int>& shots);

/// Rows "n,count"; header lines allowed.
Histogram read_histogram_csv(std::istream& in, int n_max = kDefaultMaxCount);
void write_histogram_csv(std::ostream& out, const Histogram& hist);

/// Fixed-precision formatting used by every writer.
std::string format_number(double v);

}  // namespace dicke
