#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dicke/chain_mechanics.hpp"
#include "dicke/detection_fit.hpp"
#include "dicke/sideband_sim.hpp"

namespace dicke {

/// Contents of a plain-text `key = value` chain file. See README for keys.
struct ChainFile {
    ChainConfig chain;
    SweepTemplate sweep;
    std::vector<std::size_t> qubit_ions;
    std::optional<std::size_t> ancilla_index;
    std::optional<double> carrier_rate;  ///< Omega_0 in rad/s
    ReadoutModel readout;
};

/// Throws DataError carrying the offending line number.
ChainFile parse_chain_file(std::istream& in);
ChainFile load_chain_file(const std::string& path);

}  // namespace dicke
