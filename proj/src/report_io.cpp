#include "dicke/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dicke/errors.hpp"

namespace dicke {

using nlohmann::json;

namespace {

std::string strip(const std::string& raw) {
    const auto hash = raw.find('#');
    std::string s = hash == std::string::npos ? raw : raw.substr(0, hash);
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_int(const std::string& s, long long& v) {
    std::istringstream is(s);
    is >> v;
    return is && is.peek() == std::char_traits<char>::eof();
}

json complex_pair(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

std::complex<double> complex_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw DataError("expected [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_modes_csv(std::ostream& out, const ModeSet& modes) {
    out << "# " << kModesSchema << (modes.dimensionless ? " units=scaled" : " units=SI") << '\n';
    out << "frequency";
    for (std::size_t i = 0; i < modes.ions(); ++i) out << ",z_" << i << ",eta_" << i;
    out << ",inphase\n";
    for (std::size_t k = 0; k < modes.modes(); ++k) {
        out << format_number(modes.frequencies[k]);
        for (std::size_t i = 0; i < modes.ions(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i), kk = static_cast<Eigen::Index>(k);
            out << ',' << format_number(modes.amplitudes(ii, kk)) << ',' << format_number(modes.lamb_dicke(ii, kk));
        }
        out << ',' << (k == modes.inphase_index ? 1 : 0) << '\n';
    }
}

json modes_json(const ChainConfig& config, const EquilibriumSolution& eq, const ModeSet& modes) {
    json j;
    j["schema"] = kModesSchema;
    j["units"] = modes.dimensionless ? "scaled" : "SI";
    j["masses"] = config.masses;
    j["positions"] = eq.positions;
    if (!config.dimensionless) {
        std::vector<double> metres;
        for (double u : eq.positions) metres.push_back(u * config.length_scale());
        j["positions_m"] = metres;
    }
    j["inphase_index"] = modes.inphase_index;
    json list = json::array();
    for (std::size_t k = 0; k < modes.modes(); ++k) {
        json m;
        m["frequency"] = modes.frequencies[k];
        std::vector<double> z, eta;
        for (std::size_t i = 0; i < modes.ions(); ++i) {
            z.push_back(modes.amplitudes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
            eta.push_back(modes.lamb_dicke(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
        }
        m["amplitudes"] = z;
        m["lamb_dicke"] = eta;
        list.push_back(m);
    }
    j["modes"] = list;
    j["diagnostics"] = modes.diagnostics;
    return j;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, int m, std::optional<double> carrier_rate) {
    out << "# " << kSweepSchema << '\n';
    out << "mu,t_star,t_star_s,fidelity";
    for (int n = 0; n <= m; ++n) out << ",p_" << n;
    out << ",error\n";
    for (const SweepRow& row : rows) {
        out << format_number(row.mu) << ',';
        if (row.ok()) {
            out << format_number(row.t_star) << ',';
            if (carrier_rate) out << format_number(row.t_star / *carrier_rate);
            out << ',' << format_number(row.fidelity);
            for (int n = 0; n <= m; ++n) {
                const auto idx = static_cast<std::size_t>(n);
                out << ',' << format_number(idx < row.phonon_populations.size() ? row.phonon_populations[idx] : 0.0);
            }
            out << ",\n";
        } else {
            out << ",,";
            for (int n = 0; n <= m; ++n) out << ',';
            std::string msg = row.error;
            for (char& c : msg)
                if (c == ',' || c == '\n') c = ';';
            out << ',' << msg << '\n';
        }
    }
}

json sweep_json(const std::vector<SweepRow>& rows, int m, std::optional<double> carrier_rate) {
    json j;
    j["schema"] = kSweepSchema;
    j["m"] = m;
    json list = json::array();
    for (const SweepRow& row : rows) {
        json r;
        r["mu"] = row.mu;
        if (row.ok()) {
            r["t_star"] = row.t_star;
            if (carrier_rate) r["t_star_s"] = row.t_star / *carrier_rate;
            r["fidelity"] = row.fidelity;
            r["phonon_populations"] = row.phonon_populations;
            if (row.reduced_density) r["reduced_density"] = to_json(*row.reduced_density);
        } else {
            r["error"] = row.error;
        }
        list.push_back(r);
    }
    j["rows"] = list;
    return j;
}

json to_json(const QubitState& state) {
    json amps = json::array();
    for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i) amps.push_back(complex_pair(state.amplitudes[i]));
    return {{"n_qubits", state.n_qubits}, {"amplitudes", amps}};
}

json to_json(const QubitDensity& rho) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < rho.matrix.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < rho.matrix.cols(); ++k) row.push_back(complex_pair(rho.matrix(i, k)));
        rows.push_back(row);
    }
    return {{"n_qubits", rho.n_qubits}, {"matrix", rows}};
}

QubitState qubit_state_from_json(const json& j) {
    try {
        QubitState s;
        s.n_qubits = j.at("n_qubits").get<int>();
        const json& amps = j.at("amplitudes");
        s.amplitudes.resize(static_cast<Eigen::Index>(amps.size()));
        for (std::size_t i = 0; i < amps.size(); ++i) s.amplitudes[static_cast<Eigen::Index>(i)] = complex_from(amps[i]);
        s.validate(1e-9);
        return s;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed state JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("invalid state: ") + e.what());
    }
}

QubitDensity qubit_density_from_json(const json& j) {
    try {
        QubitDensity rho;
        rho.n_qubits = j.at("n_qubits").get<int>();
        const json& rows = j.at("matrix");
        const auto d = static_cast<Eigen::Index>(rows.size());
        rho.matrix.resize(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            const json& row = rows[static_cast<std::size_t>(i)];
            if (static_cast<Eigen::Index>(row.size()) != d) throw DataError("density matrix is not square");
            for (Eigen::Index k = 0; k < d; ++k) rho.matrix(i, k) = complex_from(row[static_cast<std::size_t>(k)]);
        }
        rho.validate(1e-9);
        return rho;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed density JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("invalid density: ") + e.what());
    }
}

json to_json(const ReadoutModel& model) {
    return {{"lambda_bright", model.lambda_bright}, {"lambda_dark", model.lambda_dark},
            {"lambda_bg", model.lambda_bg},         {"gamma", model.gamma},
            {"t_detect", model.t_detect},           {"n_max", model.n_max}};
}

ReadoutModel readout_model_from_json(const json& j) {
    try {
        const json& m = j.contains("model") ? j.at("model") : j;
        ReadoutModel model;
        model.lambda_bright = m.at("lambda_bright").get<double>();
        model.lambda_dark = m.at("lambda_dark").get<double>();
        model.lambda_bg = m.at("lambda_bg").get<double>();
        model.gamma = m.at("gamma").get<double>();
        model.t_detect = m.at("t_detect").get<double>();
        model.n_max = m.value("n_max", kDefaultMaxCount);
        model.validate();
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed readout model JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("invalid readout model: ") + e.what());
    }
}

json to_json(const FitResult& fit) {
    return {{"populations", fit.c},
            {"standard_errors", fit.standard_error},
            {"parity", parity_from_fit(fit)},
            {"parity_standard_error", fit.parity_standard_error},
            {"log_likelihood", fit.log_likelihood},
            {"n_samples", fit.n_samples},
            {"iterations", fit.iterations}};
}

std::vector<int> read_shots(std::istream& in, int n_max) {
    std::vector<int> shots;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = strip(raw);
        if (s.empty()) continue;
        long long v = 0;
        if (!parse_int(s, v))
            throw DataError("line " + std::to_string(line) + ": not an integer count: '" + s + "'", line);
        if (v < 0 || v > n_max)
            throw DataError("line " + std::to_string(line) + ": count " + s + " outside [0, " + std::to_string(n_max) + "]",
                            line);
        shots.push_back(static_cast<int>(v));
    }
    return shots;
}

void write_shots(std::ostream& out, const std::vector<int>& shots) {
    for (int s : shots) out << s << '\n';
}

Histogram read_histogram_csv(std::istream& in, int n_max) {
    Histogram h{std::vector<std::uint64_t>(static_cast<std::size_t>(n_max) + 1, 0)};
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = strip(raw);
        if (s.empty() || s == "n,count") continue;
        const auto comma = s.find(',');
        long long n = 0, c = 0;
        if (comma == std::string::npos || !parse_int(s.substr(0, comma), n) || !parse_int(s.substr(comma + 1), c))
            throw DataError("line " + std::to_string(line) + ": expected 'n,count'", line);
        if (n < 0 || n > n_max || c < 0)
            throw DataError("line " + std::to_string(line) + ": bin out of range", line);
        h.counts[static_cast<std::size_t>(n)] += static_cast<std::uint64_t>(c);
    }
    return h;
}

void write_histogram_csv(std::ostream& out, const Histogram& hist) {
    out << "# " << kHistogramSchema << "\nn,count\n";
    for (std::size_t n = 0; n < hist.counts.size(); ++n) out << n << ',' << hist.counts[n] << '\n';
}

}  // namespace dicke
