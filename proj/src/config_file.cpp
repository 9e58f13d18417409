#include "dicke/config_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "dicke/constants.hpp"
#include "dicke/errors.hpp"

namespace dicke {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct Entry {
    std::string value;
    std::size_t line;
};

class Reader {
public:
    explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    double number(const std::string& key, double fallback) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? fallback : parse_double(it->second.value, key, it->second.line);
    }

    std::vector<double> numbers(const std::string& key) const {
        const Entry& e = entries_.at(key);
        std::vector<double> out;
        std::stringstream ss(e.value);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), key, e.line));
        return out;
    }

    std::size_t index(const std::string& key, std::size_t fallback) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        return parse_index(it->second.value, key, it->second.line);
    }

    std::vector<std::size_t> indices(const std::string& key) const {
        const Entry& e = entries_.at(key);
        std::vector<std::size_t> out;
        std::stringstream ss(e.value);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_index(trim(item), key, e.line));
        return out;
    }

    std::string word(const std::string& key, const std::string& fallback) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? fallback : lower(it->second.value);
    }

    std::size_t line(const std::string& key) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

private:
    static double parse_double(const std::string& text, const std::string& key, std::size_t line) {
        double v = 0.0;
        const char* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, v);
        if (ec != std::errc() || ptr != end || text.empty())
            throw DataError("line " + std::to_string(line) + ": '" + key + "' expects a number, got '" + text + "'", line);
        return v;
    }

    static std::size_t parse_index(const std::string& text, const std::string& key, std::size_t line) {
        std::size_t v = 0;
        const char* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, v);
        if (ec != std::errc() || ptr != end || text.empty())
            throw DataError("line " + std::to_string(line) + ": '" + key + "' expects an index, got '" + text + "'", line);
        return v;
    }

    std::map<std::string, Entry> entries_;
};

const std::vector<std::string> kKnownKeys = {
    "masses", "reference_index", "axial_frequency", "k_projection", "dimensionless", "trap",
    "ancilla_index", "qubit_ions", "carrier_rabi_frequency", "n_qubits", "qubit_mass",
    "ancilla_position", "odd_slot", "mass_ratio", "lambda_bright", "lambda_dark", "lambda_bg",
    "repump_rate", "detection_time", "n_max"};

}  // namespace

ChainFile parse_chain_file(std::istream& in) {
    std::map<std::string, Entry> entries;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw DataError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
        const std::string key = lower(trim(text.substr(0, eq)));
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
            throw DataError("line " + std::to_string(line_no) + ": unknown key '" + key + "'", line_no);
        if (entries.count(key))
            throw DataError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'", line_no);
        entries[key] = {trim(text.substr(eq + 1)), line_no};
    }
    const Reader r(std::move(entries));

    ChainFile file;
    const std::string dimensionless = r.word("dimensionless", "false");
    if (dimensionless != "true" && dimensionless != "false")
        throw DataError("'dimensionless' must be true or false", r.line("dimensionless"));
    const bool scaled = dimensionless == "true";

    const std::string trap = r.word("trap", "electrostatic");
    AxialTrap trap_kind = AxialTrap::Electrostatic;
    if (trap == "mass_scaled") trap_kind = AxialTrap::MassScaled;
    else if (trap != "electrostatic")
        throw DataError("'trap' must be electrostatic or mass_scaled", r.line("trap"));

    const double omega_z = scaled ? 1.0 : 2.0 * constants::pi * r.number("axial_frequency", -1.0);
    if (!scaled && !r.has("axial_frequency"))
        throw DataError("missing 'axial_frequency' (Hz)");
    const double k = r.number("k_projection", scaled ? 0.1 : -1.0);
    if (!scaled && !r.has("k_projection")) throw DataError("missing 'k_projection' (1/m)");

    SweepTemplate& sweep = file.sweep;
    sweep.omega_z = omega_z;
    sweep.k_projection = k;
    sweep.dimensionless = scaled;
    sweep.trap = trap_kind;

    if (r.has("masses")) {
        file.chain.masses = r.numbers("masses");
        file.chain.reference_index = r.index("reference_index", 0);
        if (r.has("ancilla_index")) file.ancilla_index = r.index("ancilla_index", 0);
        sweep.n_qubits = file.chain.masses.size() - (file.ancilla_index ? 1 : 0);
        if (file.ancilla_index) {
            if (*file.ancilla_index >= file.chain.masses.size())
                throw DataError("'ancilla_index' out of range", r.line("ancilla_index"));
            sweep.explicit_slot = *file.ancilla_index;
            const std::size_t any_qubit = *file.ancilla_index == 0 ? 1 : 0;
            sweep.qubit_mass = file.chain.masses[any_qubit];
        } else {
            sweep.qubit_mass = file.chain.masses.front();
        }
    } else {
        if (!r.has("n_qubits")) throw DataError("need either 'masses' or 'n_qubits'");
        sweep.n_qubits = r.index("n_qubits", 0);
        if (sweep.n_qubits < 1) throw DataError("'n_qubits' must be at least 1", r.line("n_qubits"));
        sweep.qubit_mass = r.number("qubit_mass", 1.0);
        const std::string pos = r.word("ancilla_position", "center");
        if (pos == "center") sweep.placement = AncillaPlacement::Center;
        else if (pos == "end") sweep.placement = AncillaPlacement::End;
        else sweep.explicit_slot = r.index("ancilla_position", 0);
        const std::string odd = r.word("odd_slot", "lower");
        if (odd == "upper") sweep.odd_slot = OddSlot::Upper;
        else if (odd != "lower") throw DataError("'odd_slot' must be lower or upper", r.line("odd_slot"));
        try {
            file.ancilla_index = sweep.ancilla_index();
            file.chain = make_mixed_chain(sweep.n_qubits, *file.ancilla_index, r.number("mass_ratio", 1.0),
                                          sweep.qubit_mass);
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what());
        }
    }
    file.chain.omega_z = omega_z;
    file.chain.k_projection = k;
    file.chain.dimensionless = scaled;
    file.chain.trap = trap_kind;
    try {
        file.chain.validate();
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("invalid chain: ") + e.what());
    }

    if (r.has("qubit_ions")) {
        file.qubit_ions = r.indices("qubit_ions");
        for (std::size_t i : file.qubit_ions)
            if (i >= file.chain.size()) throw DataError("'qubit_ions' index out of range", r.line("qubit_ions"));
    } else {
        for (std::size_t i = 0; i < file.chain.size(); ++i)
            if (!file.ancilla_index || i != *file.ancilla_index) file.qubit_ions.push_back(i);
    }

    if (r.has("carrier_rabi_frequency"))
        file.carrier_rate = 2.0 * constants::pi * r.number("carrier_rabi_frequency", 0.0);

    ReadoutModel& ro = file.readout;
    ro.lambda_bright = r.number("lambda_bright", ro.lambda_bright);
    ro.lambda_dark = r.number("lambda_dark", ro.lambda_dark);
    ro.lambda_bg = r.number("lambda_bg", ro.lambda_bg);
    ro.gamma = r.number("repump_rate", ro.gamma);
    ro.t_detect = r.number("detection_time", ro.t_detect);
    ro.n_max = static_cast<int>(r.index("n_max", static_cast<std::size_t>(ro.n_max)));
    try {
        ro.validate();
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("invalid readout model: ") + e.what());
    }
    return file;
}

ChainFile load_chain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file '" + path + "'");
    return parse_chain_file(in);
}

}  // namespace dicke
