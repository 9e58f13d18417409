#include "dicke/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dicke/config_file.hpp"
#include "dicke/errors.hpp"
#include "dicke/experiment.hpp"
#include "dicke/report_io.hpp"

namespace dicke {

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t value) {
    if (flag->count() > 0) return value;
    if (const char* env = std::getenv("DICKE_SEED")) {
        const std::string text(env);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
            throw std::invalid_argument("DICKE_SEED must be an unsigned integer, got '" + text + "'");
        return v;
    }
    return kDefaultSeed;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path + "'");
    f << text;
    if (!f) throw DataError("write to '" + path + "' failed");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

ChainFile load_optional(const std::string& path) { return path.empty() ? ChainFile{} : load_chain_file(path); }

struct ReadoutFlags {
    std::optional<double> lambda_bright, lambda_dark, lambda_bg, gamma, t_detect;

    void attach(CLI::App* app) {
        app->add_option("--lambda-bright", lambda_bright, "Mean counts of one bright ion per window");
        app->add_option("--lambda-dark", lambda_dark, "Mean counts of one dark ion per window");
        app->add_option("--lambda-bg", lambda_bg, "Mean background counts per window");
        app->add_option("--repump-rate", gamma, "Dark-to-bright repump rate (1/s)");
        app->add_option("--detection-time", t_detect, "Detection window (s)");
    }

    void apply(ReadoutModel& m) const {
        if (lambda_bright) m.lambda_bright = *lambda_bright;
        if (lambda_dark) m.lambda_dark = *lambda_dark;
        if (lambda_bg) m.lambda_bg = *lambda_bg;
        if (gamma) m.gamma = *gamma;
        if (t_detect) m.t_detect = *t_detect;
        m.validate();
    }
};

void print_diagnostics(const ModeSet& modes, std::ostream& err) {
    for (const auto& d : modes.diagnostics) err << "warning: " << d << '\n';
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mixed-species ion-chain Dicke-state simulator and readout analysis", "dicke"};
    app.require_subcommand(1);

    // modes
    std::string modes_config, modes_out, modes_format = "csv";
    auto* modes = app.add_subcommand("modes", "Equilibrium and axial normal modes of a chain");
    modes->add_option("--config", modes_config, "Chain file")->required();
    modes->add_option("--out", modes_out, "Output path (default stdout)");
    modes->add_option("--format", modes_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // sweep
    std::string sweep_config, sweep_out, sweep_format = "csv", sweep_placement, sweep_odd;
    double mu_start = 0.1, mu_stop = 10.0;
    int mu_points = 20, sweep_m = 1, maxima = 1;
    bool mu_log = false, sweep_keep_density = false;
    std::size_t sweep_n = 0;
    auto* sweep = app.add_subcommand("sweep", "First-maximum Dicke fidelity versus ancilla mass ratio");
    sweep->add_option("--config", sweep_config, "Chain file (default: two qubits, scaled units)");
    sweep->add_option("--mu-start", mu_start, "First mass ratio");
    sweep->add_option("--mu-stop", mu_stop, "Last mass ratio");
    sweep->add_option("--mu-points", mu_points, "Grid points");
    sweep->add_flag("--mu-log", mu_log, "Logarithmic grid");
    sweep->add_option("--m", sweep_m, "Number of phonons / excitations");
    sweep->add_option("--n-qubits", sweep_n, "Override the number of qubit ions");
    sweep->add_option("--placement", sweep_placement, "Ancilla position: center or end")
        ->check(CLI::IsMember({"center", "end"}));
    sweep->add_option("--odd-slot", sweep_odd, "Center slot for odd chains: lower or upper")
        ->check(CLI::IsMember({"lower", "upper"}));
    sweep->add_option("--maxima", maxima, "Take the best of the first k local maxima");
    sweep->add_flag("--densities", sweep_keep_density, "Include reduced density matrices (json only)");
    sweep->add_option("--out", sweep_out, "Output path (default stdout)");
    sweep->add_option("--format", sweep_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // experiment
    std::string exp_config, exp_out, exp_format = "json", exp_state;
    std::size_t exp_shots = 10000;
    std::uint64_t exp_seed = kDefaultSeed;
    int exp_bootstrap = 200, exp_phases = 16;
    ReadoutFlags exp_readout;
    auto* experiment = app.add_subcommand("experiment", "Synthetic end-to-end preparation and readout analysis");
    experiment->add_option("--config", exp_config, "Chain file")->required();
    experiment->add_option("--shots", exp_shots, "Shots per set");
    auto* exp_seed_opt = experiment->add_option("--seed", exp_seed, "Random seed (env DICKE_SEED when absent)");
    experiment->add_option("--bootstrap", exp_bootstrap, "Bootstrap resamples per fit");
    experiment->add_option("--phase-points", exp_phases, "Analysis phases over [0, 2pi)");
    experiment->add_option("--state", exp_state, "JSON density matrix replacing the simulated preparation");
    exp_readout.attach(experiment);
    experiment->add_option("--out", exp_out, "Output path (default stdout)");
    experiment->add_option("--format", exp_format, "json report or csv parity table")
        ->check(CLI::IsMember({"csv", "json"}));

    // fit
    std::string fit_input, fit_config, fit_model, fit_bright, fit_dark, fit_out;
    bool fit_histogram = false;
    std::uint64_t fit_seed = kDefaultSeed;
    int fit_bootstrap = 200;
    ReadoutFlags fit_readout;
    auto* fit = app.add_subcommand("fit", "Maximum-likelihood populations from recorded counts");
    fit->add_option("shots", fit_input, "Shot record (one count per line) or histogram CSV")->required();
    fit->add_flag("--histogram", fit_histogram, "Input is an n,count histogram");
    fit->add_option("--config", fit_config, "Chain file supplying the readout model");
    fit->add_option("--model", fit_model, "JSON readout model");
    auto* bright_opt = fit->add_option("--calib-bright", fit_bright, "All-bright reference shots");
    auto* dark_opt = fit->add_option("--calib-dark", fit_dark, "All-dark reference shots");
    bright_opt->needs(dark_opt);
    dark_opt->needs(bright_opt);
    fit_readout.attach(fit);
    fit->add_option("--bootstrap", fit_bootstrap, "Bootstrap resamples");
    auto* fit_seed_opt = fit->add_option("--seed", fit_seed, "Random seed (env DICKE_SEED when absent)");
    fit->add_option("--out", fit_out, "Output path (default stdout)");

    // synth
    std::vector<double> synth_c;
    std::string synth_config, synth_out;
    std::size_t synth_shots = 10000;
    std::uint64_t synth_seed = kDefaultSeed;
    bool synth_histogram = false;
    ReadoutFlags synth_readout;
    auto* synth = app.add_subcommand("synth", "Synthesize two-ion photon counts");
    synth->add_option("--populations", synth_c, "c0,c1,c2 by number of bright ions")
        ->required()
        ->delimiter(',')
        ->expected(3);
    synth->add_option("--shots", synth_shots, "Number of shots");
    auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "Random seed (env DICKE_SEED when absent)");
    synth->add_option("--config", synth_config, "Chain file supplying the readout model");
    synth_readout.attach(synth);
    synth->add_flag("--histogram", synth_histogram, "Write an n,count histogram instead of a shot record");
    synth->add_option("--out", synth_out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (modes->parsed()) {
            const ChainFile file = load_chain_file(modes_config);
            const EquilibriumSolution eq = solve_equilibrium(file.chain);
            const ModeSet ms = solve_axial_modes(file.chain, eq);
            print_diagnostics(ms, err);
            std::ostringstream text;
            if (modes_format == "csv") write_modes_csv(text, ms);
            else text << dump(modes_json(file.chain, eq, ms));
            emit(modes_out, text.str(), out);
        } else if (sweep->parsed()) {
            ChainFile file = load_optional(sweep_config);
            SweepTemplate tpl = file.sweep;
            if (sweep_n > 0) {
                tpl.n_qubits = sweep_n;
                tpl.explicit_slot.reset();
            }
            if (!sweep_placement.empty()) {
                tpl.placement = sweep_placement == "end" ? AncillaPlacement::End : AncillaPlacement::Center;
                tpl.explicit_slot.reset();
            }
            if (!sweep_odd.empty()) tpl.odd_slot = sweep_odd == "upper" ? OddSlot::Upper : OddSlot::Lower;
            if (sweep_m < 1) throw std::invalid_argument("--m must be at least 1");
            if (static_cast<std::size_t>(sweep_m) > tpl.n_qubits)
                throw std::invalid_argument("--m cannot exceed the number of qubits");
            if (maxima < 1) throw std::invalid_argument("--maxima must be at least 1");
            const std::vector<double> grid = mass_ratio_grid(mu_start, mu_stop, mu_points, mu_log);
            SearchOptions so;
            so.maxima = maxima;
            std::vector<SweepRow> rows = fidelity_vs_mass_ratio(tpl, grid, sweep_m, so);
            std::size_t failed = 0;
            for (auto& row : rows) {
                if (!row.ok()) {
                    ++failed;
                    err << "warning: " << row.error << '\n';
                }
                if (!sweep_keep_density) row.reduced_density.reset();
            }
            std::ostringstream text;
            if (sweep_format == "csv") write_sweep_csv(text, rows, sweep_m, file.carrier_rate);
            else text << dump(sweep_json(rows, sweep_m, file.carrier_rate));
            emit(sweep_out, text.str(), out);
            if (failed == rows.size()) return kExitNumeric;
        } else if (experiment->parsed()) {
            ChainFile file = load_chain_file(exp_config);
            exp_readout.apply(file.readout);
            ExperimentOptions eo;
            eo.shots = exp_shots;
            eo.seed = resolve_seed(exp_seed_opt, exp_seed);
            eo.bootstrap = exp_bootstrap;
            eo.phase_points = exp_phases;
            if (!exp_state.empty()) {
                std::ifstream in = open_input(exp_state);
                eo.prepared_state = qubit_density_from_json(nlohmann::json::parse(in));
            }
            if (eo.shots < 100) throw std::invalid_argument("--shots must be at least 100");
            if (!eo.prepared_state) print_diagnostics(solve_axial_modes(file.chain), err);
            const ExperimentReport report = run_experiment(file, eo);
            std::ostringstream text;
            if (exp_format == "csv") write_parity_csv(text, report);
            else text << dump(experiment_json(report));
            emit(exp_out, text.str(), out);
        } else if (fit->parsed()) {
            ReadoutModel model = load_optional(fit_config).readout;
            if (!fit_model.empty()) {
                std::ifstream in = open_input(fit_model);
                model = readout_model_from_json(nlohmann::json::parse(in));
            }
            fit_readout.apply(model);
            std::optional<CalibrationResult> calibration;
            if (!fit_bright.empty()) {
                std::ifstream b = open_input(fit_bright);
                std::ifstream d = open_input(fit_dark);
                const auto bright_shots = read_shots(b, model.n_max);
                const auto dark_shots = read_shots(d, model.n_max);
                calibration = calibrate(histogram_of(bright_shots, model.n_max), histogram_of(dark_shots, model.n_max),
                                        model);
                model = calibration->model;
            }
            std::ifstream in = open_input(fit_input);
            FitOptions fo;
            fo.bootstrap = fit_bootstrap;
            fo.seed = resolve_seed(fit_seed_opt, fit_seed);
            const CompositeDists dists = composite_dists(model);
            FitResult result;
            if (fit_histogram) {
                const Histogram h = read_histogram_csv(in, model.n_max);
                if (h.total() == 0) throw DataError("histogram '" + fit_input + "' is empty");
                result = ml_fit(h, dists, fo);
            } else {
                const auto shots = read_shots(in, model.n_max);
                if (shots.empty()) throw DataError("shot file '" + fit_input + "' is empty");
                result = ml_fit(std::span<const int>(shots), dists, fo);
            }
            nlohmann::json j;
            j["schema"] = "dicke-fit/v1";
            j["fit"] = to_json(result);
            j["parity"] = parity_from_fit(result);
            j["model"] = to_json(model);
            if (calibration) {
                j["calibration"] = {{"log_likelihood", calibration->log_likelihood},
                                    {"deviance", calibration->deviance},
                                    {"degrees_of_freedom", calibration->degrees_of_freedom}};
            }
            emit(fit_out, dump(j), out);
        } else if (synth->parsed()) {
            ReadoutModel model = load_optional(synth_config).readout;
            synth_readout.apply(model);
            const Populations c{synth_c.at(0), synth_c.at(1), synth_c.at(2)};
            const auto shots =
                synthesize_shots(c, composite_dists(model), synth_shots, resolve_seed(synth_seed_opt, synth_seed));
            std::ostringstream text;
            if (synth_histogram) write_histogram_csv(text, histogram_of(shots, model.n_max));
            else write_shots(text, shots);
            emit(synth_out, text.str(), out);
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const IdentifiabilityError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const nlohmann::json::exception& e) {
        err << "data error: malformed JSON: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitOk;
}

}  // namespace dicke
