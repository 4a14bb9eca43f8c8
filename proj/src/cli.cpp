#include "dicke/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "dicke/circuit.hpp"
#include "dicke/diagnostics.hpp"
#include "dicke/errors.hpp"
#include "dicke/sweep.hpp"

namespace dicke {

namespace {

struct GlobalFlags {
    std::string format;
    std::string out;
    unsigned workers = 0;
    std::optional<std::uint64_t> seed;
    std::string freq_display = "angular";
    bool timing = false;
};

void apply_overrides(sweep::SweepConfig& cfg, const GlobalFlags& flags) {
    if (!flags.out.empty()) cfg.path = flags.out;
    if (flags.format == "csv") cfg.format = sweep::OutputFormat::csv;
    else if (flags.format == "jsonl") cfg.format = sweep::OutputFormat::jsonl;
    if (flags.seed) cfg.seed = *flags.seed;
}

int run_sweep_command(const std::string& config_path, const GlobalFlags& flags, std::ostream& out, std::ostream& err) {
    sweep::SweepConfig cfg = sweep::load_config(config_path);
    apply_overrides(cfg, flags);

    std::vector<sweep::SweepRow> rows;
    int status = 0;
    try {
        rows = sweep::run_sweep(cfg, {flags.workers, flags.timing});
    } catch (const sweep::SweepAborted& aborted) {
        err << "error: " << aborted.what() << '\n';
        rows = aborted.partial_rows();
        status = 2;
        if (rows.empty()) return status;
    }

    for (const auto& row : rows)
        if (!row.error.empty()) err << "warning: N=" << row.N << " g=" << row.g << " v=" << row.v << ": " << row.error << '\n';

    try {
        for (const std::string& path : sweep::emit_results(rows, cfg, out)) err << "wrote " << path << '\n';
    } catch (const IoError& e) {
        // Keep the computed rows: fall back to the console.
        err << "error: " << e.what() << "; writing the table to stdout instead\n";
        out << sweep::rows_to_csv(rows);
        return 2;
    }
    return status;
}

int run_landscape_command(const std::string& config_path, const GlobalFlags& flags, std::ostream& out, std::ostream& err) {
    sweep::SweepConfig cfg = sweep::load_config(config_path);
    apply_overrides(cfg, flags);
    const std::vector<ModelParams> points = cfg.grid();
    if (cfg.path.empty()) {
        if (points.size() != 1) throw std::invalid_argument("landscape: several grid points need --out or an outputs path");
        out << sweep::landscape_csv(points.front(), cfg.landscape_theta_steps, cfg.landscape_phi_steps);
        return 0;
    }
    const std::filesystem::path main(cfg.path);
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::filesystem::path path = main;
        if (points.size() > 1) path = main.parent_path() / (main.stem().string() + "." + std::to_string(i) + main.extension().string());
        sweep::write_text_file(path, sweep::landscape_csv(points[i], cfg.landscape_theta_steps, cfg.landscape_phi_steps));
        err << "wrote " << path.string() << '\n';
    }
    return 0;
}

int run_convergence_command(const std::string& config_path, const GlobalFlags& flags, std::ostream& out) {
    sweep::SweepConfig cfg = sweep::load_config(config_path);
    apply_overrides(cfg, flags);
    std::ostringstream table;
    table << "N,omega,g,v,M,accepted,E0,E1,E2\n";
    for (const ModelParams& p : cfg.grid()) {
        ConvergenceOptions opts;
        opts.tol = cfg.tol;
        opts.k = 3;
        opts.max_dim = cfg.max_dim;
        opts.solver.seed = cfg.seed;
        const ConvergenceReport report = converge_cutoff(p, opts);
        for (const ConvergenceStep& step : report.history) {
            table << p.N << ',' << sweep::format_number(p.omega) << ',' << sweep::format_number(p.g) << ','
                  << sweep::format_number(p.v) << ',' << step.M << ',' << (step.M == report.M_star ? "true" : "false");
            for (double e : step.energies) table << ',' << sweep::format_number(e);
            table << '\n';
        }
    }
    if (cfg.path.empty()) {
        out << table.str();
    } else {
        sweep::write_text_file(cfg.path, table.str());
    }
    return 0;
}

int run_map_circuit_command(const std::string& device_path, const GlobalFlags& flags, std::ostream& out) {
    const circuit::CircuitParams c = circuit::read_device_file(device_path);
    const circuit::DerivedModel derived = circuit::derive_model_params(c);
    const circuit::RegimeReport regime = circuit::validate_regime(derived.model, derived.atom);

    const bool linear = flags.freq_display == "linear";
    const double scale = linear ? 1.0 / (2.0 * circuit::kPi) : 1.0;
    auto freq = [&](double value) { return sweep::format_number(value * scale); };

    out << "units = " << (linear ? "MHz (linear frequency, value / 2pi)" : "1e6 rad/s (angular frequency)") << '\n'
        << "N = " << derived.model.N << '\n'
        << "omega = " << freq(derived.model.omega) << '\n'
        << "g = " << freq(derived.model.g) << '\n'
        << "v = " << freq(derived.model.v) << '\n'
        << "u = " << freq(derived.model.u()) << '\n'
        << "epsilon = " << freq(derived.atom.epsilon) << '\n'
        << "eta = " << freq(derived.atom.eta) << '\n'
        << "kappa = " << sweep::format_number(derived.atom.kappa) << '\n'
        << "u_lt_v = " << (regime.u_lt_v ? "true" : "false") << '\n'
        << "optimal_point = " << (regime.optimal_point ? "true" : "false") << '\n'
        << "eta_zero = " << (regime.eta_zero ? "true" : "false") << '\n';
    for (const std::string& message : regime.messages) out << "# " << message << '\n';
    return 0;
}

struct SpectrumFlags {
    int N = 1;
    double omega = 1.0;
    std::optional<double> g;
    std::optional<double> u;
    double v = 0.0;
    int k = 6;
    std::string mode = "full";
    std::optional<int> cutoff;
    double tol = 1e-10;
};

int run_spectrum_command(const SpectrumFlags& s, const GlobalFlags& flags, std::ostream& out) {
    if (s.g && s.u) throw std::invalid_argument("spectrum: --g and --u are mutually exclusive");
    ModelParams p = s.u ? ModelParams::from_u(s.N, s.omega, *s.u, s.v) : ModelParams{s.N, s.omega, s.g.value_or(0.0), s.v};
    p.validate();

    SolverOptions solver;
    solver.seed = flags.seed.value_or(0);
    SpectrumResult spectrum;
    int cutoff = 0;
    if (s.mode == "spin-only") {
        spectrum = dense_spectrum(polaron_spin_hamiltonian(p), std::min(s.k, p.N + 1));
    } else if (s.cutoff) {
        cutoff = *s.cutoff;
        solver.k = s.k;
        spectrum = lowest_spectrum(build_full_hamiltonian(p, cutoff), solver);
    } else {
        ConvergenceOptions opts;
        opts.tol = s.tol;
        opts.k = s.k;
        opts.solver = solver;
        const ConvergenceReport report = converge_cutoff(p, opts);
        cutoff = report.M_star;
        spectrum = report.spectrum;
    }

    out << "# N=" << p.N << " omega=" << sweep::format_number(p.omega) << " g=" << sweep::format_number(p.g)
        << " v=" << sweep::format_number(p.v) << " u=" << sweep::format_number(p.u()) << " mode=" << s.mode
        << " M=" << cutoff << " solver=" << to_string(spectrum.solver)
        << " converged=" << (spectrum.converged ? "true" : "false") << '\n';
    out << "level,energy\n";
    for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i)
        out << i << ',' << sweep::format_number(spectrum.eigenvalues[i]) << '\n';
    if (spectrum.eigenvalues.size() >= 3) {
        const SplittingGap sg = splitting_and_gap(spectrum.eigenvalues);
        out << "# d=" << sweep::format_number(sg.d) << " Delta=" << sweep::format_number(sg.Delta) << '\n';
    }
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact diagonalization and semiclassics for the extended Dicke model", "dicke"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags flags;
    app.add_option("--format", flags.format, "Table format")->check(CLI::IsMember({"csv", "jsonl"}));
    app.add_option("--out", flags.out, "Output path (overrides the config)");
    app.add_option("--workers", flags.workers, "Worker threads (default: hardware concurrency)")->check(CLI::PositiveNumber);
    app.add_option("--seed", flags.seed, "Seed for solver start vectors");
    app.add_option("--freq-display", flags.freq_display, "Frequency display for map-circuit")
        ->check(CLI::IsMember({"angular", "linear"}));
    app.add_flag("--timing", flags.timing, "Record wall_time_seconds (output is then not reproducible)");

    SpectrumFlags spec;
    auto* spectrum = app.add_subcommand("spectrum", "Lowest eigenvalues at one parameter point");
    spectrum->add_option("--N", spec.N, "Atom count")->required()->check(CLI::PositiveNumber);
    spectrum->add_option("--omega", spec.omega, "Cavity frequency");
    spectrum->add_option("--g", spec.g, "Atom-field coupling");
    spectrum->add_option("--u", spec.u, "g^2/omega (alternative to --g)");
    spectrum->add_option("--v", spec.v, "Atom-atom interaction")->required();
    spectrum->add_option("--k", spec.k, "Number of eigenvalues")->check(CLI::PositiveNumber);
    spectrum->add_option("--mode", spec.mode, "full or spin-only")->check(CLI::IsMember({"full", "spin-only"}));
    spectrum->add_option("--cutoff", spec.cutoff, "Fixed Fock cutoff (default: converge)");
    spectrum->add_option("--tol", spec.tol, "Cutoff convergence tolerance");

    std::string config_path;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
    sweep_cmd->add_option("config", config_path, "Sweep configuration")->required();
    auto* landscape = app.add_subcommand("landscape", "Export the reduced semiclassical energy surface");
    landscape->add_option("config", config_path, "Sweep configuration")->required();
    auto* convergence = app.add_subcommand("convergence", "Fock cutoff convergence history");
    convergence->add_option("config", config_path, "Sweep configuration")->required();
    std::string device_path;
    auto* map_circuit = app.add_subcommand("map-circuit", "Map device parameters to model parameters");
    map_circuit->add_option("device", device_path, "Device parameter file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (spectrum->parsed()) return run_spectrum_command(spec, flags, out);
        if (sweep_cmd->parsed()) return run_sweep_command(config_path, flags, out, err);
        if (landscape->parsed()) return run_landscape_command(config_path, flags, out, err);
        if (convergence->parsed()) return run_convergence_command(config_path, flags, out);
        if (map_circuit->parsed()) return run_map_circuit_command(device_path, flags, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

} // namespace dicke
