#include "dicke/sweep.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "dicke/circuit.hpp"
#include "dicke/errors.hpp"
#include "dicke/semiclassics.hpp"
#include "text_util.hpp"

namespace dicke::sweep {

namespace {

enum class Section { none, model, engine, outputs };

const std::map<std::string, Section>& key_sections() {
    static const std::map<std::string, Section> keys = {
        {"N_list", Section::model},
        {"omega", Section::model},
        {"g_list", Section::model},
        {"u_list", Section::model},
        {"uv_ratio_list", Section::model},
        {"v_list", Section::model},
        {"circuit", Section::model},
        {"mode", Section::engine},
        {"k", Section::engine},
        {"tol", Section::engine},
        {"seed", Section::engine},
        {"budget_seconds", Section::engine},
        {"max_dim", Section::engine},
        {"path", Section::outputs},
        {"format", Section::outputs},
        {"emit", Section::outputs},
        {"landscape_theta_steps", Section::outputs},
        {"landscape_phi_steps", Section::outputs},
    };
    return keys;
}

struct Value {
    std::string text;
    std::size_t line;
};

std::vector<double> parse_double_list(const Value& v, const std::string& key) {
    std::vector<double> out;
    for (const std::string& item : detail::split_list(v.text)) out.push_back(detail::parse_double(item, v.line, key));
    return out;
}

std::vector<int> parse_int_list(const Value& v, const std::string& key) {
    std::vector<int> out;
    for (const std::string& item : detail::split_list(v.text)) out.push_back(detail::parse_int(item, v.line, key));
    return out;
}

} // namespace

SweepConfig parse_config(std::string_view text) {
    std::map<std::string, Value> values;
    Section section = Section::none;
    std::size_t line_no = 0;
    for (const std::string& raw : detail::split_lines(text)) {
        ++line_no;
        const std::string line = detail::trim(detail::strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line == "[model]") section = Section::model;
            else if (line == "[engine]") section = Section::engine;
            else if (line == "[outputs]") section = Section::outputs;
            else throw ParseError(line_no, "unknown section '" + line + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const auto known = key_sections().find(key);
        if (known == key_sections().end()) throw ParseError(line_no, "unknown key '" + key + "'");
        if (section != Section::none && known->second != section)
            throw ParseError(line_no, "key '" + key + "' does not belong in this section");
        if (values.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
        if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");
        values[key] = {value, line_no};
    }
    const std::size_t end_line = line_no;

    SweepConfig cfg;
    auto has = [&](const char* key) { return values.count(key) > 0; };
    auto number = [&](const char* key) { return detail::parse_double(values[key].text, values[key].line, key); };
    auto integer = [&](const char* key) { return detail::parse_int(values[key].text, values[key].line, key); };

    // [model]
    if (has("N_list")) cfg.N_list = parse_int_list(values["N_list"], "N_list");
    for (int N : cfg.N_list)
        if (N < 1) throw ParseError(values["N_list"].line, "N_list entries must be >= 1");
    if (has("circuit")) {
        cfg.circuit = values["circuit"].text;
        for (const char* key : {"omega", "g_list", "u_list", "uv_ratio_list", "v_list"})
            if (has(key)) throw ParseError(values[key].line, std::string("'") + key + "' conflicts with 'circuit'");
    } else {
        if (!has("N_list")) throw ParseError(end_line, "missing required key 'N_list'");
        if (has("omega")) cfg.omega = number("omega");
        if (!(cfg.omega > 0.0)) throw ParseError(values["omega"].line, "omega must be positive");

        int couplings = 0;
        for (const auto& [key, kind] : {std::pair{"g_list", Coupling::g}, std::pair{"u_list", Coupling::u},
                                        std::pair{"uv_ratio_list", Coupling::uv_ratio}}) {
            if (!has(key)) continue;
            ++couplings;
            cfg.coupling = kind;
            cfg.coupling_list = parse_double_list(values[key], key);
            if (kind != Coupling::g)
                for (double x : cfg.coupling_list)
                    if (!(x >= 0.0)) throw ParseError(values[key].line, std::string(key) + " entries must be >= 0");
        }
        if (couplings == 0) throw ParseError(end_line, "missing coupling axis: one of g_list, u_list, uv_ratio_list");
        if (couplings > 1) throw ParseError(end_line, "g_list, u_list and uv_ratio_list are mutually exclusive");
        if (!has("v_list")) throw ParseError(end_line, "missing required key 'v_list'");
        cfg.v_list = parse_double_list(values["v_list"], "v_list");
        for (double v : cfg.v_list)
            if (!(v >= 0.0)) throw ParseError(values["v_list"].line, "v_list entries must be >= 0");
    }

    // [engine]
    if (has("mode")) {
        const std::string& mode = values["mode"].text;
        if (mode == "full") cfg.mode = EngineMode::full;
        else if (mode == "spin-only") cfg.mode = EngineMode::spin_only;
        else throw ParseError(values["mode"].line, "mode must be 'full' or 'spin-only', got '" + mode + "'");
    }
    if (has("k")) cfg.k = integer("k");
    if (cfg.k < 1) throw ParseError(values["k"].line, "k must be >= 1");
    if (has("tol")) cfg.tol = number("tol");
    if (!(cfg.tol > 0.0)) throw ParseError(values["tol"].line, "tol must be positive");
    if (has("seed")) {
        const auto& v = values["seed"];
        const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), cfg.seed);
        if (ec != std::errc() || ptr != v.text.data() + v.text.size()) throw ParseError(v.line, "malformed seed");
    }
    if (has("budget_seconds")) cfg.budget_seconds = number("budget_seconds");
    if (cfg.budget_seconds < 0.0) throw ParseError(values["budget_seconds"].line, "budget_seconds must be >= 0");
    if (has("max_dim")) {
        const int max_dim = integer("max_dim");
        if (max_dim < 1) throw ParseError(values["max_dim"].line, "max_dim must be >= 1");
        cfg.max_dim = static_cast<std::size_t>(max_dim);
    }

    // [outputs]
    if (has("path")) cfg.path = values["path"].text;
    if (has("format")) {
        const std::string& format = values["format"].text;
        if (format == "csv") cfg.format = OutputFormat::csv;
        else if (format == "jsonl" || format == "json-lines") cfg.format = OutputFormat::jsonl;
        else throw ParseError(values["format"].line, "format must be csv or json-lines, got '" + format + "'");
    }
    if (has("emit")) {
        cfg.emit = EmitSet{false, false, false, false, false};
        for (const std::string& item : detail::split_list(values["emit"].text)) {
            if (item == "spectrum") cfg.emit.spectrum = true;
            else if (item == "splitting") cfg.emit.splitting = true;
            else if (item == "degeneracy") cfg.emit.degeneracy = true;
            else if (item == "landscape") cfg.emit.landscape = true;
            else if (item == "scaling-fit") cfg.emit.scaling_fit = true;
            else throw ParseError(values["emit"].line, "unknown emit target '" + item + "'");
        }
    }
    if (has("landscape_theta_steps")) cfg.landscape_theta_steps = integer("landscape_theta_steps");
    if (has("landscape_phi_steps")) cfg.landscape_phi_steps = integer("landscape_phi_steps");
    if (cfg.landscape_theta_steps < 2 || cfg.landscape_phi_steps < 2)
        throw ParseError(end_line, "landscape grids need at least 2 steps per axis");

    if ((cfg.emit.splitting || cfg.emit.scaling_fit) && cfg.k < 3)
        throw ParseError(has("k") ? values["k"].line : end_line, "k must be >= 3 when splitting is requested");
    if (cfg.circuit.empty() && (cfg.N_list.empty() || cfg.coupling_list.empty() || cfg.v_list.empty()))
        throw ParseError(end_line, "empty sweep: every axis needs at least one value");
    if (cfg.emit.scaling_fit && cfg.circuit.empty()) {
        const auto even = std::count_if(cfg.N_list.begin(), cfg.N_list.end(), [](int N) { return N % 2 == 0; });
        if (even < 3) throw ParseError(values["emit"].line, "scaling-fit needs at least 3 even N values");
    }
    return cfg;
}

SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    SweepConfig cfg = parse_config(buffer.str());
    cfg.base_dir = std::filesystem::path(path).parent_path().string();
    return cfg;
}

std::vector<ModelParams> SweepConfig::grid() const {
    std::vector<ModelParams> points;
    if (!circuit.empty()) {
        std::filesystem::path file(circuit);
        if (file.is_relative() && !base_dir.empty()) file = std::filesystem::path(base_dir) / file;
        const ModelParams base = circuit::derive_model_params(circuit::read_device_file(file.string())).model;
        if (N_list.empty()) return {base};
        for (int N : N_list) {
            ModelParams p = base;
            p.N = N;
            points.push_back(p);
        }
        return points;
    }
    for (int N : N_list) {
        for (double c : coupling_list) {
            for (double v : v_list) {
                ModelParams p{N, omega, 0.0, v};
                switch (coupling) {
                case Coupling::g: p.g = c; break;
                case Coupling::u: p.g = std::sqrt(c * omega); break;
                case Coupling::uv_ratio: p.g = std::sqrt(c * v * omega); break;
                }
                points.push_back(p);
            }
        }
    }
    return points;
}

SweepRow evaluate_point(const ModelParams& p, const SweepConfig& cfg, bool record_timing) {
    const auto start = std::chrono::steady_clock::now();
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    SweepRow row;
    row.N = p.N;
    row.S = p.S();
    row.omega = p.omega;
    row.g = p.g;
    row.v = p.v;
    row.u = p.u();
    row.E0 = row.E1 = row.E2 = row.d = row.Delta = nan;
    try {
        p.validate();
        if (cfg.mode == EngineMode::spin_only) {
            const Eigen::MatrixXd H = polaron_spin_hamiltonian(p);
            const SpectrumResult spectrum = dense_spectrum(H, std::min(cfg.k, p.N + 1));
            row.spectrum = spectrum.eigenvalues;
            row.M_star = 0;
            // exact diagonalization; k only caps the number of reported levels
            row.converged = spectrum.converged;
        } else {
            ConvergenceOptions opts;
            opts.tol = cfg.tol;
            opts.k = cfg.k;
            opts.max_dim = cfg.max_dim;
            opts.solver.seed = cfg.seed;
            const ConvergenceReport report = converge_cutoff(p, opts);
            row.spectrum = report.spectrum.eigenvalues;
            row.M_star = report.M_star;
            row.converged = report.converged;
            const std::vector<double> reference = polaron_ladder_spectrum(p, cfg.k);
            double deviation = 0.0;
            for (std::size_t i = 0; i < row.spectrum.size(); ++i)
                deviation = std::max(deviation, std::abs(row.spectrum[i] - reference[i]));
            row.oracle_deviation = deviation;
        }
        const auto& e = row.spectrum;
        if (!e.empty()) row.E0 = e[0];
        if (e.size() > 1) row.E1 = e[1];
        if (e.size() > 2) {
            row.E2 = e[2];
            const SplittingGap sg = splitting_and_gap(e);
            row.d = sg.d;
            row.Delta = sg.Delta;
        }
        const DegeneracyReport deg = degeneracy_classes(e, default_cluster_tol(e));
        row.degeneracy = deg.classes;
        // The top class may be cut off by the level count, so it only counts
        // when the whole spin space was diagonalized.
        const bool complete = cfg.mode == EngineMode::spin_only && static_cast<int>(e.size()) == p.N + 1;
        const std::size_t counted = complete || deg.classes.empty() ? deg.classes.size() : deg.classes.size() - 1;
        row.pairing_ok = counted > 0;
        for (std::size_t i = 0; i < counted; ++i)
            row.pairing_ok = row.pairing_ok && deg.classes[i].multiplicity % 2 == 0;
        if (e.size() < 3) row.error = "fewer than 3 levels: Delta undefined";
    } catch (const std::exception& ex) {
        row.converged = false;
        row.error = ex.what();
    }
    if (record_timing)
        row.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const RunOptions& opts) {
    const std::vector<ModelParams> points = cfg.grid();
    if (points.empty()) throw std::invalid_argument("run_sweep: empty grid");

    unsigned workers = opts.workers > 0 ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(points.size()));

    std::vector<SweepRow> rows(points.size());
    std::vector<char> done(points.size(), 0);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> out_of_budget{false};
    const auto start = std::chrono::steady_clock::now();

    auto worker = [&] {
        while (true) {
            if (cfg.budget_seconds > 0.0 &&
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() > cfg.budget_seconds) {
                out_of_budget = true;
                return;
            }
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            rows[i] = evaluate_point(points[i], cfg, opts.record_timing);
            done[i] = 1;
        }
    };

    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    if (out_of_budget) {
        std::vector<SweepRow> partial;
        for (std::size_t i = 0; i < rows.size() && done[i]; ++i) partial.push_back(std::move(rows[i]));
        throw SweepAborted("sweep exceeded budget of " + format_number(cfg.budget_seconds) + " s after " +
                               std::to_string(partial.size()) + " of " + std::to_string(points.size()) + " points",
                           std::move(partial));
    }
    return rows;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

namespace {

const char* boolean(bool b) { return b ? "true" : "false"; }

std::string json_number(double value) { return std::isfinite(value) ? format_number(value) : "null"; }

} // namespace

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const SweepRow& r : rows) {
        out << r.N << ',' << format_number(r.S) << ',' << format_number(r.omega) << ',' << format_number(r.g) << ','
            << format_number(r.v) << ',' << format_number(r.u) << ',' << r.M_star << ',' << format_number(r.E0) << ','
            << format_number(r.E1) << ',' << format_number(r.E2) << ',' << format_number(r.d) << ','
            << format_number(r.Delta) << ',' << boolean(r.pairing_ok) << ','
            << (r.oracle_deviation ? format_number(*r.oracle_deviation) : "") << ',' << boolean(r.converged) << ','
            << format_number(r.wall_time_seconds) << '\n';
    }
    return out.str();
}

std::string rows_to_jsonl(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    for (const SweepRow& r : rows) {
        out << "{\"N\":" << r.N << ",\"S\":" << json_number(r.S) << ",\"omega\":" << json_number(r.omega)
            << ",\"g\":" << json_number(r.g) << ",\"v\":" << json_number(r.v) << ",\"u\":" << json_number(r.u)
            << ",\"M_star\":" << r.M_star << ",\"E0\":" << json_number(r.E0) << ",\"E1\":" << json_number(r.E1)
            << ",\"E2\":" << json_number(r.E2) << ",\"d\":" << json_number(r.d) << ",\"Delta\":" << json_number(r.Delta)
            << ",\"pairing_ok\":" << boolean(r.pairing_ok) << ",\"oracle_deviation\":"
            << (r.oracle_deviation ? json_number(*r.oracle_deviation) : "null") << ",\"converged\":"
            << boolean(r.converged) << ",\"wall_time_seconds\":" << json_number(r.wall_time_seconds) << "}\n";
    }
    return out.str();
}

std::string landscape_csv(const ModelParams& p, int theta_steps, int phi_steps) {
    if (theta_steps < 2 || phi_steps < 2) throw std::invalid_argument("landscape_csv: need at least 2 steps per axis");
    std::ostringstream out;
    out << "theta,phi,energy\n";
    for (int i = 0; i < theta_steps; ++i) {
        const double theta = std::numbers::pi * i / (theta_steps - 1);
        for (int j = 0; j < phi_steps; ++j) {
            const double phi = 2.0 * std::numbers::pi * j / (phi_steps - 1);
            out << format_number(theta) << ',' << format_number(phi) << ','
                << format_number(reduced_surface(p, theta, phi)) << '\n';
        }
    }
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content, std::vector<std::string>& written) {
    write_text_file(path, content);
    written.push_back(path.string());
}

std::filesystem::path sibling(const std::filesystem::path& main, const std::string& tag, std::size_t index,
                              std::size_t count) {
    std::string name = main.stem().string() + "." + tag;
    if (count > 1) name += "." + std::to_string(index);
    return main.parent_path() / (name + ".csv");
}

std::string point_prefix(const SweepRow& r) {
    return std::to_string(r.N) + ',' + format_number(r.omega) + ',' + format_number(r.g) + ',' + format_number(r.v);
}

} // namespace

std::vector<std::string> emit_results(const std::vector<SweepRow>& rows, const SweepConfig& cfg, std::ostream& console) {
    if (rows.empty()) throw std::invalid_argument("emit_results: no rows");
    std::vector<std::string> written;
    const std::string table = cfg.format == OutputFormat::csv ? rows_to_csv(rows) : rows_to_jsonl(rows);
    const bool siblings = cfg.emit.spectrum || cfg.emit.degeneracy || cfg.emit.landscape || cfg.emit.scaling_fit;
    if (cfg.path.empty()) {
        if (siblings) throw std::invalid_argument("spectrum/degeneracy/landscape/scaling-fit outputs need an output path");
        console << table;
        return written;
    }

    const std::filesystem::path main(cfg.path);
    write_file(main, table, written);

    if (cfg.emit.spectrum) {
        std::ostringstream out;
        out << "N,omega,g,v,level,energy\n";
        for (const SweepRow& r : rows)
            for (std::size_t i = 0; i < r.spectrum.size(); ++i)
                out << point_prefix(r) << ',' << i << ',' << format_number(r.spectrum[i]) << '\n';
        write_file(sibling(main, "spectrum", 0, 1), out.str(), written);
    }
    if (cfg.emit.degeneracy) {
        std::ostringstream out;
        out << "N,omega,g,v,energy,multiplicity\n";
        for (const SweepRow& r : rows)
            for (const DegeneracyClass& c : r.degeneracy)
                out << point_prefix(r) << ',' << format_number(c.energy) << ',' << c.multiplicity << '\n';
        write_file(sibling(main, "degeneracy", 0, 1), out.str(), written);
    }
    if (cfg.emit.landscape) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const ModelParams p{rows[i].N, rows[i].omega, rows[i].g, rows[i].v};
            write_file(sibling(main, "landscape", i, rows.size()),
                       landscape_csv(p, cfg.landscape_theta_steps, cfg.landscape_phi_steps), written);
        }
    }
    if (cfg.emit.scaling_fit) {
        // One fit per (omega, g, v), over converged even-N rows with d > 0.
        std::vector<std::vector<std::pair<int, double>>> groups;
        std::vector<std::array<double, 3>> keys;
        for (const SweepRow& r : rows) {
            if (r.N % 2 != 0 || !r.converged || !(r.d > 0.0)) continue;
            const std::array<double, 3> key{r.omega, r.g, r.v};
            auto it = std::find(keys.begin(), keys.end(), key);
            if (it == keys.end()) {
                keys.push_back(key);
                groups.emplace_back();
                it = keys.end() - 1;
            }
            groups[static_cast<std::size_t>(it - keys.begin())].emplace_back(r.N, r.d);
        }
        std::erase_if(groups, [](const auto& g) { return g.size() < 3; });
        if (groups.empty()) throw std::invalid_argument("scaling-fit: no parameter point has 3 even-N rows with d > 0");
        for (std::size_t i = 0; i < groups.size(); ++i) {
            const ScalingFit fit = splitting_scaling_fit(groups[i]);
            std::ostringstream points;
            points << "N,d,ln_d\n";
            for (const auto& [N, d] : fit.points)
                points << N << ',' << format_number(d) << ',' << format_number(std::log(d)) << '\n';
            write_file(sibling(main, "scaling", i, groups.size()), points.str(), written);
            const std::string summary = "slope,intercept,r_squared\n" + format_number(fit.slope) + ',' +
                                        format_number(fit.intercept) + ',' + format_number(fit.r_squared) + '\n';
            write_file(sibling(main, "scaling_fit", i, groups.size()), summary, written);
        }
    }
    return written;
}

} // namespace dicke::sweep
