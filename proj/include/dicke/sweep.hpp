#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dicke/diagnostics.hpp"
#include "dicke/model.hpp"

namespace dicke::sweep {

enum class EngineMode { full, spin_only };
enum class OutputFormat { csv, jsonl };
enum class Coupling { g, u, uv_ratio };

struct EmitSet {
    bool spectrum = false;
    bool splitting = true;
    bool degeneracy = false;
    bool landscape = false;
    bool scaling_fit = false;
};

struct SweepConfig {
    // [model]
    std::vector<int> N_list;
    double omega = 1.0;
    Coupling coupling = Coupling::g;
    std::vector<double> coupling_list;   // g, u or u/v values depending on `coupling`
    std::vector<double> v_list;
    std::string circuit;                 // device file; replaces omega/g/v when set

    // [engine]
    EngineMode mode = EngineMode::full;
    int k = 6;
    double tol = 1e-10;
    std::uint64_t seed = 0;
    double budget_seconds = 0.0;         // 0 = unlimited
    std::size_t max_dim = 200'000;

    // [outputs]
    std::string path;                    // empty = stdout
    OutputFormat format = OutputFormat::csv;
    EmitSet emit;
    int landscape_theta_steps = 37;
    int landscape_phi_steps = 73;

    std::string base_dir;                // for resolving `circuit`

    // Grid in deterministic order: N outer, then coupling, then v.
    std::vector<ModelParams> grid() const;
};

// Line-oriented "key = value" with [model], [engine], [outputs] sections.
// Keys before the first header are looked up in every section. Unknown keys,
// malformed numbers and empty sweeps throw ParseError.
SweepConfig parse_config(std::string_view text);
SweepConfig load_config(const std::string& path);

struct SweepRow {
    int N = 0;
    double S = 0.0;
    double omega = 0.0;
    double g = 0.0;
    double v = 0.0;
    double u = 0.0;
    int M_star = 0;
    double E0 = 0.0;
    double E1 = 0.0;
    double E2 = 0.0;
    double d = 0.0;
    double Delta = 0.0;
    bool pairing_ok = false;
    std::optional<double> oracle_deviation;
    bool converged = false;
    double wall_time_seconds = 0.0;

    std::vector<double> spectrum;
    std::vector<DegeneracyClass> degeneracy;
    std::string error;
};

struct RunOptions {
    unsigned workers = 0;        // 0 = hardware concurrency
    bool record_timing = false;  // otherwise wall_time_seconds is written as 0
};

// Thrown when the global time budget runs out; carries the rows finished so
// far, as a prefix of the grid order.
class SweepAborted : public ResourceError {
public:
    SweepAborted(const std::string& message, std::vector<SweepRow> partial)
        : ResourceError(message), partial_(std::move(partial)) {}

    const std::vector<SweepRow>& partial_rows() const noexcept { return partial_; }

private:
    std::vector<SweepRow> partial_;
};

SweepRow evaluate_point(const ModelParams& p, const SweepConfig& cfg, bool record_timing = false);
std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const RunOptions& opts = {});

inline constexpr std::string_view kCsvHeader =
    "N,S,omega,g,v,u,M_star,E0,E1,E2,d,Delta,pairing_ok,oracle_deviation,converged,wall_time_seconds";

// 17 significant digits.
std::string format_number(double value);

std::string rows_to_csv(const std::vector<SweepRow>& rows);
std::string rows_to_jsonl(const std::vector<SweepRow>& rows);
std::string landscape_csv(const ModelParams& p, int theta_steps, int phi_steps);

// Creates missing parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

// Writes the main table to cfg.path (to `console` when the path is empty) and
// the requested sibling files next to it. Returns the paths written. Throws
// IoError when a file cannot be written.
std::vector<std::string> emit_results(const std::vector<SweepRow>& rows, const SweepConfig& cfg, std::ostream& console);

} // namespace dicke::sweep
