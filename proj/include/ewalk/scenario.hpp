#pragma once

// Declarative scenarios: JSON configs, the built-in figure presets, and the
// runner that turns a config into CSV series and SVG plots.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ewalk/ladder.hpp"

namespace ewalk {

enum class ScenarioKind { classical, quantum, mu_sweep, bias_sweep };

// a + b / (c + n)
struct LevelFormula {
    double a = 0.0;
    double b = 0.0;
    double c = 1.0;

    double at(std::size_t n) const { return a + b / (c + static_cast<double>(n)); }
    bool operator==(const LevelFormula&) const = default;
};

struct RateSpec {
    enum class Type { constant, level_dependent, bias };

    Type type = Type::constant;
    std::string label;
    double p_plus = 0.0;
    double p_zero = 0.1;
    double p_minus = 0.0;
    LevelFormula plus_formula;
    LevelFormula minus_formula;
    std::vector<double> bias;

    bool operator==(const RateSpec&) const = default;
};

struct InitialSpec {
    enum class Type { gaussian, delta, gibbs };

    Type type = Type::gaussian;
    double center = 0.0;
    double width = 1.0;
    std::size_t level = 0;
    double beta = 1.0;

    bool operator==(const InitialSpec&) const = default;
};

struct ScenarioConfig {
    std::string name;
    std::string description;
    ScenarioKind kind = ScenarioKind::classical;
    std::size_t levels = 0;
    double gap = 1.0;
    std::vector<RateSpec> rates;
    std::vector<double> mu;
    InitialSpec initial;
    std::size_t steps = 0;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;

    bool operator==(const ScenarioConfig&) const = default;
};

const char* to_string(ScenarioKind kind) noexcept;

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ScenarioConfig& cfg);

// Materialized inputs of a config.
EnergySpectrum scenario_spectrum(const ScenarioConfig& cfg);
PopulationVector scenario_initial(const ScenarioConfig& cfg);
TransitionRates scenario_rates(const RateSpec& spec, std::size_t levels);
TransitionRates bias_rates(double bias, double p_zero);

struct PresetInfo {
    std::string name;
    std::string description;
};

std::vector<PresetInfo> list_presets();
ScenarioConfig preset_config(const std::string& name);
const std::string& preset_source(const std::string& name);

struct RunOptions {
    std::filesystem::path out_dir = "out";
    bool svg = true;
    // 0 selects EWALK_WORKERS or the hardware concurrency.
    std::size_t workers = 0;
};

struct RunReport {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opts);

std::size_t default_worker_count();

// Shortest round-trip decimal rendering.
std::string format_double(double v);

struct SelftestSummary {
    int passed = 0;
    int failed = 0;
};

// Oracle-equivalence and invariant battery; one line per check on `log`.
SelftestSummary run_selftest(std::ostream& log);

// Process exit code for a library error (2 schema/parse, 3 non-convergence,
// 4 runtime invariant violation, 1 otherwise).
int exit_code_for(Errc code) noexcept;

}  // namespace ewalk
