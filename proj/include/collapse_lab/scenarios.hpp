#pragma once

#include <collapse_lab/analysis.hpp>
#include <collapse_lab/ensemble.hpp>
#include <collapse_lab/noise.hpp>

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace collapse_lab {

/// Resolved settings shared by every scenario. Times are in the same unit as
/// 1/J (J defaults to 1, so they read directly as tJ).
struct ScenarioConfig {
    std::size_t n_traj = 100000;
    double alpha0_sq = 0.75;
    double coupling_j = 1.0;
    double coupling_g = 1.0;
    double dt = 1e-3;
    double t_max = 6.0;
    double record_every = 0.01;
    NoiseKind noise = NoiseKind::frozen;
    double tau = 1.0;
    double g0 = NoiseSpec{}.g0;
    double lambda = 1.0;
    double gamma = 2.0;
    bool stratified = false;
    std::uint64_t seed = 20240613;
    unsigned workers = 0;
    std::size_t k_samples = 7;
    double t_interrupt = 1.0;
    double born_tolerance = 0.005;
    std::string out_dir = ".";
    std::string run_id;  ///< file stem suffix; a UTC timestamp when empty

    ModelParams model() const;
    NoiseSpec noise_spec(NoiseKind kind) const;
    EnsembleConfig ensemble(NoiseKind kind) const;
    void validate() const;
};

void to_json(nlohmann::json& j, const ScenarioConfig& c);
void from_json(const nlohmann::json& j, ScenarioConfig& c);

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ScenarioResult {
    std::string scenario;
    std::vector<std::filesystem::path> outputs;  ///< data files, manifest last
    std::vector<Check> checks;
    nlohmann::json summary;                       ///< scenario-specific numbers

    bool passed() const;
};

ScenarioResult scenario_fig1(const ScenarioConfig& config);
ScenarioResult scenario_fig2(const ScenarioConfig& config);
ScenarioResult scenario_interrupt(const ScenarioConfig& config);
ScenarioResult scenario_born(const ScenarioConfig& config);
ScenarioResult scenario_dephasing(const ScenarioConfig& config);

/// Dispatch by subcommand name.
ScenarioResult run_scenario(const std::string& name, const ScenarioConfig& config);

/// Re-runs the scenario recorded in a manifest. Data files are written to
/// `out_dir` under `run_id`; their bytes match the original run.
ScenarioResult replay_manifest(const std::filesystem::path& manifest, const std::string& out_dir,
                               const std::string& run_id);

/// Version string recorded in manifests.
const char* version() noexcept;

// CSV layer.

/// Decimal with 12 significant digits.
std::string format_number(double value);

inline constexpr const char* kEntropySchema = "collapse_lab.entropy/1";

/// Writes records with a schema line, a units line and a header row.
void write_entropy_csv(const std::filesystem::path& path, const std::vector<EntropyRecord>& records);

}  // namespace collapse_lab
