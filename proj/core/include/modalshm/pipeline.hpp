#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modalshm/beam.hpp"
#include "modalshm/indices.hpp"
#include "modalshm/stabilization.hpp"

namespace modalshm {

struct SimulationSettings {
    double sample_rate_hz = 16384.0;
    double duration_s = 4.0;
    int input_node = 1;
    double amplitude_n = 1.0;
    std::vector<Direction> input_directions{Direction::y, Direction::z};
};

struct IdentificationSettings {
    OrderRange orders{24, 50, 2};
    std::uint64_t seed = 1;
    std::array<double, 2> band_hz{1.0, 4000.0};
    StabilizationTolerances tolerances{};
    int min_streak = 3;
    Eigen::Index max_bins = 512;
};

/// Either a simulated damage scenario or a path to an external FRF container.
struct ScenarioSource {
    std::optional<DamageScenario> scenario;
    std::optional<std::string> frf_path;

    bool external() const { return frf_path.has_value(); }
};

struct RunConfig {
    std::optional<BeamConfig> beam;
    SimulationSettings simulation;
    std::map<std::string, ScenarioSource> scenarios;
    std::string baseline_id = "case1";
    IdentificationSettings identification;
    double f_gate_rel = 0.20;
    std::filesystem::path output_dir;
    int workers = 0;  // 0 picks a small pool automatically

    void validate() const;
};

/// Parses the declarative JSON run configuration. "use_presets": true loads
/// the stock beam and the five benchmark cases before explicit keys apply.
RunConfig parse_run_config(const std::filesystem::path& file);
RunConfig benchmark_run_config();

/// FNV-1a 64-bit hash of a file's bytes, as 16 hex digits.
std::string file_hash_hex(const std::filesystem::path& file);

struct CaseArtifacts {
    std::vector<std::string> ts_dirs;
    std::string frf_dir;
    std::string diagram_csv;
    std::string diagram_json;
    std::string modes_json;
    std::string report_json;
};

struct RunManifest {
    std::string config_hash;
    std::string tool_version;
    std::map<std::string, CaseArtifacts> cases;
    std::string combined_csv;
    std::map<std::string, double> timings_s;  // excluded from the hash
};

struct StageOptions {
    std::filesystem::path out_dir;  // overrides config.output_dir when set
    std::optional<std::uint64_t> seed_override;
    std::string config_hash;  // carried into the manifest by full_run
};

void cmd_simulate(const RunConfig& config, const StageOptions& options);
void cmd_identify(const RunConfig& config, const StageOptions& options);
std::vector<DamageReport> cmd_indices(const RunConfig& config,
                                      const StageOptions& options);
RunManifest cmd_full_run(const RunConfig& config, const StageOptions& options);

void write_manifest(const std::filesystem::path& file, const RunManifest& manifest);

}  // namespace modalshm
