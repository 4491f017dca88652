#include "modalshm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "modalshm/frf.hpp"
#include "modalshm/io.hpp"
#include "modalshm/version.hpp"

namespace modalshm {

namespace {

using nlohmann::json;

std::filesystem::path case_dir(const std::filesystem::path& out, const std::string& id) {
    return out / id;
}

std::filesystem::path resolve_out_dir(const RunConfig& config, const StageOptions& options) {
    if (!options.out_dir.empty()) return options.out_dir;
    if (!config.output_dir.empty()) return config.output_dir;
    throw std::invalid_argument("config: no output directory given (config or --out)");
}

std::uint64_t resolve_seed(const RunConfig& config, const StageOptions& options) {
    return options.seed_override.value_or(config.identification.seed);
}

/// Runs one job per case on a small pool; rethrows the first failure in
/// case-id order so diagnostics stay deterministic.
void for_each_case(const RunConfig& config, int workers,
                   const std::function<void(const std::string&, const ScenarioSource&)>& job) {
    std::vector<std::pair<std::string, const ScenarioSource*>> items;
    for (const auto& [id, source] : config.scenarios) items.emplace_back(id, &source);

    int pool = workers > 0 ? workers
                           : static_cast<int>(std::min<unsigned>(
                                 4, std::max<unsigned>(1, std::thread::hardware_concurrency())));
    pool = std::min<int>(pool, static_cast<int>(items.size()));

    std::vector<std::string> errors(items.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t at = next.fetch_add(1);
            if (at >= items.size()) return;
            try {
                job(items[at].first, *items[at].second);
            } catch (const std::exception& e) {
                errors[at] = e.what();
            }
        }
    };
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
        for (auto& thread : threads) thread.join();
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!errors[i].empty()) {
            throw std::runtime_error("case " + items[i].first + ": " + errors[i]);
        }
    }
}

Direction parse_direction(const json& j) {
    return direction_from_string(j.get<std::string>());
}

DamageScenario parse_scenario_json(const json& j) {
    DamageScenario scenario;
    for (const auto& factor : j.at("stiffness_factors")) {
        scenario.stiffness_factors.push_back(factor.get<double>());
    }
    if (j.contains("lumped_masses")) {
        for (const auto& mj : j.at("lumped_masses")) {
            scenario.lumped_masses.push_back(
                {mj.at("node").get<int>(), mj.at("kg").get<double>()});
        }
    }
    return scenario;
}

BeamConfig parse_beam_json(const json& j) {
    BeamConfig config = default_beam_config();
    config.length_m = j.value("length_m", config.length_m);
    config.youngs_modulus_pa = j.value("youngs_modulus_pa", config.youngs_modulus_pa);
    config.density_kgm3 = j.value("density_kgm3", config.density_kgm3);
    config.n_elements = j.value("n_elements", config.n_elements);
    config.modal_damping = j.value("modal_damping", config.modal_damping);
    if (j.contains("section")) {
        const auto& s = j.at("section");
        config.section.area_m2 = s.at("area_m2").get<double>();
        config.section.iy_m4 = s.at("iy_m4").get<double>();
        config.section.iz_m4 = s.at("iz_m4").get<double>();
    } else if (j.contains("n_elements") || j.contains("length_m")) {
        // Geometry changed without an explicit section: re-solve the stock targets.
        config.section = section_for_first_frequencies(
            9.23, 13.23, 1.06e-4, config.length_m, config.youngs_modulus_pa,
            config.density_kgm3, config.n_elements);
    }
    return config;
}

}  // namespace

void RunConfig::validate() const {
    if (scenarios.empty()) {
        throw std::invalid_argument("config: scenario map is empty");
    }
    if (scenarios.find(baseline_id) == scenarios.end()) {
        throw std::invalid_argument("config: baseline case '" + baseline_id +
                                    "' missing from scenarios");
    }
    bool any_external = false;
    bool any_simulated = false;
    for (const auto& [id, source] : scenarios) {
        const bool has_scenario = source.scenario.has_value();
        const bool has_path = source.frf_path.has_value();
        if (has_scenario == has_path) {
            throw std::invalid_argument("config: case '" + id +
                                        "' needs exactly one of a beam scenario or an FRF path");
        }
        any_external |= has_path;
        any_simulated |= has_scenario;
    }
    if (any_external && any_simulated) {
        throw std::invalid_argument(
            "config: external-FRF cases cannot be mixed with simulated cases");
    }
    if (any_simulated && !beam.has_value()) {
        throw std::invalid_argument("config: simulated scenarios require a beam section");
    }
    if (identification.min_streak < 2) {
        throw std::invalid_argument("config: min_streak must be at least 2");
    }
    if (!(f_gate_rel > 0.0)) {
        throw std::invalid_argument("config: f_gate_rel must be positive");
    }
}

RunConfig benchmark_run_config() {
    RunConfig config;
    config.beam = default_beam_config();
    for (auto& [id, scenario] : preset_scenarios(config.beam->n_elements)) {
        config.scenarios[id] = ScenarioSource{scenario, std::nullopt};
    }
    config.baseline_id = "case1";
    return config;
}

RunConfig parse_run_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("config: cannot open '" + file.string() + "'");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: " + file.string() + " is not valid JSON: " +
                                    e.what());
    }

    RunConfig config;
    if (j.value("use_presets", false)) {
        config = benchmark_run_config();
    }
    if (j.contains("beam")) config.beam = parse_beam_json(j.at("beam"));
    if (j.contains("simulation")) {
        const auto& s = j.at("simulation");
        config.simulation.sample_rate_hz =
            s.value("sample_rate_hz", config.simulation.sample_rate_hz);
        config.simulation.duration_s = s.value("duration_s", config.simulation.duration_s);
        config.simulation.input_node = s.value("input_node", config.simulation.input_node);
        config.simulation.amplitude_n = s.value("amplitude_n", config.simulation.amplitude_n);
        if (s.contains("input_directions")) {
            config.simulation.input_directions.clear();
            for (const auto& d : s.at("input_directions")) {
                config.simulation.input_directions.push_back(parse_direction(d));
            }
        }
    }
    if (j.contains("scenarios")) {
        config.scenarios.clear();
        for (const auto& [id, sj] : j.at("scenarios").items()) {
            ScenarioSource source;
            if (sj.contains("frf_path")) {
                source.frf_path = sj.at("frf_path").get<std::string>();
                if (sj.contains("stiffness_factors")) {
                    throw std::invalid_argument("config: case '" + id +
                                                "' mixes frf_path with a beam scenario");
                }
            } else {
                source.scenario = parse_scenario_json(sj);
            }
            config.scenarios[id] = std::move(source);
        }
    }
    config.baseline_id = j.value("baseline", config.baseline_id);
    if (j.contains("identification")) {
        const auto& s = j.at("identification");
        if (s.contains("orders")) {
            config.identification.orders.min = s.at("orders").value("min", 24);
            config.identification.orders.max = s.at("orders").value("max", 50);
            config.identification.orders.step = s.at("orders").value("step", 2);
        }
        config.identification.seed = s.value("seed", config.identification.seed);
        if (s.contains("band_hz")) {
            config.identification.band_hz = {s.at("band_hz").at(0).get<double>(),
                                             s.at("band_hz").at(1).get<double>()};
        }
        if (s.contains("tolerances")) {
            const auto& t = s.at("tolerances");
            config.identification.tolerances.df_rel =
                t.value("df_rel", config.identification.tolerances.df_rel);
            config.identification.tolerances.dzeta_rel =
                t.value("dzeta_rel", config.identification.tolerances.dzeta_rel);
            config.identification.tolerances.mac_min =
                t.value("mac_min", config.identification.tolerances.mac_min);
        }
        config.identification.min_streak =
            s.value("min_streak", config.identification.min_streak);
        config.identification.max_bins =
            s.value("max_bins", config.identification.max_bins);
    }
    if (j.contains("indices")) {
        config.f_gate_rel = j.at("indices").value("f_gate_rel", config.f_gate_rel);
    }
    config.output_dir = j.value("outputs", std::string{});
    config.workers = j.value("workers", config.workers);
    config.validate();
    return config;
}

std::string file_hash_hex(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw std::runtime_error("hash: cannot open '" + file.string() + "'");
    }
    std::uint64_t hash = 14695981039346656037ULL;
    char chunk[4096];
    while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(chunk[i]);
            hash *= 1099511628211ULL;
        }
        if (!in) break;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx",
                  static_cast<unsigned long long>(hash));
    return buffer;
}

void cmd_simulate(const RunConfig& config, const StageOptions& options) {
    config.validate();
    const auto out = resolve_out_dir(config, options);
    if (!config.beam.has_value()) {
        throw std::invalid_argument("config: simulate requires a beam configuration");
    }

    for_each_case(config, config.workers, [&](const std::string& id,
                                              const ScenarioSource& source) {
        if (source.external()) {
            throw std::invalid_argument("simulate does not apply to external-FRF cases");
        }
        const GlobalSystem system = assemble(*config.beam, *source.scenario);
        std::vector<TimeSeriesSet> runs;
        for (Direction direction : config.simulation.input_directions) {
            StepInputSpec input{config.simulation.input_node, direction,
                                config.simulation.amplitude_n};
            runs.push_back(simulate_step_response(system, input,
                                                  config.simulation.sample_rate_hz,
                                                  config.simulation.duration_s));
            io::write_time_series(
                case_dir(out, id) / ("ts_" + std::string(to_string(direction))),
                runs.back());
        }
        io::write_frf(case_dir(out, id) / "frf", estimate_frf(runs));
    });
}

void cmd_identify(const RunConfig& config, const StageOptions& options) {
    config.validate();
    const auto out = resolve_out_dir(config, options);
    const std::uint64_t seed = resolve_seed(config, options);
    const auto& settings = config.identification;

    for_each_case(config, config.workers, [&](const std::string& id,
                                              const ScenarioSource& source) {
        const std::filesystem::path frf_dir =
            source.external() ? std::filesystem::path(*source.frf_path)
                              : case_dir(out, id) / "frf";
        if (!std::filesystem::exists(frf_dir / "frf.csv")) {
            throw std::runtime_error("missing FRF artifact at '" + frf_dir.string() +
                                     "' (run simulate first)");
        }
        const FrfDataset frf = io::read_frf(frf_dir);
        const StabilizationDiagram diagram =
            sweep(frf, settings.orders, seed, settings.band_hz, settings.tolerances,
                  IdentifyOptions{settings.max_bins});
        io::write_diagram_csv(case_dir(out, id) / "diagram.csv", diagram);
        io::write_diagram_json(case_dir(out, id) / "diagram.json", diagram);
        io::write_modal_set(case_dir(out, id) / "modes.json",
                            consolidate(diagram, settings.min_streak));
    });
}

std::vector<DamageReport> cmd_indices(const RunConfig& config,
                                      const StageOptions& options) {
    config.validate();
    const auto out = resolve_out_dir(config, options);

    const std::filesystem::path baseline_path =
        case_dir(out, config.baseline_id) / "modes.json";
    if (!std::filesystem::exists(baseline_path)) {
        throw std::runtime_error("case " + config.baseline_id +
                                 ": missing modal set at '" + baseline_path.string() +
                                 "' (run identify first)");
    }
    const ModalSet baseline = io::read_modal_set(baseline_path);

    // DoF labels come from the baseline FRF container when it is on disk.
    std::vector<std::string> labels;
    const auto& baseline_source = config.scenarios.at(config.baseline_id);
    const std::filesystem::path baseline_frf =
        baseline_source.external() ? std::filesystem::path(*baseline_source.frf_path)
                                   : case_dir(out, config.baseline_id) / "frf";
    if (std::filesystem::exists(baseline_frf / "meta.json")) {
        labels = io::read_frf_output_ids(baseline_frf);
    }

    std::vector<DamageReport> reports;
    for (const auto& [id, source] : config.scenarios) {
        if (id == config.baseline_id) continue;
        const std::filesystem::path modes_path = case_dir(out, id) / "modes.json";
        if (!std::filesystem::exists(modes_path)) {
            throw std::runtime_error("case " + id + ": missing modal set at '" +
                                     modes_path.string() + "' (run identify first)");
        }
        const ModalSet candidate = io::read_modal_set(modes_path);
        DamageReport report;
        try {
            report = build_damage_report(id, baseline, candidate, config.f_gate_rel, labels);
        } catch (const std::exception& e) {
            throw std::runtime_error("case " + id + ": " + e.what());
        }
        io::write_damage_report(case_dir(out, id) / "report.json", report);
        reports.push_back(std::move(report));
    }
    io::write_combined_csv(out / "combined.csv", reports);
    return reports;
}

RunManifest cmd_full_run(const RunConfig& config, const StageOptions& options) {
    config.validate();
    const auto out = resolve_out_dir(config, options);
    using clock = std::chrono::steady_clock;
    const auto elapsed = [](clock::time_point start) {
        return std::chrono::duration<double>(clock::now() - start).count();
    };

    RunManifest manifest;
    manifest.config_hash = options.config_hash;
    manifest.tool_version = version;

    if (config.beam.has_value()) {
        const auto start = clock::now();
        cmd_simulate(config, options);
        manifest.timings_s["simulate"] = elapsed(start);
    }
    {
        const auto start = clock::now();
        cmd_identify(config, options);
        manifest.timings_s["identify"] = elapsed(start);
    }
    {
        const auto start = clock::now();
        cmd_indices(config, options);
        manifest.timings_s["indices"] = elapsed(start);
    }

    for (const auto& [id, source] : config.scenarios) {
        CaseArtifacts artifacts;
        if (!source.external()) {
            for (Direction direction : config.simulation.input_directions) {
                artifacts.ts_dirs.push_back(
                    (case_dir(out, id) / ("ts_" + std::string(to_string(direction)))).string());
            }
            artifacts.frf_dir = (case_dir(out, id) / "frf").string();
        } else {
            artifacts.frf_dir = *source.frf_path;
        }
        artifacts.diagram_csv = (case_dir(out, id) / "diagram.csv").string();
        artifacts.diagram_json = (case_dir(out, id) / "diagram.json").string();
        artifacts.modes_json = (case_dir(out, id) / "modes.json").string();
        if (id != config.baseline_id) {
            artifacts.report_json = (case_dir(out, id) / "report.json").string();
        }
        manifest.cases[id] = std::move(artifacts);
    }
    manifest.combined_csv = (out / "combined.csv").string();
    write_manifest(out / "manifest.json", manifest);
    return manifest;
}

void write_manifest(const std::filesystem::path& file, const RunManifest& manifest) {
    json j;
    j["config_hash"] = manifest.config_hash;
    j["tool_version"] = manifest.tool_version;
    json cases = json::object();
    for (const auto& [id, artifacts] : manifest.cases) {
        json c;
        c["ts_dirs"] = artifacts.ts_dirs;
        c["frf_dir"] = artifacts.frf_dir;
        c["diagram_csv"] = artifacts.diagram_csv;
        c["diagram_json"] = artifacts.diagram_json;
        c["modes_json"] = artifacts.modes_json;
        c["report_json"] = artifacts.report_json;
        cases[id] = std::move(c);
    }
    j["cases"] = std::move(cases);
    j["combined_csv"] = manifest.combined_csv;
    json timings = json::object();
    for (const auto& [stage, seconds] : manifest.timings_s) timings[stage] = seconds;
    j["timings_s"] = std::move(timings);

    std::ofstream outfile(file, std::ios::binary | std::ios::trunc);
    if (!outfile) {
        throw std::runtime_error("io: cannot write '" + file.string() + "'");
    }
    outfile << j.dump(2) << '\n';
}

}  // namespace modalshm
