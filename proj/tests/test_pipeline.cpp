#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "modalshm/io.hpp"
#include "modalshm/pipeline.hpp"
#include "support/oracles.hpp"

using namespace modalshm;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("modalshm_pipe_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

/// Small, fast run: half-second records, 300 Hz band, orders 16..24.
RunConfig small_config() {
    RunConfig config;
    config.beam = default_beam_config();
    const auto presets = preset_scenarios(4);
    config.scenarios["case1"] = {presets.at("case1"), std::nullopt};
    config.scenarios["case4"] = {presets.at("case4"), std::nullopt};
    config.simulation.duration_s = 0.5;
    config.identification.orders = {16, 24, 2};
    config.identification.band_hz = {1.0, 300.0};
    config.identification.min_streak = 3;
    return config;
}

}  // namespace

TEST_CASE("pipeline: simulate -> identify -> indices round trip on disk") {
    const auto out = temp_dir("full");
    const auto config = small_config();
    StageOptions options;
    options.out_dir = out;

    cmd_simulate(config, options);
    CHECK(std::filesystem::exists(out / "case1/frf/frf.csv"));
    CHECK(std::filesystem::exists(out / "case1/ts_y/ts.csv"));
    CHECK(std::filesystem::exists(out / "case1/ts_z/ts.csv"));
    CHECK(std::filesystem::exists(out / "case4/frf/frf.csv"));

    SUBCASE("simulation artifacts are byte-stable across reruns") {
        const std::string frf_bytes = slurp(out / "case1/frf/frf.csv");
        const std::string ts_bytes = slurp(out / "case1/ts_y/ts.csv");
        cmd_simulate(config, options);
        CHECK(slurp(out / "case1/frf/frf.csv") == frf_bytes);
        CHECK(slurp(out / "case1/ts_y/ts.csv") == ts_bytes);
    }

    cmd_identify(config, options);
    const auto baseline = io::read_modal_set(out / "case1/modes.json");
    CHECK(baseline.size() == 6);  // modes below 300 Hz

    const auto reports = cmd_indices(config, options);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].case_id == "case4");
    CHECK(reports[0].mtmac > 0.0);
    CHECK(std::filesystem::exists(out / "case4/report.json"));
    CHECK(std::filesystem::exists(out / "combined.csv"));

    SUBCASE("manifest carries hash, version, and artifact paths") {
        StageOptions manifest_options = options;
        manifest_options.config_hash = "deadbeefdeadbeef";
        const auto manifest = cmd_full_run(config, manifest_options);
        CHECK(manifest.config_hash == "deadbeefdeadbeef");
        CHECK(manifest.tool_version == std::string("0.1.0"));
        CHECK(manifest.cases.size() == 2);
        CHECK(manifest.cases.at("case4").report_json ==
              (out / "case4/report.json").string());
        CHECK(std::filesystem::exists(out / "manifest.json"));
    }
}

TEST_CASE("pipeline: direction seed does not move the consolidated frequencies") {
    const auto out = temp_dir("seeds");
    auto config = small_config();
    config.scenarios.erase("case4");
    StageOptions options;
    options.out_dir = out;
    cmd_simulate(config, options);

    cmd_identify(config, options);
    const auto seed_one = io::read_modal_set(out / "case1/modes.json");
    options.seed_override = 2;
    cmd_identify(config, options);
    const auto seed_two = io::read_modal_set(out / "case1/modes.json");

    REQUIRE(seed_one.size() == seed_two.size());
    for (std::size_t i = 0; i < seed_one.size(); ++i) {
        const double drift = std::abs(seed_one.modes[i].omega_hz -
                                      seed_two.modes[i].omega_hz) /
                             seed_one.modes[i].omega_hz;
        CHECK(drift <= 1e-6);
    }
}

TEST_CASE("pipeline: identify before simulate names the missing case") {
    const auto out = temp_dir("missing");
    const auto config = small_config();
    StageOptions options;
    options.out_dir = out;
    CHECK_THROWS_WITH_AS(cmd_identify(config, options), doctest::Contains("case1"),
                         std::runtime_error);
}

TEST_CASE("pipeline: order range [2,2] gives a single all-new diagram entry") {
    const auto out = temp_dir("single_order");
    auto config = small_config();
    config.scenarios.erase("case4");
    config.identification.orders = {2, 2, 2};
    StageOptions options;
    options.out_dir = out;
    cmd_simulate(config, options);
    cmd_identify(config, options);
    const std::string diagram = slurp(out / "case1/diagram.csv");
    std::istringstream lines(diagram);
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        CHECK(line.find(",new") != std::string::npos);
        CHECK(line.rfind("2,", 0) == 0);
        ++rows;
    }
    CHECK(rows >= 1);
}

TEST_CASE("config validation: empty scenarios, missing baseline, mixed sources") {
    RunConfig config;
    config.beam = default_beam_config();
    CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("empty"),
                         std::invalid_argument);

    config.scenarios["caseX"] = {DamageScenario::baseline(4), std::nullopt};
    CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("baseline"),
                         std::invalid_argument);

    config.baseline_id = "caseX";
    CHECK_NOTHROW(config.validate());

    config.scenarios["caseY"] = {std::nullopt, "/some/frf/dir"};
    CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("mixed"),
                         std::invalid_argument);
}

TEST_CASE("config parsing: presets shortcut and explicit overrides") {
    const auto dir = temp_dir("config");
    {
        std::ofstream out(dir / "run.json");
        out << R"({
          "use_presets": true,
          "simulation": {"duration_s": 0.5},
          "identification": {"orders": {"min": 16, "max": 24, "step": 2},
                             "seed": 7, "band_hz": [1.0, 300.0]},
          "indices": {"f_gate_rel": 0.15},
          "outputs": "out_dir_from_config"
        })";
    }
    const auto config = parse_run_config(dir / "run.json");
    CHECK(config.scenarios.size() == 5);
    CHECK(config.baseline_id == "case1");
    CHECK(config.beam.has_value());
    CHECK(config.simulation.duration_s == 0.5);
    CHECK(config.identification.seed == 7);
    CHECK(config.identification.orders.min == 16);
    CHECK(config.f_gate_rel == 0.15);
    CHECK(config.output_dir == "out_dir_from_config");

    const auto hash_a = file_hash_hex(dir / "run.json");
    CHECK(hash_a.size() == 16);
    CHECK(file_hash_hex(dir / "run.json") == hash_a);

    {
        std::ofstream out(dir / "broken.json");
        out << "{ not json";
    }
    CHECK_THROWS_AS(parse_run_config(dir / "broken.json"), std::invalid_argument);
}

TEST_CASE("pipeline: external FRF scenarios skip simulation and identify from disk") {
    const auto out = temp_dir("external");
    // Two rational FRF containers as the external source; a trace of
    // deterministic noise keeps over-modelled sweep orders realizable.
    std::mt19937_64 rng(19);
    const auto system = oracles::random_system(rng, 3, 2, 2, 10.0, 60.0);
    Eigen::VectorXd grid(80);
    for (int k = 0; k < 80; ++k) grid[k] = 2.0 + 1.5 * k;
    const auto clean = oracles::sample_frf(system, grid);
    Eigen::MatrixXcd values = clean.values();
    const double scale = values.cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            values(r, c) += 1e-6 * scale *
                            std::complex<double>(oracles::uniform(rng, -1, 1),
                                                 oracles::uniform(rng, -1, 1));
        }
    }
    const FrfDataset frf{clean.frequencies_hz(), values, clean.output_meta(),
                         clean.input_meta(), clean.response_kind()};
    io::write_frf(out / "ext_base", frf);
    io::write_frf(out / "ext_other", frf);

    RunConfig config;
    config.scenarios["caseA"] = {std::nullopt, (out / "ext_base").string()};
    config.scenarios["caseB"] = {std::nullopt, (out / "ext_other").string()};
    config.baseline_id = "caseA";
    config.identification.orders = {6, 14, 2};
    config.identification.band_hz = {2.0, 120.0};
    config.identification.min_streak = 3;
    StageOptions options;
    options.out_dir = out;

    CHECK_THROWS_AS(cmd_simulate(config, options), std::invalid_argument);
    cmd_identify(config, options);
    const auto modes = io::read_modal_set(out / "caseA/modes.json");
    CHECK(modes.size() == 3);
    const auto reports = cmd_indices(config, options);
    REQUIRE(reports.size() == 1);
    // Identical data either side: no detected change.
    CHECK(reports[0].mtmac <= 1e-12);
}

TEST_CASE("pipeline: indices with zero paired modes fails with the case id") {
    const auto out = temp_dir("nopairs");
    auto config = small_config();
    StageOptions options;
    options.out_dir = out;
    std::filesystem::create_directories(out / "case1");
    std::filesystem::create_directories(out / "case4");
    ModalSet low;
    low.band_hz = {1.0, 50.0};
    Eigen::VectorXcd phi(2);
    phi << 1.0, 0.5;
    low.modes.push_back(make_mode({-1.0, 2.0 * 3.14159 * 10.0}, phi));
    ModalSet high;
    high.band_hz = {100.0, 300.0};
    high.modes.push_back(make_mode({-1.0, 2.0 * 3.14159 * 200.0}, phi));
    io::write_modal_set(out / "case1/modes.json", low);
    io::write_modal_set(out / "case4/modes.json", high);
    CHECK_THROWS_WITH_AS(cmd_indices(config, options), doctest::Contains("case4"),
                         std::runtime_error);
}
