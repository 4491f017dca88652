#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "modalshm/io.hpp"
#include "support/oracles.hpp"

using namespace modalshm;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("modalshm_io_" + tag);
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

FrfDataset synthetic_frf(std::uint64_t seed, Eigen::Index p, Eigen::Index m,
                         Eigen::Index bins) {
    std::mt19937_64 rng(seed);
    Eigen::VectorXd f(bins);
    for (Eigen::Index k = 0; k < bins; ++k) f[k] = 0.5 + 1.25 * static_cast<double>(k);
    Eigen::MatrixXcd values(p * m, bins);
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            values(r, c) = {oracles::uniform(rng, -1, 1), oracles::uniform(rng, -1, 1)};
        }
    }
    std::vector<ChannelMeta> outs, ins;
    for (Eigen::Index i = 0; i < p; ++i) {
        outs.push_back({"n" + std::to_string(i + 1) + "_y",
                        ChannelKind::displacement_output, "n" + std::to_string(i + 1),
                        Direction::y, ""});
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        ins.push_back({"force_" + std::to_string(j + 1), ChannelKind::force_input,
                       "n1", j == 0 ? Direction::y : Direction::z, ""});
    }
    return {f, values, outs, ins, ResponseKind::receptance};
}

}  // namespace

TEST_CASE("frf container: bit-exact round trip and byte-stable rewrite") {
    const auto dir = temp_dir("frf");
    const auto frf = synthetic_frf(3, 3, 2, 17);
    io::write_frf(dir, frf);
    const auto loaded = io::read_frf(dir);

    CHECK(loaded.n_outputs() == frf.n_outputs());
    CHECK(loaded.n_inputs() == frf.n_inputs());
    CHECK((loaded.frequencies_hz() - frf.frequencies_hz()).norm() == 0.0);
    CHECK((loaded.values() - frf.values()).norm() == 0.0);
    CHECK(loaded.response_kind() == frf.response_kind());
    for (std::size_t i = 0; i < frf.output_meta().size(); ++i) {
        CHECK(loaded.output_meta()[i].id == frf.output_meta()[i].id);
    }

    const std::string first_csv = slurp(dir / "frf.csv");
    const std::string first_meta = slurp(dir / "meta.json");
    io::write_frf(dir, loaded);
    CHECK(slurp(dir / "frf.csv") == first_csv);
    CHECK(slurp(dir / "meta.json") == first_meta);
    CHECK(io::read_frf_output_ids(dir) ==
          std::vector<std::string>{"n1_y", "n2_y", "n3_y"});
}

TEST_CASE("frf container: unknown response kind is rejected") {
    const auto dir = temp_dir("frf_kind");
    io::write_frf(dir, synthetic_frf(5, 1, 1, 4));
    std::string meta = slurp(dir / "meta.json");
    const auto at = meta.find("receptance");
    REQUIRE(at != std::string::npos);
    meta.replace(at, std::string("receptance").size(), "mobility33");
    std::ofstream(dir / "meta.json", std::ios::binary) << meta;
    CHECK_THROWS_WITH_AS(io::read_frf(dir), doctest::Contains("response kind"),
                         std::invalid_argument);
}

TEST_CASE("time series container: round trip") {
    const auto dir = temp_dir("ts");
    Eigen::MatrixXd samples(2, 5);
    samples << 0.0, 1.0, 0.5, -0.25, 0.125, 1.0, -1.0, 2.0, -2.0, 0.75;
    const TimeSeriesSet ts{100.0,
                           samples,
                           {{"force_n1_y", ChannelKind::force_input, "n1", Direction::y, ""},
                            {"n1_y", ChannelKind::displacement_output, "n1", Direction::y, ""}}};
    io::write_time_series(dir, ts);
    const auto loaded = io::read_time_series(dir);
    CHECK(loaded.sample_rate_hz() == 100.0);
    CHECK((loaded.samples() - ts.samples()).norm() == 0.0);
    CHECK(loaded.channels()[0].kind == ChannelKind::force_input);
    CHECK(loaded.channels()[1].id == "n1_y");
}

TEST_CASE("modal set: round trip preserves values bit-exactly") {
    const auto dir = temp_dir("modes");
    ModalSet set;
    set.band_hz = {1.0, 4000.0};
    set.order = 12;
    set.seed = 42;
    Eigen::VectorXcd phi(3);
    phi << std::complex<double>(0.8, 0.1), std::complex<double>(-0.55, 0.0),
        std::complex<double>(0.2, -0.02);
    set.modes.push_back(make_mode({-1.3, 88.1}, phi));
    set.modes.push_back(make_mode({-0.4, 123.45}, 2.0 * phi));

    const auto file = dir / "modes.json";
    io::write_modal_set(file, set);
    const auto loaded = io::read_modal_set(file);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded.order == 12);
    CHECK(loaded.seed == 42);
    CHECK(loaded.band_hz[0] == 1.0);
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(loaded.modes[i].omega_hz == set.modes[i].omega_hz);
        CHECK(loaded.modes[i].zeta == set.modes[i].zeta);
        CHECK((loaded.modes[i].phi - set.modes[i].phi).norm() == 0.0);
    }
    // Serialization is a pure function of the value.
    CHECK(io::modal_set_to_json(loaded) == io::modal_set_to_json(set));
}

TEST_CASE("diagram export: csv layout and json mirror carry tolerances") {
    StabilizationDiagram diagram;
    diagram.tolerances = {0.005, 0.05, 0.95};
    DiagramEntry entry;
    entry.order = 4;
    Eigen::VectorXcd phi(2);
    phi << 1.0, 0.5;
    entry.modes.modes.push_back(make_mode({-2.0, 60.0}, phi));
    entry.modes.band_hz = {0.0, 100.0};
    entry.flags = {StabilityFlag::new_pole};
    entry.matched_prev = {-1};
    diagram.entries.push_back(entry);

    const auto dir = temp_dir("diagram");
    io::write_diagram_csv(dir / "diagram.csv", diagram);
    io::write_diagram_json(dir / "diagram.json", diagram);

    const std::string csv = slurp(dir / "diagram.csv");
    CHECK(csv.rfind("order,f_hz,zeta,flag\n", 0) == 0);
    CHECK(csv.find("4,") != std::string::npos);
    CHECK(csv.find(",new\n") != std::string::npos);

    const std::string json = slurp(dir / "diagram.json");
    CHECK(json.find("\"df_rel\":0.005") != std::string::npos);
    CHECK(json.find("\"mac_min\":0.94999999999999996") != std::string::npos);
}

TEST_CASE("scenario and beam config files round trip") {
    const auto dir = temp_dir("scenario");
    DamageScenario scenario;
    scenario.stiffness_factors = {1.0, 0.95, 1.0, 1.0};
    scenario.lumped_masses.push_back({2, 0.1});
    io::write_scenario(dir / "scenario.json", scenario);
    const auto loaded = io::read_scenario(dir / "scenario.json");
    CHECK(loaded.stiffness_factors == scenario.stiffness_factors);
    REQUIRE(loaded.lumped_masses.size() == 1);
    CHECK(loaded.lumped_masses[0].node == 2);
    CHECK(loaded.lumped_masses[0].kg == 0.1);

    BeamConfig config = default_beam_config();
    io::write_beam_config(dir / "beam.json", config);
    const auto beam = io::read_beam_config(dir / "beam.json");
    CHECK(beam.length_m == config.length_m);
    CHECK(beam.section.iy_m4 == config.section.iy_m4);
    CHECK(beam.section.iz_m4 == config.section.iz_m4);
    CHECK(beam.n_elements == config.n_elements);
}

TEST_CASE("combined csv: one row per report with the weakest DoF") {
    DamageReport report;
    report.case_id = "case2";
    report.mac_diag = {1.0, 0.99};
    report.mtmac = 0.05;
    report.comac.resize(3);
    report.comac << 1.0, 0.93, 0.99;
    report.scaled_comac.resize(3);
    report.scaled_comac << 0.0, 1.0, 0.1;
    report.delta_omega_pct = {-0.1, -0.2};
    report.baseline_f_hz = {10.0, 20.0};
    report.candidate_f_hz = {9.99, 19.96};
    report.dof_labels = {"n1_y", "n2_y", "n3_y"};

    const auto dir = temp_dir("combined");
    io::write_combined_csv(dir / "combined.csv", {report});
    const std::string csv = slurp(dir / "combined.csv");
    CHECK(csv.rfind("case_id,mtmac,n_pairs,min_comac_dof,min_comac\n", 0) == 0);
    CHECK(csv.find("case2,") != std::string::npos);
    CHECK(csv.find(",n2_y,") != std::string::npos);

    io::write_damage_report(dir / "report.json", report);
    const std::string json = slurp(dir / "report.json");
    CHECK(json.find("\"case_id\":\"case2\"") != std::string::npos);
    CHECK(json.find("\"n_pairs\":2") != std::string::npos);
}
