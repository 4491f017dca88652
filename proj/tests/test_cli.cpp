// Drives the installed command-line binary end to end. The path to the tool
// comes in as argv[1] from ctest.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (ok) {
        std::printf("[ok] %s\n", what.c_str());
    } else {
        std::printf("[FAILED] %s\n", what.c_str());
        ++failures;
    }
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int run(const std::string& command) { return std::system(command.c_str()); }

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-cli>\n", argv[0]);
        return 2;
    }
    const std::string tool = argv[1];
    const auto dir = std::filesystem::temp_directory_path() / "modalshm_cli";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    const auto config_path = dir / "run.json";
    {
        std::ofstream out(config_path);
        out << R"({
          "use_presets": true,
          "scenarios": {
            "case1": {"stiffness_factors": [1, 1, 1, 1]},
            "case4": {"stiffness_factors": [1, 0.8, 1, 1]}
          },
          "simulation": {"duration_s": 0.5},
          "identification": {"orders": {"min": 16, "max": 24, "step": 2},
                             "seed": 1, "band_hz": [1.0, 300.0]},
          "outputs": ")" << (dir / "out_a").string() << R"("
        })";
    }

    check(run(tool + " --version > /dev/null") == 0, "--version exits cleanly");

    check(run(tool + " full-run --config " + config_path.string() + " > /dev/null") == 0,
          "full-run succeeds with the config's output directory");
    check(std::filesystem::exists(dir / "out_a/manifest.json"), "manifest written");
    check(std::filesystem::exists(dir / "out_a/case4/report.json"), "report written");
    check(std::filesystem::exists(dir / "out_a/combined.csv"), "combined table written");

    // Same config into a second directory: byte-identical reports.
    check(run(tool + " full-run --config " + config_path.string() + " --out " +
              (dir / "out_b").string() + " > /dev/null") == 0,
          "full-run honours --out");
    check(slurp(dir / "out_a/case4/report.json") == slurp(dir / "out_b/case4/report.json"),
          "damage reports byte-identical across reruns");
    check(slurp(dir / "out_a/combined.csv") == slurp(dir / "out_b/combined.csv"),
          "combined table byte-identical across reruns");

    const std::string hash_a = slurp(dir / "out_a/manifest.json");
    const std::string hash_b = slurp(dir / "out_b/manifest.json");
    const auto hash_of = [](const std::string& text) {
        const auto at = text.find("config_hash");
        return text.substr(at, text.find(',', at) - at);
    };
    check(hash_of(hash_a) == hash_of(hash_b), "manifest hash stable across reruns");

    // Staged execution over a fresh directory.
    check(run(tool + " simulate --config " + config_path.string() + " --out " +
              (dir / "out_c").string() + " > /dev/null") == 0,
          "simulate subcommand");
    check(run(tool + " identify --config " + config_path.string() + " --out " +
              (dir / "out_c").string() + " > /dev/null") == 0,
          "identify subcommand");
    check(run(tool + " indices --config " + config_path.string() + " --out " +
              (dir / "out_c").string() + " > /dev/null") == 0,
          "indices subcommand");
    check(slurp(dir / "out_c/case4/report.json") == slurp(dir / "out_a/case4/report.json"),
          "staged run reproduces the full-run report");

    // Failure path: identify without artifacts emits machine-readable JSON
    // on stderr and a nonzero exit code.
    const auto stderr_file = dir / "stderr.json";
    const int missing = run(tool + " identify --config " + config_path.string() +
                            " --out " + (dir / "out_d").string() + " 2> " +
                            stderr_file.string() + " > /dev/null");
    check(missing != 0, "identify without artifacts fails");
    const std::string error_json = slurp(stderr_file);
    check(error_json.find("\"error\"") != std::string::npos &&
              error_json.find("case1") != std::string::npos,
          "error JSON names the failing case");

    // Broken config: config-typed error.
    {
        std::ofstream out(dir / "broken.json");
        out << "{\"scenarios\": {}}";
    }
    const int broken = run(tool + " full-run --config " + (dir / "broken.json").string() +
                           " --out " + (dir / "out_e").string() + " 2> " +
                           stderr_file.string() + " > /dev/null");
    check(broken != 0, "empty scenario map is rejected");
    check(slurp(stderr_file).find("\"type\":\"config\"") != std::string::npos,
          "config errors are typed");

    if (failures == 0) {
        std::printf("cli: all checks passed\n");
        return 0;
    }
    std::printf("cli: %d check(s) failed\n", failures);
    return 1;
}
