#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "modalshm/stabilization.hpp"
#include "support/oracles.hpp"

using namespace modalshm;

namespace {

Mode synthetic_mode(double f_hz, double zeta, unsigned tag) {
    const double magnitude = 2.0 * std::numbers::pi * f_hz;
    Eigen::VectorXcd phi(4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        phi[i] = std::complex<double>(1.0 + 0.1 * static_cast<double>((tag + i) % 5),
                                      0.01 * static_cast<double>(i));
    }
    return make_mode({-zeta * magnitude, magnitude * std::sqrt(1.0 - zeta * zeta)}, phi);
}

ModalSet synthetic_set(const std::vector<std::pair<double, double>>& f_zeta,
                       unsigned tag = 0) {
    ModalSet set;
    set.band_hz = {0.0, 1e4};
    for (const auto& [f, z] : f_zeta) set.modes.push_back(synthetic_mode(f, z, tag));
    return set;
}

}  // namespace

TEST_CASE("classify: identical sets are fully stable") {
    const auto set = synthetic_set({{10.0, 0.02}, {25.0, 0.02}, {60.0, 0.03}});
    const auto flags = classify(set, set, {});
    for (const auto flag : flags) CHECK(flag == StabilityFlag::stable);
}

TEST_CASE("classify: first entry or empty previous set yields new poles") {
    const auto set = synthetic_set({{10.0, 0.02}});
    const auto flags = classify(ModalSet{}, set, {});
    REQUIRE(flags.size() == 1);
    CHECK(flags[0] == StabilityFlag::new_pole);
}

TEST_CASE("classify: violated gates map to their specific flags") {
    const auto prev = synthetic_set({{10.0, 0.02}});

    auto shifted = synthetic_set({{11.0, 0.02}});  // 10 percent off
    CHECK(classify(prev, shifted, {})[0] == StabilityFlag::unstable_frequency);

    auto damped = synthetic_set({{10.0, 0.03}});  // 50 percent zeta change
    CHECK(classify(prev, damped, {})[0] == StabilityFlag::unstable_damping);

    auto reshaped = prev;
    Eigen::VectorXcd phi(4);
    phi << 1.0, -1.0, 1.0, -1.0;  // orthogonal-ish to the synthetic shape
    reshaped.modes[0] = make_mode(prev.modes[0].pole, phi);
    const auto flags = classify(prev, reshaped, {});
    CHECK(flags[0] == StabilityFlag::unstable_shape);
}

TEST_CASE("classify: each previous mode matches at most one current mode") {
    const auto prev = synthetic_set({{10.0, 0.02}});
    const auto cur = synthetic_set({{10.0, 0.02}, {10.001, 0.02}});
    std::vector<int> matched;
    const auto flags = classify(prev, cur, {}, &matched);
    CHECK(flags[0] == StabilityFlag::stable);
    CHECK(matched[0] == 0);
    CHECK(flags[1] != StabilityFlag::stable);
}

TEST_CASE("classify: deterministic pure function") {
    const auto prev = synthetic_set({{10.0, 0.02}, {20.0, 0.02}});
    const auto cur = synthetic_set({{10.002, 0.0201}, {20.4, 0.02}});
    const auto a = classify(prev, cur, {});
    const auto b = classify(prev, cur, {});
    CHECK(a == b);
}

TEST_CASE("classify: loosening tolerances never loses stable flags") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<double, double>> base;
        const int n = 2 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) {
            base.emplace_back(10.0 * (i + 1) * oracles::uniform(rng, 0.95, 1.05),
                              0.02 * oracles::uniform(rng, 0.8, 1.2));
        }
        const auto prev = synthetic_set(base, 1);
        std::vector<std::pair<double, double>> moved;
        for (auto [f, z] : base) {
            moved.emplace_back(f * oracles::uniform(rng, 0.99, 1.01),
                               z * oracles::uniform(rng, 0.9, 1.1));
        }
        const auto cur = synthetic_set(moved, 1);

        StabilizationTolerances tight{0.004, 0.04, 0.95};
        StabilizationTolerances loose{0.012, 0.12, 0.90};
        int tight_count = 0, loose_count = 0;
        for (auto flag : classify(prev, cur, tight)) {
            tight_count += flag == StabilityFlag::stable;
        }
        for (auto flag : classify(prev, cur, loose)) {
            loose_count += flag == StabilityFlag::stable;
        }
        CHECK(loose_count >= tight_count);
    }
}

TEST_CASE("consolidate: synthetic diagram fixtures") {
    // Cluster A persists from order 4 to 12; cluster B only joins at 10.
    StabilizationDiagram diagram;
    const double fa = 10.0, fb = 30.0;
    for (int order = 4; order <= 12; order += 2) {
        DiagramEntry entry;
        entry.order = order;
        std::vector<std::pair<double, double>> rows{{fa, 0.02}};
        if (order >= 6) rows.emplace_back(fb, 0.02);
        entry.modes = synthetic_set(rows);
        entry.modes.order = order;
        const ModalSet& prev =
            diagram.entries.empty() ? ModalSet{} : diagram.entries.back().modes;
        entry.flags = classify(prev, entry.modes, diagram.tolerances, &entry.matched_prev);
        diagram.entries.push_back(std::move(entry));
    }

    SUBCASE("longer streak survives, shorter dies") {
        const auto three = consolidate(diagram, 3);
        REQUIRE(three.size() == 2);  // A stable at 4 orders, B at exactly 3
        const auto four = consolidate(diagram, 4);
        REQUIRE(four.size() == 1);
        CHECK(four.modes[0].omega_hz == doctest::Approx(fa).epsilon(1e-9));
    }

    SUBCASE("median frequency and top-order shape are reported") {
        const auto result = consolidate(diagram, 3);
        CHECK(result.modes[0].omega_hz == doctest::Approx(fa).epsilon(1e-9));
    }

    SUBCASE("appending an all-unstable order changes nothing") {
        const auto before = consolidate(diagram, 3);
        DiagramEntry junk;
        junk.order = 14;
        junk.modes = synthetic_set({{fa * 1.5, 0.02}, {fb * 1.5, 0.02}});
        junk.modes.order = 14;
        junk.flags = classify(diagram.entries.back().modes, junk.modes,
                              diagram.tolerances, &junk.matched_prev);
        for (const auto flag : junk.flags) CHECK(flag != StabilityFlag::stable);
        StabilizationDiagram extended = diagram;
        extended.entries.push_back(junk);
        const auto after = consolidate(extended, 3);
        REQUIRE(after.size() == before.size());
        for (std::size_t i = 0; i < after.size(); ++i) {
            CHECK(after.modes[i].omega_hz == before.modes[i].omega_hz);
            CHECK(after.modes[i].zeta == before.modes[i].zeta);
        }
    }

    SUBCASE("single-order diagram consolidates to nothing") {
        StabilizationDiagram single;
        DiagramEntry entry;
        entry.order = 4;
        entry.modes = synthetic_set({{fa, 0.02}});
        entry.flags = classify(ModalSet{}, entry.modes, single.tolerances,
                               &entry.matched_prev);
        single.entries.push_back(entry);
        CHECK(consolidate(single, 3).empty());
    }

    SUBCASE("min_streak below 2 is rejected") {
        CHECK_THROWS_AS(consolidate(diagram, 1), std::invalid_argument);
    }
}

TEST_CASE("sweep: input validation") {
    std::mt19937_64 rng(4);
    const auto system = oracles::random_system(rng, 2, 1, 1);
    Eigen::VectorXd grid(12);
    for (int k = 0; k < 12; ++k) grid[k] = 2.0 + 3.0 * k;
    const auto frf = oracles::sample_frf(system, grid);
    CHECK_THROWS_AS(sweep(frf, {3, 9, 2}, 1, {0.0, 100.0}), std::invalid_argument);
    CHECK_THROWS_AS(sweep(frf, {4, 8, 1}, 1, {0.0, 100.0}), std::invalid_argument);
    CHECK_THROWS_AS(sweep(frf, {8, 4, 2}, 1, {0.0, 100.0}), std::invalid_argument);
}

TEST_CASE("sweep: single-order range flags everything new") {
    std::mt19937_64 rng(4);
    const auto system = oracles::random_system(rng, 2, 1, 1);
    Eigen::VectorXd grid(12);
    for (int k = 0; k < 12; ++k) grid[k] = 2.0 + 3.0 * k;
    const auto frf = oracles::sample_frf(system, grid);
    const auto diagram = sweep(frf, {4, 4, 2}, 1, {0.0, 100.0});
    REQUIRE(diagram.entries.size() == 1);
    for (const auto flag : diagram.entries[0].flags) {
        CHECK(flag == StabilityFlag::new_pole);
    }
}

TEST_CASE("sweep: orders beyond the numerical rank are recorded, not fatal") {
    std::mt19937_64 rng(4);
    const auto system = oracles::random_system(rng, 2, 1, 1);  // true order 4
    Eigen::VectorXd grid(20);
    for (int k = 0; k < 20; ++k) grid[k] = 2.0 + 3.0 * k;
    const auto frf = oracles::sample_frf(system, grid);
    const auto diagram = sweep(frf, {4, 16, 2}, 1, {0.0, 100.0});
    REQUIRE(diagram.entries.size() == 7);
    bool skipped = false;
    for (const auto& entry : diagram.entries) {
        if (!entry.note.empty()) {
            skipped = true;
            CHECK(entry.modes.empty());
        }
    }
    CHECK(skipped);
}
