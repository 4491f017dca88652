#include "modalshm/stabilization.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "modalshm/indices.hpp"

namespace modalshm {

const char* to_string(StabilityFlag flag) {
    switch (flag) {
        case StabilityFlag::stable: return "stable";
        case StabilityFlag::unstable_frequency: return "unstable-frequency";
        case StabilityFlag::unstable_damping: return "unstable-damping";
        case StabilityFlag::unstable_shape: return "unstable-shape";
        case StabilityFlag::new_pole: return "new";
    }
    throw std::logic_error("unknown stability flag");
}

std::vector<StabilityFlag> classify(const ModalSet& prev, const ModalSet& cur,
                                    const StabilizationTolerances& tolerances,
                                    std::vector<int>* matched_prev) {
    if (tolerances.df_rel <= 0.0 || tolerances.dzeta_rel <= 0.0 ||
        tolerances.mac_min <= 0.0) {
        throw std::invalid_argument("classify: tolerances must be positive");
    }

    std::vector<StabilityFlag> flags(cur.size(), StabilityFlag::new_pole);
    if (matched_prev) matched_prev->assign(cur.size(), -1);

    std::vector<bool> used(prev.size(), false);
    // Current modes ascend in frequency already; greedy in that order.
    for (std::size_t i = 0; i < cur.size(); ++i) {
        const Mode& mode = cur.modes[i];
        int best = -1;
        double best_df = 0.0;
        for (std::size_t j = 0; j < prev.size(); ++j) {
            if (used[j]) continue;
            const double df = std::abs(mode.omega_hz - prev.modes[j].omega_hz);
            if (best < 0 || df < best_df) {
                best = static_cast<int>(j);
                best_df = df;
            }
        }
        if (best < 0) continue;  // stays new

        const Mode& ref = prev.modes[static_cast<std::size_t>(best)];
        if (best_df / ref.omega_hz > tolerances.df_rel) {
            flags[i] = StabilityFlag::unstable_frequency;
            continue;
        }
        if (std::abs(mode.zeta - ref.zeta) / ref.zeta > tolerances.dzeta_rel) {
            flags[i] = StabilityFlag::unstable_damping;
            continue;
        }
        if (mac(ref.phi, mode.phi) < tolerances.mac_min) {
            flags[i] = StabilityFlag::unstable_shape;
            continue;
        }
        flags[i] = StabilityFlag::stable;
        used[static_cast<std::size_t>(best)] = true;
        if (matched_prev) (*matched_prev)[i] = best;
    }
    return flags;
}

StabilizationDiagram sweep(const FrfDataset& frf, const OrderRange& orders,
                           std::uint64_t seed, std::array<double, 2> band_hz,
                           const StabilizationTolerances& tolerances,
                           const IdentifyOptions& options) {
    if (orders.min < 2 || orders.min % 2 != 0 || orders.max % 2 != 0 ||
        orders.step <= 0 || orders.step % 2 != 0 || orders.max < orders.min) {
        throw std::invalid_argument(
            "sweep: orders must be even, ascending, with an even positive step");
    }

    const FrfDataset banded =
        decimate_bins(select_band(frf, band_hz[0], band_hz[1]), options.max_bins);
    const Eigen::Index n = banded.n_bins();
    if (n < 2) {
        throw std::invalid_argument("sweep: fewer than two bins in the band");
    }

    StabilizationDiagram diagram;
    diagram.tolerances = tolerances;
    const ModalSet no_previous;
    for (int order = orders.min; order <= orders.max; order += orders.step) {
        DiagramEntry entry;
        entry.order = order;
        entry.modes.band_hz = band_hz;
        entry.modes.order = order;
        entry.modes.seed = seed;
        try {
            // Fresh directions per order: poles carried by the data persist,
            // while artifacts of any one random compression do not.
            const TangentialDirections directions = generate_directions(
                seed + static_cast<std::uint64_t>(order), banded.n_inputs(),
                banded.n_outputs(), n / 2, (n + 1) / 2);
            const LoewnerPencil pencil = build_pencil(partition(banded, directions));
            entry.modes = extract_modes(realize(pencil, order), band_hz);
            entry.modes.seed = seed;
        } catch (const std::exception& e) {
            entry.modes.modes.clear();
            entry.note = e.what();
        }
        const ModalSet& prev =
            diagram.entries.empty() ? no_previous : diagram.entries.back().modes;
        entry.flags = classify(prev, entry.modes, tolerances, &entry.matched_prev);
        diagram.entries.push_back(std::move(entry));
    }
    return diagram;
}

ModalSet consolidate(const StabilizationDiagram& diagram, int min_streak) {
    if (min_streak < 2) {
        throw std::invalid_argument("consolidate: min_streak must be at least 2");
    }

    struct Cluster {
        std::vector<double> f_hz;
        std::vector<double> zeta;
        const Mode* last_mode = nullptr;
        int last_order = 0;
        int stable_flags = 0;  // orders at which the pole was flagged stable
    };
    std::vector<Cluster> clusters;
    // chain_of[i] = cluster owning mode i of the previous entry.
    std::vector<int> chain_of_prev;

    for (const DiagramEntry& entry : diagram.entries) {
        std::vector<int> chain_of(entry.modes.size(), -1);
        for (std::size_t i = 0; i < entry.modes.size(); ++i) {
            int cluster_id = -1;
            if (entry.flags[i] == StabilityFlag::stable) {
                const int j = entry.matched_prev[i];
                if (j >= 0 && j < static_cast<int>(chain_of_prev.size())) {
                    cluster_id = chain_of_prev[static_cast<std::size_t>(j)];
                }
            }
            if (cluster_id < 0) {
                cluster_id = static_cast<int>(clusters.size());
                clusters.emplace_back();
            }
            Cluster& cluster = clusters[static_cast<std::size_t>(cluster_id)];
            cluster.f_hz.push_back(entry.modes.modes[i].omega_hz);
            cluster.zeta.push_back(entry.modes.modes[i].zeta);
            cluster.last_mode = &entry.modes.modes[i];
            cluster.last_order = entry.order;
            if (entry.flags[i] == StabilityFlag::stable) ++cluster.stable_flags;
            chain_of[i] = cluster_id;
        }
        chain_of_prev = std::move(chain_of);
    }

    auto median = [](std::vector<double> values) {
        std::sort(values.begin(), values.end());
        const std::size_t n = values.size();
        return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    };

    // Truncated low orders produce merged-pole surrogates that can stay
    // consistent for a few steps before the model snaps to the true poles;
    // a physical cluster is one that persists to the top of the diagram.
    // Entries without stable poles never move this bound, which keeps the
    // output invariant to appending all-unstable orders.
    int top_stable_order = 0;
    bool any_stable = false;
    for (const DiagramEntry& entry : diagram.entries) {
        for (const StabilityFlag flag : entry.flags) {
            if (flag == StabilityFlag::stable) {
                top_stable_order = entry.order;
                any_stable = true;
                break;
            }
        }
    }

    ModalSet result;
    if (!diagram.entries.empty()) {
        result.band_hz = diagram.entries.back().modes.band_hz;
        result.order = diagram.entries.back().order;
        result.seed = diagram.entries.back().modes.seed;
    }
    if (!any_stable) return result;
    for (const Cluster& cluster : clusters) {
        if (cluster.stable_flags < min_streak) continue;
        if (cluster.last_order != top_stable_order) continue;
        const double f = median(cluster.f_hz);
        const double zeta = median(cluster.zeta);
        const double magnitude = 2.0 * std::numbers::pi * f;
        const std::complex<double> pole(-zeta * magnitude,
                                        magnitude * std::sqrt(1.0 - zeta * zeta));
        result.modes.push_back(make_mode(pole, cluster.last_mode->phi));
    }
    std::sort(result.modes.begin(), result.modes.end(),
              [](const Mode& a, const Mode& b) { return a.omega_hz < b.omega_hz; });
    return result;
}

}  // namespace modalshm
