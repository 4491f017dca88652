#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "modalshm/frf.hpp"
#include "modalshm/loewner.hpp"
#include "modalshm/modal_set.hpp"

namespace modalshm {

enum class StabilityFlag {
    stable,
    unstable_frequency,
    unstable_damping,
    unstable_shape,
    new_pole,
};

const char* to_string(StabilityFlag flag);

struct StabilizationTolerances {
    double df_rel = 0.005;
    double dzeta_rel = 0.05;
    double mac_min = 0.95;
};

struct DiagramEntry {
    int order = 0;
    ModalSet modes;
    std::vector<StabilityFlag> flags;       // one per mode
    std::vector<int> matched_prev;          // index into previous entry, -1 if none
    std::string note;                       // diagnostics for skipped orders
};

struct StabilizationDiagram {
    std::vector<DiagramEntry> entries;      // ascending order
    StabilizationTolerances tolerances;
};

struct OrderRange {
    int min = 24;
    int max = 50;
    int step = 2;
};

/// Flags each current mode against the previous order's set. A mode is
/// stable iff its best unused frequency match passes, in this sequence,
/// the relative frequency, relative damping, and MAC gates; the first
/// violated gate names the flag. With no previous candidates the mode is new.
std::vector<StabilityFlag> classify(const ModalSet& prev, const ModalSet& cur,
                                    const StabilizationTolerances& tolerances,
                                    std::vector<int>* matched_prev = nullptr);

/// One identification per order over a shared pencil decomposition. Orders
/// that fail the rank tolerance are recorded as empty entries with a note.
StabilizationDiagram sweep(const FrfDataset& frf, const OrderRange& orders,
                           std::uint64_t seed, std::array<double, 2> band_hz,
                           const StabilizationTolerances& tolerances = {},
                           const IdentifyOptions& options = {});

/// Clusters poles linked by stable flags across consecutive orders and keeps
/// clusters spanning at least min_streak orders. Reports per-cluster median
/// frequency and damping with the shape from the highest order.
ModalSet consolidate(const StabilizationDiagram& diagram, int min_streak = 3);

}  // namespace modalshm
