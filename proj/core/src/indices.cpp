#include "modalshm/indices.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace modalshm {

double mac(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    if (a.size() != b.size() || a.size() == 0) {
        throw std::invalid_argument("mac: shape vectors must share a nonzero length");
    }
    const double na = a.squaredNorm();
    const double nb = b.squaredNorm();
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("mac: undefined for a zero shape vector");
    }
    const std::complex<double> inner = a.dot(b);  // conjugates the left argument
    return std::norm(inner) / (na * nb);
}

ModePairing pair_modes(const ModalSet& baseline, const ModalSet& candidate,
                       double f_gate_rel) {
    if (baseline.empty() || candidate.empty()) {
        throw std::invalid_argument("pair_modes: both mode sets must be nonempty");
    }
    if (f_gate_rel <= 0.0) {
        throw std::invalid_argument("pair_modes: frequency gate must be positive");
    }

    struct Candidate {
        int baseline;
        int candidate;
        double mac_value;
    };
    std::vector<Candidate> all;
    all.reserve(baseline.size() * candidate.size());
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        for (std::size_t j = 0; j < candidate.size(); ++j) {
            all.push_back({static_cast<int>(i), static_cast<int>(j),
                           mac(baseline.modes[i].phi, candidate.modes[j].phi)});
        }
    }
    std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
        if (a.mac_value != b.mac_value) return a.mac_value > b.mac_value;
        if (a.baseline != b.baseline) return a.baseline < b.baseline;
        return a.candidate < b.candidate;
    });

    std::vector<bool> base_used(baseline.size(), false);
    std::vector<bool> cand_used(candidate.size(), false);
    ModePairing pairing;
    for (const Candidate& c : all) {
        if (base_used[static_cast<std::size_t>(c.baseline)] ||
            cand_used[static_cast<std::size_t>(c.candidate)]) {
            continue;
        }
        const double f_base = baseline.modes[static_cast<std::size_t>(c.baseline)].omega_hz;
        const double f_cand = candidate.modes[static_cast<std::size_t>(c.candidate)].omega_hz;
        if (std::abs(f_cand - f_base) / f_base > f_gate_rel) continue;
        base_used[static_cast<std::size_t>(c.baseline)] = true;
        cand_used[static_cast<std::size_t>(c.candidate)] = true;
        pairing.pairs.push_back({c.baseline, c.candidate, c.mac_value});
    }
    std::sort(pairing.pairs.begin(), pairing.pairs.end(),
              [](const ModePairing::Pair& a, const ModePairing::Pair& b) {
                  return a.baseline < b.baseline;
              });
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        if (!base_used[i]) pairing.unpaired_baseline.push_back(static_cast<int>(i));
    }
    for (std::size_t j = 0; j < candidate.size(); ++j) {
        if (!cand_used[j]) pairing.unpaired_candidate.push_back(static_cast<int>(j));
    }
    return pairing;
}

double mtmac(const ModalSet& baseline, const ModalSet& candidate,
             const ModePairing& pairing) {
    if (pairing.pairs.empty()) {
        throw std::runtime_error("mtmac: undefined index, no paired modes");
    }
    double product = 1.0;
    for (const auto& pair : pairing.pairs) {
        const double we = baseline.modes[static_cast<std::size_t>(pair.baseline)].omega_hz;
        const double wn = candidate.modes[static_cast<std::size_t>(pair.candidate)].omega_hz;
        product *= pair.mac_value / (1.0 + std::abs(wn - we) / (wn + we));
    }
    return 1.0 - product;
}

Eigen::VectorXd comac(const ModalSet& baseline, const ModalSet& candidate,
                      const ModePairing& pairing) {
    if (pairing.pairs.empty()) {
        throw std::runtime_error("comac: undefined index, no paired modes");
    }
    const Eigen::Index p = baseline.modes[static_cast<std::size_t>(
        pairing.pairs.front().baseline)].phi.size();
    for (const auto& pair : pairing.pairs) {
        if (baseline.modes[static_cast<std::size_t>(pair.baseline)].phi.size() != p ||
            candidate.modes[static_cast<std::size_t>(pair.candidate)].phi.size() != p) {
            throw std::invalid_argument("comac: paired shapes must share one DoF layout");
        }
    }

    Eigen::VectorXd result(p);
    for (Eigen::Index d = 0; d < p; ++d) {
        double cross = 0.0;
        double base_sq = 0.0;
        double cand_sq = 0.0;
        for (const auto& pair : pairing.pairs) {
            const double mb = std::abs(
                baseline.modes[static_cast<std::size_t>(pair.baseline)].phi[d]);
            const double mc = std::abs(
                candidate.modes[static_cast<std::size_t>(pair.candidate)].phi[d]);
            cross += mb * mc;
            base_sq += mb * mb;
            cand_sq += mc * mc;
        }
        const double denom = base_sq * cand_sq;
        if (denom == 0.0) {
            // Silent DoF: full agreement when silent on both sides, total
            // disagreement when only one side carries signal.
            result[d] = (base_sq == 0.0 && cand_sq == 0.0) ? 1.0 : 0.0;
        } else {
            result[d] = (cross * cross) / denom;
        }
    }
    return result;
}

Eigen::VectorXd scaled_comac(const Eigen::VectorXd& comac_values) {
    if (comac_values.size() == 0) {
        throw std::invalid_argument("scaled_comac: empty input");
    }
    for (Eigen::Index d = 0; d < comac_values.size(); ++d) {
        if (!(comac_values[d] >= -1e-12 && comac_values[d] <= 1.0 + 1e-12)) {
            throw std::invalid_argument("scaled_comac: entries must lie in [0, 1]");
        }
    }
    const Eigen::VectorXd deviation = 1.0 - comac_values.array();
    const double lo = deviation.minCoeff();
    const double hi = deviation.maxCoeff();
    if (hi == lo) {
        throw std::runtime_error("scaled_comac: degenerate normalization, all entries equal");
    }
    return (deviation.array() - lo) / (hi - lo);
}

std::vector<double> delta_omega_pct(const ModalSet& baseline,
                                    const ModalSet& candidate,
                                    const ModePairing& pairing) {
    std::vector<double> deltas;
    deltas.reserve(pairing.pairs.size());
    for (const auto& pair : pairing.pairs) {
        const double we = baseline.modes[static_cast<std::size_t>(pair.baseline)].omega_hz;
        const double wn = candidate.modes[static_cast<std::size_t>(pair.candidate)].omega_hz;
        deltas.push_back(100.0 * (wn - we) / we);
    }
    return deltas;
}

Eigen::Index DamageReport::min_comac_dof() const {
    if (comac.size() == 0) {
        throw std::runtime_error("damage report: no COMAC entries");
    }
    Eigen::Index at = 0;
    comac.minCoeff(&at);
    return at;
}

DamageReport build_damage_report(std::string case_id, const ModalSet& baseline,
                                 const ModalSet& candidate, double f_gate_rel,
                                 std::vector<std::string> dof_labels) {
    const ModePairing pairing = pair_modes(baseline, candidate, f_gate_rel);

    DamageReport report;
    report.case_id = std::move(case_id);
    for (const auto& pair : pairing.pairs) {
        report.mac_diag.push_back(pair.mac_value);
        report.baseline_f_hz.push_back(
            baseline.modes[static_cast<std::size_t>(pair.baseline)].omega_hz);
        report.candidate_f_hz.push_back(
            candidate.modes[static_cast<std::size_t>(pair.candidate)].omega_hz);
    }
    report.mtmac = mtmac(baseline, candidate, pairing);
    report.comac = comac(baseline, candidate, pairing);
    try {
        report.scaled_comac = scaled_comac(report.comac);
    } catch (const std::runtime_error& e) {
        report.note = e.what();
    }
    report.delta_omega_pct = delta_omega_pct(baseline, candidate, pairing);
    report.n_unpaired_baseline = static_cast<int>(pairing.unpaired_baseline.size());
    report.n_unpaired_candidate = static_cast<int>(pairing.unpaired_candidate.size());
    if (!dof_labels.empty() &&
        static_cast<Eigen::Index>(dof_labels.size()) != report.comac.size()) {
        throw std::invalid_argument("damage report: one DoF label per COMAC entry required");
    }
    report.dof_labels = std::move(dof_labels);
    return report;
}

}  // namespace modalshm
