#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "modalshm/modal_set.hpp"

namespace modalshm {

/// Modal assurance criterion with conjugate transpose:
/// |a^H b|^2 / ((a^H a)(b^H b)), in [0, 1].
double mac(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

struct ModePairing {
    struct Pair {
        int baseline = -1;
        int candidate = -1;
        double mac_value = 0.0;
    };
    std::vector<Pair> pairs;  // ascending baseline index
    std::vector<int> unpaired_baseline;
    std::vector<int> unpaired_candidate;
};

/// Greedy best-MAC pairing: candidate pairs are visited in descending MAC
/// order and accepted when both modes are still free and the relative
/// frequency separation is within f_gate_rel of the baseline frequency.
ModePairing pair_modes(const ModalSet& baseline, const ModalSet& candidate,
                       double f_gate_rel = 0.20);

/// 1 - prod over pairs of MAC / (1 + |wN - wE| / (wN + wE)); 0 means the
/// paired modes are identical in frequency and shape.
double mtmac(const ModalSet& baseline, const ModalSet& candidate,
             const ModePairing& pairing);

/// Per-DoF correlation over the paired shapes, component magnitudes used
/// for complex shapes. A DoF that carries no signal on either side maps to
/// 1 when both sides are silent and 0 when only one is.
Eigen::VectorXd comac(const ModalSet& baseline, const ModalSet& candidate,
                      const ModePairing& pairing);

/// Rescales the COMAC deviation 1 - c to span [0, 1]; 1 marks the largest
/// deviation. All-equal input is a degenerate-normalization error.
Eigen::VectorXd scaled_comac(const Eigen::VectorXd& comac_values);

/// Signed per-pair frequency change, 100 (wN - wE) / wE.
std::vector<double> delta_omega_pct(const ModalSet& baseline,
                                    const ModalSet& candidate,
                                    const ModePairing& pairing);

struct DamageReport {
    std::string case_id;
    std::vector<double> mac_diag;
    double mtmac = 0.0;
    Eigen::VectorXd comac;
    Eigen::VectorXd scaled_comac;  // empty when the COMAC is flat (see note)
    std::vector<double> delta_omega_pct;
    std::vector<double> baseline_f_hz;
    std::vector<double> candidate_f_hz;
    int n_unpaired_baseline = 0;
    int n_unpaired_candidate = 0;
    std::vector<std::string> dof_labels;  // one per COMAC entry, optional
    std::string note;

    int n_pairs() const { return static_cast<int>(mac_diag.size()); }
    /// Index of the smallest COMAC entry (first on ties).
    Eigen::Index min_comac_dof() const;
};

DamageReport build_damage_report(std::string case_id, const ModalSet& baseline,
                                 const ModalSet& candidate, double f_gate_rel,
                                 std::vector<std::string> dof_labels = {});

}  // namespace modalshm
