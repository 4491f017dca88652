#include "modalshm/beam.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace modalshm {

namespace {

using Matrix4 = Eigen::Matrix4d;
using Matrix8 = Eigen::Matrix<double, 8, 8>;

/// Two-node bending stiffness, DoFs [v1, t1, v2, t2].
Matrix4 plane_stiffness(double ei, double length) {
    const double l = length;
    Matrix4 k;
    k << 12.0, 6.0 * l, -12.0, 6.0 * l,
         6.0 * l, 4.0 * l * l, -6.0 * l, 2.0 * l * l,
         -12.0, -6.0 * l, 12.0, -6.0 * l,
         6.0 * l, 2.0 * l * l, -6.0 * l, 4.0 * l * l;
    return (ei / (l * l * l)) * k;
}

/// Consistent transverse mass from the bending shape functions.
Matrix4 plane_mass(double rho_a, double length) {
    const double l = length;
    Matrix4 m;
    m << 156.0, 22.0 * l, 54.0, -13.0 * l,
         22.0 * l, 4.0 * l * l, 13.0 * l, -3.0 * l * l,
         54.0, 13.0 * l, 156.0, -22.0 * l,
         -13.0 * l, -3.0 * l * l, -22.0 * l, 4.0 * l * l;
    return (rho_a * l / 420.0) * m;
}

/// Places a plane's 4x4 into the 8x8 element layout. The w-plane rotation
/// theta_y = -dw/dx flips the sign of every displacement-rotation coupling.
void scatter_plane(Matrix8& target, const Matrix4& block,
                   const std::array<int, 4>& slots, const std::array<double, 4>& signs) {
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            target(slots[a], slots[b]) += signs[a] * signs[b] * block(a, b);
        }
    }
}

void validate_config(const BeamConfig& config) {
    if (config.length_m <= 0.0 || config.youngs_modulus_pa <= 0.0 ||
        config.density_kgm3 <= 0.0 || config.n_elements < 1 ||
        config.section.area_m2 <= 0.0 || config.section.iy_m4 <= 0.0 ||
        config.section.iz_m4 <= 0.0) {
        throw std::invalid_argument("beam: config values must be strictly positive");
    }
    if (config.modal_damping <= 0.0 || config.modal_damping >= 1.0) {
        throw std::invalid_argument("beam: modal damping must lie in (0, 1)");
    }
}

}  // namespace

DamageScenario DamageScenario::baseline(int n_elements) {
    DamageScenario scenario;
    scenario.stiffness_factors.assign(static_cast<std::size_t>(n_elements), 1.0);
    return scenario;
}

std::pair<Matrix8, Matrix8> element_matrices(double half_length_m,
                                             const BeamConfig& config) {
    if (half_length_m <= 0.0) {
        throw std::invalid_argument("element_matrices: half length must be positive");
    }
    validate_config(config);
    const double length = 2.0 * half_length_m;
    const double rho_a = config.density_kgm3 * config.section.area_m2;
    const double e = config.youngs_modulus_pa;

    // Element DoF order [v1, w1, ty1, tz1, v2, w2, ty2, tz2].
    const std::array<int, 4> v_slots{0, 3, 4, 7};
    const std::array<int, 4> w_slots{1, 2, 5, 6};
    const std::array<double, 4> plus{1.0, 1.0, 1.0, 1.0};
    const std::array<double, 4> w_signs{1.0, -1.0, 1.0, -1.0};

    Matrix8 mass = Matrix8::Zero();
    Matrix8 stiffness = Matrix8::Zero();
    const Matrix4 m_plane = plane_mass(rho_a, length);
    scatter_plane(mass, m_plane, v_slots, plus);
    scatter_plane(mass, m_plane, w_slots, w_signs);
    scatter_plane(stiffness, plane_stiffness(e * config.section.iz_m4, length),
                  v_slots, plus);
    scatter_plane(stiffness, plane_stiffness(e * config.section.iy_m4, length),
                  w_slots, w_signs);
    return {mass, stiffness};
}

GlobalSystem assemble(const BeamConfig& config, const DamageScenario& scenario) {
    validate_config(config);
    const int n_el = config.n_elements;
    if (scenario.stiffness_factors.size() != static_cast<std::size_t>(n_el)) {
        throw std::invalid_argument("assemble: one stiffness factor per element required");
    }
    for (std::size_t e = 0; e < scenario.stiffness_factors.size(); ++e) {
        const double factor = scenario.stiffness_factors[e];
        if (!(factor > 0.0) || factor > 1.0) {
            std::ostringstream msg;
            msg << "assemble: stiffness factor for element " << (e + 1)
                << " must lie in (0, 1], got " << factor;
            throw std::invalid_argument(msg.str());
        }
    }
    for (const LumpedMass& mass : scenario.lumped_masses) {
        if (mass.node < 1 || mass.node > n_el) {
            std::ostringstream msg;
            msg << "assemble: lumped mass node " << mass.node << " outside 1.." << n_el
                << " (node 0 is the clamp)";
            throw std::invalid_argument(msg.str());
        }
        if (mass.kg < 0.0) {
            throw std::invalid_argument("assemble: lumped mass must be non-negative");
        }
    }

    const Eigen::Index n = 4 * static_cast<Eigen::Index>(n_el);
    GlobalSystem system;
    system.M = Eigen::MatrixXd::Zero(n, n);
    system.K = Eigen::MatrixXd::Zero(n, n);
    for (int node = 1; node <= n_el; ++node) {
        system.dof_map.emplace_back(node, DofKind::v);
        system.dof_map.emplace_back(node, DofKind::w);
        system.dof_map.emplace_back(node, DofKind::theta_y);
        system.dof_map.emplace_back(node, DofKind::theta_z);
    }

    const double half_length = config.length_m / static_cast<double>(n_el) / 2.0;
    const auto [mass_el, stiffness_el] = element_matrices(half_length, config);

    for (int e = 1; e <= n_el; ++e) {
        const Matrix8 k_el = scenario.stiffness_factors[static_cast<std::size_t>(e - 1)] *
                             stiffness_el;
        // Local 0..3 belong to node e-1, local 4..7 to node e; the clamped
        // node 0 has no global rows.
        std::array<Eigen::Index, 8> global;
        for (int local = 0; local < 8; ++local) {
            const int node = (local < 4) ? e - 1 : e;
            global[static_cast<std::size_t>(local)] =
                node == 0 ? -1 : static_cast<Eigen::Index>((node - 1) * 4 + local % 4);
        }
        for (int a = 0; a < 8; ++a) {
            if (global[static_cast<std::size_t>(a)] < 0) continue;
            for (int b = 0; b < 8; ++b) {
                if (global[static_cast<std::size_t>(b)] < 0) continue;
                system.M(global[static_cast<std::size_t>(a)], global[static_cast<std::size_t>(b)]) +=
                    mass_el(a, b);
                system.K(global[static_cast<std::size_t>(a)], global[static_cast<std::size_t>(b)]) +=
                    k_el(a, b);
            }
        }
    }

    for (const LumpedMass& mass : scenario.lumped_masses) {
        const Eigen::Index base = static_cast<Eigen::Index>((mass.node - 1) * 4);
        system.M(base + 0, base + 0) += mass.kg;
        system.M(base + 1, base + 1) += mass.kg;
    }

    if (Eigen::LLT<Eigen::MatrixXd>(system.M).info() != Eigen::Success ||
        Eigen::LLT<Eigen::MatrixXd>(system.K).info() != Eigen::Success) {
        throw std::runtime_error("assemble: mass or stiffness matrix not positive definite");
    }
    system.Cd = modal_damping_matrix(system.M, system.K, config.modal_damping);
    return system;
}

std::vector<Eigen::Index> GlobalSystem::translational_dofs() const {
    std::vector<Eigen::Index> dofs;
    for (std::size_t i = 0; i < dof_map.size(); ++i) {
        if (dof_map[i].second == DofKind::v || dof_map[i].second == DofKind::w) {
            dofs.push_back(static_cast<Eigen::Index>(i));
        }
    }
    return dofs;
}

std::vector<std::string> GlobalSystem::translational_labels() const {
    std::vector<std::string> labels;
    for (const auto& [node, kind] : dof_map) {
        if (kind == DofKind::v) {
            labels.push_back("n" + std::to_string(node) + "_y");
        } else if (kind == DofKind::w) {
            labels.push_back("n" + std::to_string(node) + "_z");
        }
    }
    return labels;
}

Eigen::MatrixXd modal_damping_matrix(const Eigen::MatrixXd& M,
                                     const Eigen::MatrixXd& K, double zeta) {
    if (zeta <= 0.0 || zeta >= 1.0) {
        throw std::invalid_argument("modal_damping_matrix: zeta must lie in (0, 1)");
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(K, M);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("modal_damping_matrix: eigensolve failed");
    }
    const Eigen::VectorXd omega_sq = solver.eigenvalues();
    if (omega_sq.minCoeff() <= 0.0) {
        throw std::runtime_error("modal_damping_matrix: stiffness matrix not positive definite");
    }
    // Phi is M-orthonormal, so M Phi diag(2 zeta w) Phi^T M damps each mode
    // by exactly zeta.
    const Eigen::VectorXd two_zeta_omega = 2.0 * zeta * omega_sq.cwiseSqrt().array();
    Eigen::MatrixXd damping = M * solver.eigenvectors() *
                              two_zeta_omega.asDiagonal() *
                              solver.eigenvectors().transpose() * M;
    return 0.5 * (damping + damping.transpose());
}

ModalSet analytical_modes(const GlobalSystem& system, std::array<double, 2> band_hz) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(system.K, system.M);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("analytical_modes: eigensolve failed");
    }
    if (solver.eigenvalues().minCoeff() <= 0.0) {
        throw std::runtime_error("analytical_modes: system is not positive definite");
    }

    const auto dofs = system.translational_dofs();
    ModalSet set;
    set.band_hz = band_hz;
    set.order = system.n_dofs();
    const double two_pi = 2.0 * std::numbers::pi;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double omega = std::sqrt(solver.eigenvalues()[i]);
        const double f_hz = omega / two_pi;
        if (f_hz < band_hz[0] || f_hz > band_hz[1]) continue;
        const Eigen::VectorXd shape = solver.eigenvectors().col(i);
        const double zeta = shape.dot(system.Cd * shape) / (2.0 * omega);
        Eigen::VectorXcd phi(dofs.size());
        for (std::size_t d = 0; d < dofs.size(); ++d) {
            phi[static_cast<Eigen::Index>(d)] = shape[dofs[d]];
        }
        const std::complex<double> pole(-zeta * omega,
                                        omega * std::sqrt(1.0 - zeta * zeta));
        set.modes.push_back(make_mode(pole, std::move(phi)));
    }
    return set;
}

TimeSeriesSet simulate_step_response(const GlobalSystem& system,
                                     const StepInputSpec& input,
                                     double sample_rate_hz, double duration_s) {
    const Eigen::Index n = system.n_dofs();
    if (input.direction != Direction::y && input.direction != Direction::z) {
        throw std::invalid_argument("simulate: input direction must be y or z");
    }
    if (sample_rate_hz <= 0.0 || duration_s <= 0.0) {
        throw std::invalid_argument("simulate: sample rate and duration must be positive");
    }
    const DofKind kind = input.direction == Direction::y ? DofKind::v : DofKind::w;
    Eigen::Index force_dof = -1;
    for (std::size_t i = 0; i < system.dof_map.size(); ++i) {
        if (system.dof_map[i].first == input.node && system.dof_map[i].second == kind) {
            force_dof = static_cast<Eigen::Index>(i);
            break;
        }
    }
    if (force_dof < 0) {
        std::ostringstream msg;
        msg << "simulate: no free " << to_string(input.direction)
            << "-translation DoF at node " << input.node;
        throw std::invalid_argument(msg.str());
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(system.K, system.M);
    const double f_max =
        std::sqrt(solver.eigenvalues().maxCoeff()) / (2.0 * std::numbers::pi);
    if (sample_rate_hz <= 2.0 * f_max) {
        std::ostringstream msg;
        msg << "simulate: sample rate " << sample_rate_hz
            << " Hz aliases the highest mode at " << f_max << " Hz";
        throw std::invalid_argument(msg.str());
    }

    const Eigen::Index n_samples =
        static_cast<Eigen::Index>(std::llround(duration_s * sample_rate_hz));
    if (n_samples < 2) {
        throw std::invalid_argument("simulate: fewer than two samples requested");
    }

    const Eigen::LLT<Eigen::MatrixXd> mass_llt(system.M);
    Eigen::MatrixXd state_a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    state_a.topRightCorner(n, n).setIdentity();
    state_a.bottomLeftCorner(n, n) = -mass_llt.solve(system.K);
    state_a.bottomRightCorner(n, n) = -mass_llt.solve(system.Cd);

    Eigen::VectorXd force = Eigen::VectorXd::Zero(n);
    force[force_dof] = 1.0;
    Eigen::VectorXd state_b = Eigen::VectorXd::Zero(2 * n);
    state_b.tail(n) = mass_llt.solve(force);

    // Joint exponential gives the zero-order-hold pair (Ad, Bd) in one shot.
    const double dt = 1.0 / sample_rate_hz;
    Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(2 * n + 1, 2 * n + 1);
    augmented.topLeftCorner(2 * n, 2 * n) = state_a * dt;
    augmented.topRightCorner(2 * n, 1) = state_b * dt;
    const Eigen::MatrixXd phi = augmented.exp();
    const Eigen::MatrixXd ad = phi.topLeftCorner(2 * n, 2 * n);
    const Eigen::VectorXd bd = phi.topRightCorner(2 * n, 1);

    const auto out_dofs = system.translational_dofs();
    const auto out_labels = system.translational_labels();
    const Eigen::Index p = static_cast<Eigen::Index>(out_dofs.size());

    Eigen::MatrixXd samples(p + 1, n_samples);
    Eigen::VectorXd state = Eigen::VectorXd::Zero(2 * n);
    for (Eigen::Index k = 0; k < n_samples; ++k) {
        // Force onset is delayed by one sample so the recorded input keeps a
        // nonzero spectrum at every retained FFT bin.
        const double u = k >= 1 ? input.amplitude_n : 0.0;
        samples(0, k) = u;
        for (Eigen::Index i = 0; i < p; ++i) {
            samples(i + 1, k) = state[out_dofs[static_cast<std::size_t>(i)]];
        }
        state = ad * state + bd * u;
    }

    const std::string node_label = "n" + std::to_string(input.node);
    std::vector<ChannelMeta> channels;
    channels.push_back({"force_" + node_label + "_" + to_string(input.direction),
                        ChannelKind::force_input, node_label, input.direction, ""});
    for (Eigen::Index i = 0; i < p; ++i) {
        const auto& [node, dof_kind] = system.dof_map[static_cast<std::size_t>(
            out_dofs[static_cast<std::size_t>(i)])];
        channels.push_back({out_labels[static_cast<std::size_t>(i)],
                            ChannelKind::displacement_output,
                            "n" + std::to_string(node),
                            dof_kind == DofKind::v ? Direction::y : Direction::z, ""});
    }
    return {sample_rate_hz, std::move(samples), std::move(channels)};
}

SectionProperties section_for_first_frequencies(double f1_hz, double f2_hz,
                                                double area_m2, double length_m,
                                                double youngs_modulus_pa,
                                                double density_kgm3, int n_elements) {
    if (f1_hz <= 0.0 || f2_hz <= 0.0 || area_m2 <= 0.0 || length_m <= 0.0 ||
        youngs_modulus_pa <= 0.0 || density_kgm3 <= 0.0 || n_elements < 1) {
        throw std::invalid_argument("section solve: inputs must be strictly positive");
    }

    // Single-plane clamped pencil with EI = 1; omega^2 then scales linearly
    // in EI at fixed area, so each target inverts in closed form.
    const int n_free = n_elements;
    const Eigen::Index n = 2 * static_cast<Eigen::Index>(n_free);
    Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
    const double el_length = length_m / static_cast<double>(n_elements);
    const Matrix4 k_el = plane_stiffness(1.0, el_length);
    const Matrix4 m_el = plane_mass(density_kgm3 * area_m2, el_length);
    for (int e = 1; e <= n_elements; ++e) {
        std::array<Eigen::Index, 4> global;
        for (int local = 0; local < 4; ++local) {
            const int node = (local < 2) ? e - 1 : e;
            global[static_cast<std::size_t>(local)] =
                node == 0 ? -1 : static_cast<Eigen::Index>((node - 1) * 2 + local % 2);
        }
        for (int a = 0; a < 4; ++a) {
            if (global[static_cast<std::size_t>(a)] < 0) continue;
            for (int b = 0; b < 4; ++b) {
                if (global[static_cast<std::size_t>(b)] < 0) continue;
                stiffness(global[static_cast<std::size_t>(a)],
                          global[static_cast<std::size_t>(b)]) += k_el(a, b);
                mass(global[static_cast<std::size_t>(a)],
                     global[static_cast<std::size_t>(b)]) += m_el(a, b);
            }
        }
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(stiffness, mass);
    const double omega_sq_unit = solver.eigenvalues().minCoeff();
    if (omega_sq_unit <= 0.0) {
        throw std::runtime_error("section solve: degenerate pencil");
    }

    const double two_pi = 2.0 * std::numbers::pi;
    SectionProperties section;
    section.area_m2 = area_m2;
    section.iz_m4 = std::pow(two_pi * f1_hz, 2) / (omega_sq_unit * youngs_modulus_pa);
    section.iy_m4 = std::pow(two_pi * f2_hz, 2) / (omega_sq_unit * youngs_modulus_pa);
    return section;
}

BeamConfig default_beam_config() {
    BeamConfig config;
    config.section = section_for_first_frequencies(
        9.23, 13.23, 1.06e-4, config.length_m, config.youngs_modulus_pa,
        config.density_kgm3, config.n_elements);
    return config;
}

std::map<std::string, DamageScenario> preset_scenarios(int n_elements) {
    if (n_elements < 2) {
        throw std::invalid_argument("preset_scenarios: need at least two elements");
    }
    std::map<std::string, DamageScenario> cases;
    cases["case1"] = DamageScenario::baseline(n_elements);
    for (const auto& [id, factor] : std::initializer_list<std::pair<const char*, double>>{
             {"case2", 0.95}, {"case3", 0.90}, {"case4", 0.80}}) {
        DamageScenario scenario = DamageScenario::baseline(n_elements);
        scenario.stiffness_factors[1] = factor;  // second element, root side
        cases[id] = scenario;
    }
    DamageScenario added_mass = DamageScenario::baseline(n_elements);
    added_mass.lumped_masses.push_back({2, 0.1});  // mid-span node
    cases["case5"] = added_mass;
    return cases;
}

}  // namespace modalshm
