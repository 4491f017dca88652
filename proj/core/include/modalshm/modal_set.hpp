#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace modalshm {

/// One vibration mode. Conventions:
///   pole     continuous-time, upper half plane (one entry per conjugate pair)
///   omega_hz |pole| / (2 pi)
///   zeta     -Re(pole) / |pole|
///   phi      unit norm, largest-magnitude entry rotated to the positive real axis
struct Mode {
    std::complex<double> pole;
    double omega_hz = 0.0;
    double zeta = 0.0;
    Eigen::VectorXcd phi;
};

/// Modes sorted by ascending natural frequency within a band.
struct ModalSet {
    std::vector<Mode> modes;
    std::array<double, 2> band_hz{0.0, 0.0};
    Eigen::Index order = 0;
    std::uint64_t seed = 0;

    bool empty() const { return modes.empty(); }
    std::size_t size() const { return modes.size(); }
};

/// Canonical phase/scale normalization described above.
Eigen::VectorXcd normalize_shape(Eigen::VectorXcd phi);

/// Builds a Mode from an upper-half-plane pole, applying all conventions.
Mode make_mode(std::complex<double> pole, Eigen::VectorXcd phi);

}  // namespace modalshm
