#include "modalshm/modal_set.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace modalshm {

Eigen::VectorXcd normalize_shape(Eigen::VectorXcd phi) {
    if (phi.size() == 0) {
        throw std::invalid_argument("normalize_shape: empty shape vector");
    }
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        const double mag = std::abs(phi[i]);
        if (mag > best) {
            best = mag;
            imax = i;
        }
    }
    if (best == 0.0) {
        throw std::invalid_argument("normalize_shape: zero shape vector");
    }
    const std::complex<double> rotation = std::conj(phi[imax]) / best;
    phi *= rotation;
    phi /= phi.norm();
    return phi;
}

Mode make_mode(std::complex<double> pole, Eigen::VectorXcd phi) {
    if (!(pole.imag() > 0.0)) {
        throw std::invalid_argument("make_mode: pole must lie in the upper half plane");
    }
    Mode mode;
    mode.pole = pole;
    const double magnitude = std::abs(pole);
    mode.omega_hz = magnitude / (2.0 * std::numbers::pi);
    mode.zeta = -pole.real() / magnitude;
    mode.phi = normalize_shape(std::move(phi));
    return mode;
}

}  // namespace modalshm
