#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <utility>

#include "modalshm/frf.hpp"
#include "modalshm/modal_set.hpp"
#include "modalshm/state_space.hpp"

namespace modalshm {

/// Random tangential directions, one column (right) or row (left) per raw
/// interpolation point. Real-valued so that conjugate closure of the data
/// keeps the pencil conjugate-symmetric.
struct TangentialDirections {
    Eigen::MatrixXd right;  // m x n_right
    Eigen::MatrixXd left;   // n_left x p
    std::uint64_t seed = 0;
};

/// Deterministic per seed. Columns/rows have unit Euclidean norm with the
/// largest-magnitude entry made positive (so m = 1 always yields [1]).
TangentialDirections generate_directions(std::uint64_t seed, Eigen::Index m,
                                         Eigen::Index p, Eigen::Index n_right,
                                         Eigen::Index n_left);

/// Left/right tangential interpolation data, closed under conjugation.
/// Points are stored pair-adjacent: [s0, conj(s0), s1, conj(s1), ...].
struct InterpolationSets {
    Eigen::VectorXcd lambda;           // right points, length rho
    Eigen::VectorXcd mu;               // left points, length q
    Eigen::MatrixXcd W;                // p x rho, columns H(lambda_i) r_i
    Eigen::MatrixXcd V;                // q x m, rows l_j H(mu_j)
    Eigen::MatrixXd right_directions;  // m x rho (column per point)
    Eigen::MatrixXd left_directions;   // q x p (row per point)
    std::uint64_t seed = 0;

    Eigen::Index rho() const { return lambda.size(); }
    Eigen::Index q() const { return mu.size(); }
};

/// Splits FRF bins alternately (0-based even bins left, odd bins right),
/// maps them to s = j 2 pi f, and closes both sides under conjugation.
/// Directions must be sized for ceil/floor(n_bins/2) raw points.
InterpolationSets partition(const FrfDataset& frf,
                            const TangentialDirections& directions);

/// Loewner and shifted-Loewner divided-difference matrices over the sets.
struct LoewnerPencil {
    Eigen::MatrixXcd L;   // q x rho
    Eigen::MatrixXcd Ls;  // q x rho
    InterpolationSets data;
};

LoewnerPencil build_pencil(const InterpolationSets& sets);

/// Frobenius residuals of the two Sylvester identities the pencil satisfies
/// by construction, each divided by (norm of the matrix + 1).
std::pair<double, double> sylvester_residuals(const LoewnerPencil& pencil);

/// The pencil mapped to real form by the conjugate-pair block transform,
/// with the SVD factors shared by every truncation order.
struct PencilSvd {
    Eigen::MatrixXd L_re;   // q x rho
    Eigen::MatrixXd Ls_re;  // q x rho
    Eigen::MatrixXd V_re;   // q x m
    Eigen::MatrixXd W_re;   // p x rho
    Eigen::MatrixXd left_basis;      // q x r, left singular vectors of [L, Ls]
    Eigen::MatrixXd right_basis;     // rho x r, right singular vectors of [L; Ls]
    Eigen::VectorXd singular_values; // of the row-stacked pencil, descending
};

PencilSvd compute_pencil_svd(const LoewnerPencil& pencil);

/// Rank-k projected realization E = -Y^T L X, A = -Y^T Ls X, B = Y^T V,
/// C = W X. Requires k even (conjugate pole pairs) and within numerical rank.
StateSpaceRealization realize(const PencilSvd& svd, Eigen::Index k);
StateSpaceRealization realize(const LoewnerPencil& pencil, Eigen::Index k);

/// Generalized eigen-analysis of (A, E); keeps stable upper-half-plane poles
/// with zeta < 0.5 and natural frequency inside the band. Shapes are C x.
ModalSet extract_modes(const StateSpaceRealization& realization,
                       std::array<double, 2> band_hz);

struct IdentifyOptions {
    /// In-band bins are decimated to at most this count before the pencil
    /// is built; keeps the SVD tractable on dense simulation grids.
    Eigen::Index max_bins = 512;
};

/// select_band -> decimate -> partition -> build_pencil -> realize ->
/// extract_modes, with directions drawn from the seed.
ModalSet identify(const FrfDataset& frf, Eigen::Index order, std::uint64_t seed,
                  std::array<double, 2> band_hz, const IdentifyOptions& options = {});

}  // namespace modalshm
