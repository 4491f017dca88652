#include "modalshm/loewner.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace modalshm {

namespace {

constexpr double k_rank_tol = 1e-12;

/// Uniform double in [-1, 1) from the full 64-bit state; pinned mapping so
/// results do not depend on the standard library's distribution internals.
double symmetric_uniform(std::mt19937_64& rng) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2.0 * unit - 1.0;
}

void canonical_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > best) {
            best = std::abs(v[i]);
            imax = i;
        }
    }
    if (v[imax] < 0.0) v = -v;
}

/// Requires points stored pair-adjacent [s, conj(s), ...].
void check_conjugate_layout(const Eigen::VectorXcd& points, const char* side) {
    if (points.size() % 2 != 0) {
        std::ostringstream msg;
        msg << "loewner: " << side << " points are not conjugate-paired (odd count)";
        throw std::invalid_argument(msg.str());
    }
    for (Eigen::Index t = 0; t < points.size(); t += 2) {
        if (points[t + 1] != std::conj(points[t])) {
            std::ostringstream msg;
            msg << "loewner: " << side << " points are not conjugate-paired at index " << t;
            throw std::invalid_argument(msg.str());
        }
    }
}

/// Applies the unitary pair block (1/sqrt(2)) [[1, i], [1, -i]] from the left
/// (conjugated) to rows: rows (2t, 2t+1) -> ((r0+r1), -i(r0-r1)) / sqrt(2).
Eigen::MatrixXcd pair_transform_rows(const Eigen::MatrixXcd& mat) {
    Eigen::MatrixXcd out(mat.rows(), mat.cols());
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const std::complex<double> minus_i(0.0, -1.0);
    for (Eigen::Index t = 0; t + 1 < mat.rows(); t += 2) {
        out.row(t) = inv_sqrt2 * (mat.row(t) + mat.row(t + 1));
        out.row(t + 1) = minus_i * inv_sqrt2 * (mat.row(t) - mat.row(t + 1));
    }
    return out;
}

/// Applies the same block (not conjugated) to columns:
/// cols (2t, 2t+1) -> ((c0+c1), i(c0-c1)) / sqrt(2).
Eigen::MatrixXcd pair_transform_cols(const Eigen::MatrixXcd& mat) {
    Eigen::MatrixXcd out(mat.rows(), mat.cols());
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const std::complex<double> plus_i(0.0, 1.0);
    for (Eigen::Index t = 0; t + 1 < mat.cols(); t += 2) {
        out.col(t) = inv_sqrt2 * (mat.col(t) + mat.col(t + 1));
        out.col(t + 1) = plus_i * inv_sqrt2 * (mat.col(t) - mat.col(t + 1));
    }
    return out;
}

Eigen::MatrixXd take_real(const Eigen::MatrixXcd& mat, const char* what) {
    const double scale = mat.norm();
    if (mat.imag().norm() > 1e-8 * (scale + 1.0)) {
        std::ostringstream msg;
        msg << "loewner: " << what
            << " did not become real under the conjugate-pair transform";
        throw std::runtime_error(msg.str());
    }
    return mat.real();
}

}  // namespace

TangentialDirections generate_directions(std::uint64_t seed, Eigen::Index m,
                                         Eigen::Index p, Eigen::Index n_right,
                                         Eigen::Index n_left) {
    if (m < 1 || p < 1 || n_right < 1 || n_left < 1) {
        throw std::invalid_argument("generate_directions: all dimensions must be positive");
    }
    std::mt19937_64 rng(seed);
    TangentialDirections directions;
    directions.seed = seed;
    directions.right.resize(m, n_right);
    for (Eigen::Index i = 0; i < n_right; ++i) {
        Eigen::VectorXd column(m);
        for (Eigen::Index r = 0; r < m; ++r) column[r] = symmetric_uniform(rng);
        if (column.norm() == 0.0) column.setOnes();
        column.normalize();
        canonical_sign(column);
        directions.right.col(i) = column;
    }
    directions.left.resize(n_left, p);
    for (Eigen::Index j = 0; j < n_left; ++j) {
        Eigen::VectorXd row(p);
        for (Eigen::Index c = 0; c < p; ++c) row[c] = symmetric_uniform(rng);
        if (row.norm() == 0.0) row.setOnes();
        row.normalize();
        canonical_sign(row);
        directions.left.row(j) = row.transpose();
    }
    return directions;
}

InterpolationSets partition(const FrfDataset& frf,
                            const TangentialDirections& directions) {
    const Eigen::Index n = frf.n_bins();
    if (n < 2) {
        throw std::invalid_argument("partition: need at least two frequency bins");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        if (frf.frequencies_hz()[k] <= 0.0) {
            throw std::invalid_argument(
                "partition: frequencies must be strictly positive (conjugate closure)");
        }
    }
    const Eigen::Index p = frf.n_outputs();
    const Eigen::Index m = frf.n_inputs();
    const Eigen::Index n_left = (n + 1) / 2;   // even bin indices
    const Eigen::Index n_right = n / 2;        // odd bin indices
    if (directions.right.rows() != m || directions.right.cols() != n_right ||
        directions.left.cols() != p || directions.left.rows() != n_left) {
        throw std::invalid_argument("partition: directions not dimensioned for this dataset");
    }

    InterpolationSets sets;
    sets.seed = directions.seed;
    sets.lambda.resize(2 * n_right);
    sets.W.resize(p, 2 * n_right);
    sets.right_directions.resize(m, 2 * n_right);
    sets.mu.resize(2 * n_left);
    sets.V.resize(2 * n_left, m);
    sets.left_directions.resize(2 * n_left, p);

    const double two_pi = 2.0 * std::numbers::pi;
    Eigen::Index right_at = 0;
    Eigen::Index left_at = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const std::complex<double> s(0.0, two_pi * frf.frequencies_hz()[k]);
        const auto response = frf.response_at(k);
        if (k % 2 == 1) {
            const Eigen::VectorXd r = directions.right.col(right_at / 2);
            const Eigen::VectorXcd w = response * r;
            sets.lambda[right_at] = s;
            sets.lambda[right_at + 1] = std::conj(s);
            sets.W.col(right_at) = w;
            sets.W.col(right_at + 1) = w.conjugate();
            sets.right_directions.col(right_at) = r;
            sets.right_directions.col(right_at + 1) = r;
            right_at += 2;
        } else {
            const Eigen::RowVectorXd l = directions.left.row(left_at / 2);
            const Eigen::RowVectorXcd v = l * response;
            sets.mu[left_at] = s;
            sets.mu[left_at + 1] = std::conj(s);
            sets.V.row(left_at) = v;
            sets.V.row(left_at + 1) = v.conjugate();
            sets.left_directions.row(left_at) = l;
            sets.left_directions.row(left_at + 1) = l;
            left_at += 2;
        }
    }
    return sets;
}

LoewnerPencil build_pencil(const InterpolationSets& sets) {
    const Eigen::Index rho = sets.rho();
    const Eigen::Index q = sets.q();
    if (rho < 1 || q < 1) {
        throw std::invalid_argument("build_pencil: empty interpolation sets");
    }
    if (sets.W.cols() != rho || sets.V.rows() != q ||
        sets.right_directions.cols() != rho || sets.left_directions.rows() != q ||
        sets.W.rows() != sets.left_directions.cols() ||
        sets.V.cols() != sets.right_directions.rows()) {
        throw std::invalid_argument("build_pencil: inconsistent set dimensions");
    }

    // Scalars v_j r_i and l_j w_i for every (j, i), as matrices.
    const Eigen::MatrixXcd vr =
        sets.V * sets.right_directions.cast<std::complex<double>>();
    const Eigen::MatrixXcd lw =
        sets.left_directions.cast<std::complex<double>>() * sets.W;

    LoewnerPencil pencil;
    pencil.L.resize(q, rho);
    pencil.Ls.resize(q, rho);
    for (Eigen::Index j = 0; j < q; ++j) {
        for (Eigen::Index i = 0; i < rho; ++i) {
            const std::complex<double> gap = sets.mu[j] - sets.lambda[i];
            if (gap == std::complex<double>(0.0, 0.0)) {
                std::ostringstream msg;
                msg << "build_pencil: coincident points mu[" << j << "] = lambda[" << i
                    << "] = " << sets.mu[j].real() << (sets.mu[j].imag() < 0 ? " - " : " + ")
                    << std::abs(sets.mu[j].imag()) << "j";
                throw std::runtime_error(msg.str());
            }
            pencil.L(j, i) = (vr(j, i) - lw(j, i)) / gap;
            pencil.Ls(j, i) = (sets.mu[j] * vr(j, i) - sets.lambda[i] * lw(j, i)) / gap;
        }
    }
    pencil.data = sets;
    return pencil;
}

std::pair<double, double> sylvester_residuals(const LoewnerPencil& pencil) {
    const auto& sets = pencil.data;
    const Eigen::MatrixXcd lw =
        sets.left_directions.cast<std::complex<double>>() * sets.W;
    const Eigen::MatrixXcd vr =
        sets.V * sets.right_directions.cast<std::complex<double>>();

    const auto lambda = sets.lambda.asDiagonal();
    const auto mu = sets.mu.asDiagonal();

    const Eigen::MatrixXcd r1 = pencil.L * lambda - mu * pencil.L - (lw - vr);
    const Eigen::MatrixXcd r2 =
        pencil.Ls * lambda - mu * pencil.Ls - (lw * lambda - mu * vr);

    return {r1.norm() / (pencil.L.norm() + 1.0), r2.norm() / (pencil.Ls.norm() + 1.0)};
}

PencilSvd compute_pencil_svd(const LoewnerPencil& pencil) {
    check_conjugate_layout(pencil.data.mu, "left");
    check_conjugate_layout(pencil.data.lambda, "right");

    PencilSvd svd;
    svd.L_re = take_real(pair_transform_cols(pair_transform_rows(pencil.L)), "Loewner matrix");
    svd.Ls_re = take_real(pair_transform_cols(pair_transform_rows(pencil.Ls)),
                          "shifted Loewner matrix");
    svd.V_re = take_real(pair_transform_rows(pencil.data.V), "left data");
    svd.W_re = take_real(pair_transform_cols(pencil.data.W), "right data");

    const Eigen::Index q = svd.L_re.rows();
    const Eigen::Index rho = svd.L_re.cols();

    Eigen::MatrixXd row_stacked(2 * q, rho);
    row_stacked << svd.L_re, svd.Ls_re;
    Eigen::BDCSVD<Eigen::MatrixXd> rows_svd(row_stacked, Eigen::ComputeThinV);
    svd.right_basis = rows_svd.matrixV();
    svd.singular_values = rows_svd.singularValues();

    Eigen::MatrixXd col_stacked(q, 2 * rho);
    col_stacked << svd.L_re, svd.Ls_re;
    Eigen::BDCSVD<Eigen::MatrixXd> cols_svd(col_stacked, Eigen::ComputeThinU);
    svd.left_basis = cols_svd.matrixU();
    return svd;
}

StateSpaceRealization realize(const PencilSvd& svd, Eigen::Index k) {
    const Eigen::Index max_order =
        std::min(svd.left_basis.cols(), svd.right_basis.cols());
    if (k < 1 || k > max_order) {
        std::ostringstream msg;
        msg << "realize: order " << k << " outside [1, " << max_order << "]";
        throw std::invalid_argument(msg.str());
    }
    if (k % 2 != 0) {
        throw std::invalid_argument("realize: order must be even (conjugate pole pairs)");
    }
    if (svd.singular_values[k - 1] < k_rank_tol * svd.singular_values[0]) {
        std::ostringstream msg;
        msg << "realize: order " << k << " exceeds the numerical rank (sigma_k/sigma_1 = "
            << svd.singular_values[k - 1] / svd.singular_values[0] << ")";
        throw std::runtime_error(msg.str());
    }

    const auto Y = svd.left_basis.leftCols(k);
    const auto X = svd.right_basis.leftCols(k);

    StateSpaceRealization realization;
    realization.E = -(Y.transpose() * svd.L_re * X);
    realization.A = -(Y.transpose() * svd.Ls_re * X);
    realization.B = Y.transpose() * svd.V_re;
    realization.C = svd.W_re * X;
    realization.singular_values = svd.singular_values;
    validate(realization);
    return realization;
}

StateSpaceRealization realize(const LoewnerPencil& pencil, Eigen::Index k) {
    return realize(compute_pencil_svd(pencil), k);
}

ModalSet extract_modes(const StateSpaceRealization& realization,
                       std::array<double, 2> band_hz) {
    validate(realization);
    // Over-modelled orders legitimately carry an ill-conditioned E; the QZ
    // iteration still resolves the well-separated physical poles and the
    // acceptance filters below drop the spurious ones. Only a structurally
    // rank-deficient E is rejected.
    Eigen::FullPivLU<Eigen::MatrixXd> lu(realization.E);
    lu.setThreshold(1e-14);
    if (lu.rank() < realization.order() / 2) {
        throw std::runtime_error("extract_modes: degenerate realization (singular E)");
    }

    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> solver;
    solver.compute(realization.A, realization.E, true);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("extract_modes: generalized eigensolver failed");
    }

    const auto alphas = solver.alphas();
    const auto betas = solver.betas();
    const Eigen::MatrixXcd vectors = solver.eigenvectors();

    ModalSet set;
    set.band_hz = band_hz;
    set.order = realization.order();
    const double two_pi = 2.0 * std::numbers::pi;
    for (Eigen::Index i = 0; i < alphas.size(); ++i) {
        if (betas[i] == 0.0) continue;
        const std::complex<double> pole = alphas[i] / betas[i];
        if (!std::isfinite(pole.real()) || !std::isfinite(pole.imag())) continue;
        if (!(pole.imag() > 0.0) || !(pole.real() < 0.0)) continue;
        const double magnitude = std::abs(pole);
        const double zeta = -pole.real() / magnitude;
        if (zeta >= 0.5) continue;  // discard overdamped numerical poles
        const double f_hz = magnitude / two_pi;
        if (f_hz < band_hz[0] || f_hz > band_hz[1]) continue;
        Eigen::VectorXcd phi = realization.C * vectors.col(i);
        if (phi.norm() == 0.0) continue;
        set.modes.push_back(make_mode(pole, std::move(phi)));
    }

    std::sort(set.modes.begin(), set.modes.end(), [](const Mode& a, const Mode& b) {
        if (a.omega_hz != b.omega_hz) return a.omega_hz < b.omega_hz;
        return a.zeta < b.zeta;
    });
    return set;
}

ModalSet identify(const FrfDataset& frf, Eigen::Index order, std::uint64_t seed,
                  std::array<double, 2> band_hz, const IdentifyOptions& options) {
    const FrfDataset banded =
        decimate_bins(select_band(frf, band_hz[0], band_hz[1]), options.max_bins);
    const Eigen::Index n = banded.n_bins();
    if (n < 2) {
        throw std::invalid_argument("identify: fewer than two bins in the band");
    }
    const TangentialDirections directions = generate_directions(
        seed, banded.n_inputs(), banded.n_outputs(), n / 2, (n + 1) / 2);
    const LoewnerPencil pencil = build_pencil(partition(banded, directions));
    ModalSet set = extract_modes(realize(pencil, order), band_hz);
    set.seed = seed;
    return set;
}

}  // namespace modalshm
