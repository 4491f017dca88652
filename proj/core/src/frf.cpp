#include "modalshm/frf.hpp"

#include <Eigen/LU>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace modalshm {

namespace {

void check_finite(const Eigen::MatrixXcd& values) {
    if (!values.allFinite()) {
        throw std::invalid_argument("frf: non-finite entries in response tensor");
    }
}

/// Spectrum used for the ratio. Without windowing the record is first
/// differenced (x[k] - x[k-1], x[-1] = 0): for records that settle, such as
/// held-step responses, this cancels the wrap-around leakage of the
/// non-periodic window exactly, and the ratio of two differenced spectra
/// equals the plain ratio whenever both records end at zero. With the Hann
/// option the raw record is windowed instead.
Eigen::VectorXcd spectrum(const Eigen::VectorXd& record, bool hann) {
    Eigen::VectorXd samples = record;
    const Eigen::Index n = samples.size();
    if (hann) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi *
                                                   static_cast<double>(k) /
                                                   static_cast<double>(n - 1)));
            samples[k] *= w;
        }
    } else {
        for (Eigen::Index k = n - 1; k > 0; --k) samples[k] -= samples[k - 1];
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> out;
    std::vector<double> in(samples.data(), samples.data() + n);
    fft.fwd(out, in);
    return Eigen::Map<const Eigen::VectorXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

}  // namespace

const char* to_string(ResponseKind kind) {
    switch (kind) {
        case ResponseKind::receptance: return "receptance";
        case ResponseKind::accelerance: return "accelerance";
    }
    throw std::logic_error("unknown response kind");
}

ResponseKind response_kind_from_string(const std::string& text) {
    if (text == "receptance") return ResponseKind::receptance;
    if (text == "accelerance") return ResponseKind::accelerance;
    throw std::invalid_argument("unknown response kind: '" + text +
                                "' (expected receptance or accelerance)");
}

FrfDataset::FrfDataset(Eigen::VectorXd frequencies_hz, Eigen::MatrixXcd values,
                       std::vector<ChannelMeta> output_meta,
                       std::vector<ChannelMeta> input_meta, ResponseKind kind)
    : frequencies_hz_(std::move(frequencies_hz)),
      values_(std::move(values)),
      output_meta_(std::move(output_meta)),
      input_meta_(std::move(input_meta)),
      kind_(kind) {
    const Eigen::Index p = static_cast<Eigen::Index>(output_meta_.size());
    const Eigen::Index m = static_cast<Eigen::Index>(input_meta_.size());
    if (p < 1 || m < 1) {
        throw std::invalid_argument("frf: need at least one output and one input channel");
    }
    if (values_.rows() != p * m || values_.cols() != frequencies_hz_.size()) {
        throw std::invalid_argument("frf: tensor shape does not match metadata");
    }
    if (frequencies_hz_.size() < 1) {
        throw std::invalid_argument("frf: empty frequency grid");
    }
    for (Eigen::Index k = 0; k < frequencies_hz_.size(); ++k) {
        if (!std::isfinite(frequencies_hz_[k])) {
            throw std::invalid_argument("frf: non-finite frequency");
        }
        if (k > 0 && frequencies_hz_[k] <= frequencies_hz_[k - 1]) {
            throw std::invalid_argument("frf: frequencies must be strictly ascending");
        }
    }
    check_finite(values_);
    std::set<std::string> ids;
    for (const auto& meta : output_meta_) {
        if (!ids.insert(meta.id).second) {
            throw std::invalid_argument("frf: duplicate channel id '" + meta.id + "'");
        }
    }
    for (const auto& meta : input_meta_) {
        if (!ids.insert(meta.id).second) {
            throw std::invalid_argument("frf: duplicate channel id '" + meta.id + "'");
        }
    }
}

std::complex<double> FrfDataset::value(Eigen::Index out, Eigen::Index in,
                                       Eigen::Index bin) const {
    return values_(in * n_outputs() + out, bin);
}

Eigen::Map<const Eigen::MatrixXcd> FrfDataset::response_at(Eigen::Index bin) const {
    return {values_.col(bin).data(), n_outputs(), n_inputs()};
}

FrfDataset estimate_frf(const std::vector<TimeSeriesSet>& runs,
                        const FrfEstimationOptions& options) {
    if (runs.empty()) {
        throw std::invalid_argument("estimate_frf: no runs supplied");
    }

    const TimeSeriesSet& first = runs.front();
    const Eigen::Index n = first.n_samples();
    const double fs = first.sample_rate_hz();
    const auto output_rows = first.channels_of_kind(ChannelKind::displacement_output);
    auto accel_rows = first.channels_of_kind(ChannelKind::acceleration_output);
    if (!output_rows.empty() && !accel_rows.empty()) {
        throw std::invalid_argument("estimate_frf: mixed displacement and acceleration outputs");
    }
    const ResponseKind kind =
        output_rows.empty() ? ResponseKind::accelerance : ResponseKind::receptance;
    const auto& out_rows = output_rows.empty() ? accel_rows : output_rows;
    if (out_rows.empty()) {
        throw std::invalid_argument("estimate_frf: no output channels");
    }

    const Eigen::Index p = static_cast<Eigen::Index>(out_rows.size());
    const Eigen::Index m = static_cast<Eigen::Index>(runs.size());
    std::vector<ChannelMeta> output_meta;
    for (auto row : out_rows) output_meta.push_back(first.channels()[row]);

    std::vector<ChannelMeta> input_meta;
    for (const auto& run : runs) {
        if (run.n_samples() != n || run.sample_rate_hz() != fs) {
            throw std::invalid_argument(
                "estimate_frf: runs must share sample rate and record length");
        }
        const auto force_rows = run.channels_of_kind(ChannelKind::force_input);
        if (force_rows.size() != 1) {
            throw std::invalid_argument("estimate_frf: each run needs exactly one force channel");
        }
        const auto rows = run.channels_of_kind(output_meta.front().kind);
        if (rows.size() != static_cast<std::size_t>(p)) {
            throw std::invalid_argument("estimate_frf: output channel count differs across runs");
        }
        for (Eigen::Index i = 0; i < p; ++i) {
            if (run.channels()[rows[i]].id != output_meta[i].id) {
                throw std::invalid_argument("estimate_frf: output channel order differs across runs");
            }
        }
        input_meta.push_back(run.channels()[force_rows.front()]);
    }

    const Eigen::Index n_bins = n / 2;  // bins 1..floor(N/2); DC excluded
    if (n_bins < 1) {
        throw std::invalid_argument("estimate_frf: record too short");
    }
    Eigen::VectorXd frequencies(n_bins);
    for (Eigen::Index k = 0; k < n_bins; ++k) {
        frequencies[k] = static_cast<double>(k + 1) * fs / static_cast<double>(n);
    }

    Eigen::MatrixXcd values(p * m, n_bins);
    for (Eigen::Index j = 0; j < m; ++j) {
        const TimeSeriesSet& run = runs[j];
        const auto force_row = run.channels_of_kind(ChannelKind::force_input).front();
        const Eigen::VectorXcd in_spec =
            spectrum(run.samples().row(force_row).transpose(), options.hann_window);

        const double peak = in_spec.segment(1, n_bins).cwiseAbs().maxCoeff();
        if (peak == 0.0) {
            throw std::runtime_error("estimate_frf: input spectrum of '" +
                                     input_meta[j].id + "' is identically zero");
        }
        const double floor = options.spectrum_floor_rel * peak;
        for (Eigen::Index k = 0; k < n_bins; ++k) {
            if (std::abs(in_spec[k + 1]) < floor) {
                std::ostringstream msg;
                msg << "estimate_frf: ill-conditioned division for input '"
                    << input_meta[j].id << "' at bin " << (k + 1) << " ("
                    << frequencies[k] << " Hz): input spectrum magnitude "
                    << std::abs(in_spec[k + 1]) << " below floor " << floor;
                throw std::runtime_error(msg.str());
            }
        }

        const auto rows = run.channels_of_kind(output_meta.front().kind);
        for (Eigen::Index i = 0; i < p; ++i) {
            const Eigen::VectorXcd out_spec =
                spectrum(run.samples().row(rows[i]).transpose(), options.hann_window);
            for (Eigen::Index k = 0; k < n_bins; ++k) {
                values(j * p + i, k) = out_spec[k + 1] / in_spec[k + 1];
            }
        }
    }

    return {std::move(frequencies), std::move(values), std::move(output_meta),
            std::move(input_meta), kind};
}

FrfDataset select_band(const FrfDataset& frf, double f_lo_hz, double f_hi_hz) {
    if (!(f_lo_hz < f_hi_hz)) {
        throw std::invalid_argument("select_band: f_lo must be below f_hi");
    }
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < frf.n_bins(); ++k) {
        const double f = frf.frequencies_hz()[k];
        if (f >= f_lo_hz && f <= f_hi_hz) keep.push_back(k);
    }
    if (keep.empty()) {
        std::ostringstream msg;
        msg << "select_band: empty band [" << f_lo_hz << ", " << f_hi_hz
            << "] Hz for grid spanning [" << frf.frequencies_hz()[0] << ", "
            << frf.frequencies_hz()[frf.n_bins() - 1] << "] Hz";
        throw std::runtime_error(msg.str());
    }

    Eigen::VectorXd frequencies(static_cast<Eigen::Index>(keep.size()));
    Eigen::MatrixXcd values(frf.values().rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        frequencies[static_cast<Eigen::Index>(i)] = frf.frequencies_hz()[keep[i]];
        values.col(static_cast<Eigen::Index>(i)) = frf.values().col(keep[i]);
    }
    return {std::move(frequencies), std::move(values), frf.output_meta(),
            frf.input_meta(), frf.response_kind()};
}

FrfDataset decimate_bins(const FrfDataset& frf, Eigen::Index max_bins) {
    if (max_bins < 2) {
        throw std::invalid_argument("decimate_bins: need at least two bins");
    }
    const Eigen::Index n = frf.n_bins();
    if (n <= max_bins) return frf;

    Eigen::VectorXd frequencies(max_bins);
    Eigen::MatrixXcd values(frf.values().rows(), max_bins);
    for (Eigen::Index i = 0; i < max_bins; ++i) {
        const Eigen::Index k = static_cast<Eigen::Index>(
            std::llround(static_cast<double>(i) * static_cast<double>(n - 1) /
                         static_cast<double>(max_bins - 1)));
        frequencies[i] = frf.frequencies_hz()[k];
        values.col(i) = frf.values().col(k);
    }
    return {std::move(frequencies), std::move(values), frf.output_meta(),
            frf.input_meta(), frf.response_kind()};
}

FrfDataset synthesize_frf(const StateSpaceRealization& realization,
                          const Eigen::VectorXd& frequencies_hz, ResponseKind kind) {
    validate(realization);
    const Eigen::Index p = realization.n_outputs();
    const Eigen::Index m = realization.n_inputs();
    const Eigen::Index n = frequencies_hz.size();
    if (n < 1) {
        throw std::invalid_argument("synthesize_frf: empty frequency list");
    }

    const Eigen::MatrixXcd E = realization.E.cast<std::complex<double>>();
    const Eigen::MatrixXcd A = realization.A.cast<std::complex<double>>();
    const Eigen::MatrixXcd B = realization.B.cast<std::complex<double>>();

    Eigen::MatrixXcd values(p * m, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const std::complex<double> s(0.0, 2.0 * std::numbers::pi * frequencies_hz[k]);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(s * E - A);
        const Eigen::VectorXcd u_diag = lu.matrixLU().diagonal();
        const double u_max = u_diag.cwiseAbs().maxCoeff();
        if (u_max == 0.0 || u_diag.cwiseAbs().minCoeff() < 1e-14 * u_max) {
            std::ostringstream msg;
            msg << "synthesize_frf: pencil singular at " << frequencies_hz[k] << " Hz";
            throw std::runtime_error(msg.str());
        }
        const Eigen::MatrixXcd X = lu.solve(B);
        Eigen::MatrixXcd H = realization.C * X;
        values.col(k) = Eigen::Map<const Eigen::VectorXcd>(H.data(), p * m);
    }

    std::vector<ChannelMeta> output_meta, input_meta;
    for (Eigen::Index i = 0; i < p; ++i) {
        output_meta.push_back({"out" + std::to_string(i + 1),
                               ChannelKind::displacement_output, "", Direction::other, ""});
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        input_meta.push_back({"in" + std::to_string(j + 1), ChannelKind::force_input,
                              "", Direction::other, ""});
    }
    return {frequencies_hz, std::move(values), std::move(output_meta),
            std::move(input_meta), kind};
}

}  // namespace modalshm
