#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>
#include <vector>

#include "modalshm/channel.hpp"
#include "modalshm/state_space.hpp"
#include "modalshm/time_series.hpp"

namespace modalshm {

enum class ResponseKind { receptance, accelerance };

const char* to_string(ResponseKind kind);
ResponseKind response_kind_from_string(const std::string& text);

/// Frequency response samples on a strictly ascending grid.
/// The tensor is outputs x inputs x bins; bin k is stored as the
/// column-major p x m block in column k of values().
class FrfDataset {
public:
    FrfDataset(Eigen::VectorXd frequencies_hz, Eigen::MatrixXcd values,
               std::vector<ChannelMeta> output_meta,
               std::vector<ChannelMeta> input_meta, ResponseKind kind);

    Eigen::Index n_outputs() const { return static_cast<Eigen::Index>(output_meta_.size()); }
    Eigen::Index n_inputs() const { return static_cast<Eigen::Index>(input_meta_.size()); }
    Eigen::Index n_bins() const { return frequencies_hz_.size(); }

    const Eigen::VectorXd& frequencies_hz() const { return frequencies_hz_; }
    /// Flat storage, (p*m) x bins.
    const Eigen::MatrixXcd& values() const { return values_; }
    std::complex<double> value(Eigen::Index out, Eigen::Index in, Eigen::Index bin) const;
    /// Zero-copy view of the p x m response matrix at one bin.
    Eigen::Map<const Eigen::MatrixXcd> response_at(Eigen::Index bin) const;

    const std::vector<ChannelMeta>& output_meta() const { return output_meta_; }
    const std::vector<ChannelMeta>& input_meta() const { return input_meta_; }
    ResponseKind response_kind() const { return kind_; }

private:
    Eigen::VectorXd frequencies_hz_;
    Eigen::MatrixXcd values_;
    std::vector<ChannelMeta> output_meta_;
    std::vector<ChannelMeta> input_meta_;
    ResponseKind kind_;
};

struct FrfEstimationOptions {
    /// Conditioning floor for the input spectrum, relative to its peak
    /// magnitude over the retained bins.
    double spectrum_floor_rel = 1e-12;
    /// Apply a Hann window to stimulus and response records before the FFT.
    /// Off by default; the plain ratio is exact for noise-free records.
    bool hann_window = false;
};

/// Spectral-division FRF estimate from one record per input channel.
/// Each run must hold exactly one force-input channel plus the same output
/// channels in the same order; run j fills input column j. The DC bin is
/// excluded: bins are k*fs/N for k = 1..floor(N/2).
FrfDataset estimate_frf(const std::vector<TimeSeriesSet>& runs,
                        const FrfEstimationOptions& options = {});

/// Keeps bins with f_lo <= f <= f_hi (inclusive); metadata preserved.
FrfDataset select_band(const FrfDataset& frf, double f_lo_hz, double f_hi_hz);

/// Evenly strided subset of at most max_bins bins, always keeping the first
/// and last bin. Identity when the dataset is already small enough.
FrfDataset decimate_bins(const FrfDataset& frf, Eigen::Index max_bins);

/// Evaluates C (sE - A)^-1 B at s = j 2 pi f for each requested frequency.
FrfDataset synthesize_frf(const StateSpaceRealization& realization,
                          const Eigen::VectorXd& frequencies_hz,
                          ResponseKind kind = ResponseKind::receptance);

}  // namespace modalshm
