#include "modalshm/time_series.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

namespace modalshm {

TimeSeriesSet::TimeSeriesSet(double sample_rate_hz, Eigen::MatrixXd samples,
                             std::vector<ChannelMeta> channels)
    : sample_rate_hz_(sample_rate_hz),
      samples_(std::move(samples)),
      channels_(std::move(channels)) {
    if (!std::isfinite(sample_rate_hz_) || sample_rate_hz_ <= 0.0) {
        throw std::invalid_argument("time series: sample rate must be finite and positive");
    }
    if (samples_.rows() != static_cast<Eigen::Index>(channels_.size())) {
        throw std::invalid_argument("time series: one sample row per channel required");
    }
    if (samples_.rows() < 1 || samples_.cols() < 2) {
        throw std::invalid_argument("time series: need at least one channel and two samples");
    }
    std::set<std::string> ids;
    for (const auto& channel : channels_) {
        if (!ids.insert(channel.id).second) {
            throw std::invalid_argument("time series: duplicate channel id '" + channel.id + "'");
        }
    }
}

double TimeSeriesSet::duration_s() const {
    return static_cast<double>(n_samples()) / sample_rate_hz_;
}

Eigen::Index TimeSeriesSet::channel_index(const std::string& id) const {
    for (std::size_t i = 0; i < channels_.size(); ++i) {
        if (channels_[i].id == id) return static_cast<Eigen::Index>(i);
    }
    throw std::invalid_argument("time series: no channel with id '" + id + "'");
}

std::vector<Eigen::Index> TimeSeriesSet::channels_of_kind(ChannelKind kind) const {
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < channels_.size(); ++i) {
        if (channels_[i].kind == kind) out.push_back(static_cast<Eigen::Index>(i));
    }
    return out;
}

}  // namespace modalshm
