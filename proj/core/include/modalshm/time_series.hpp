#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "modalshm/channel.hpp"

namespace modalshm {

/// Multi-channel real-valued time record sampled at a fixed rate.
/// Row i of samples() holds the channel described by channels()[i].
class TimeSeriesSet {
public:
    TimeSeriesSet(double sample_rate_hz, Eigen::MatrixXd samples,
                  std::vector<ChannelMeta> channels);

    double sample_rate_hz() const { return sample_rate_hz_; }
    Eigen::Index n_channels() const { return samples_.rows(); }
    Eigen::Index n_samples() const { return samples_.cols(); }
    double duration_s() const;

    const Eigen::MatrixXd& samples() const { return samples_; }
    const std::vector<ChannelMeta>& channels() const { return channels_; }

    /// Throws if the id is not present.
    Eigen::Index channel_index(const std::string& id) const;
    std::vector<Eigen::Index> channels_of_kind(ChannelKind kind) const;

private:
    double sample_rate_hz_;
    Eigen::MatrixXd samples_;
    std::vector<ChannelMeta> channels_;
};

}  // namespace modalshm
