#pragma once

#include <string>

namespace modalshm {

enum class ChannelKind { force_input, displacement_output, acceleration_output };

enum class Direction { y, z, other };

/// Identity and wiring of one measurement or excitation channel.
struct ChannelMeta {
    std::string id;
    ChannelKind kind = ChannelKind::displacement_output;
    std::string node_label;
    Direction direction = Direction::other;
    std::string sensitivity_note;
};

const char* to_string(ChannelKind kind);
const char* to_string(Direction direction);
ChannelKind channel_kind_from_string(const std::string& text);
Direction direction_from_string(const std::string& text);

}  // namespace modalshm
