#include "modalshm/channel.hpp"

#include <stdexcept>

namespace modalshm {

const char* to_string(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::force_input: return "force-input";
        case ChannelKind::displacement_output: return "displacement-output";
        case ChannelKind::acceleration_output: return "acceleration-output";
    }
    throw std::logic_error("unknown channel kind");
}

const char* to_string(Direction direction) {
    switch (direction) {
        case Direction::y: return "y";
        case Direction::z: return "z";
        case Direction::other: return "other";
    }
    throw std::logic_error("unknown direction");
}

ChannelKind channel_kind_from_string(const std::string& text) {
    if (text == "force-input") return ChannelKind::force_input;
    if (text == "displacement-output") return ChannelKind::displacement_output;
    if (text == "acceleration-output") return ChannelKind::acceleration_output;
    throw std::invalid_argument("unknown channel kind: '" + text + "'");
}

Direction direction_from_string(const std::string& text) {
    if (text == "y") return Direction::y;
    if (text == "z") return Direction::z;
    if (text == "other") return Direction::other;
    throw std::invalid_argument("unknown direction: '" + text + "'");
}

}  // namespace modalshm
