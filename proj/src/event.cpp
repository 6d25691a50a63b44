#include "adder/event.hpp"

#include <string>

#include "adder/errors.hpp"

namespace adder {

void validate_header(const StreamHeader& h) {
    if (h.width == 0 || h.height == 0)
        throw ConfigError("stream plane must be non-empty");
    if (h.channels != 1 && h.channels != 3)
        throw ConfigError("channels must be 1 or 3, got " + std::to_string(h.channels));
    if (h.ref_interval < 1)
        throw ConfigError("ref_interval must be >= 1");
    if (h.max_interval < h.ref_interval)
        throw ConfigError("max_interval must be >= ref_interval");
    if (h.tick_rate < h.ref_interval)
        throw ConfigError("tick_rate must be >= ref_interval");
}

void validate_event(const AdderEvent& e, const StreamHeader& h) {
    if (!valid_d(e.d))
        throw FormatError("reserved decimation value " + std::to_string(e.d));
    if (e.delta_t < 1)
        throw FormatError("event delta_t must be >= 1");
    if (e.delta_t > h.max_interval)
        throw FormatError("event delta_t " + std::to_string(e.delta_t) +
                          " exceeds stream max_interval " + std::to_string(h.max_interval));
    if (e.x >= h.width || e.y >= h.height)
        throw FormatError("event coordinates out of plane");
    if (e.c >= h.channels)
        throw FormatError("event channel out of range");
}

}  // namespace adder
