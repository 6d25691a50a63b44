#pragma once

#include <cmath>
#include <cstdint>

namespace adder {

// Decimation values: natural range [0,127]; 254 is the reserved zero-intensity
// symbol. Everything else (128..253, 255) is invalid on the wire.
inline constexpr std::uint8_t kZeroD = 254;
inline constexpr std::uint8_t kMaxNaturalD = 127;

inline bool valid_d(std::uint8_t d) { return d <= kMaxNaturalD || d == kZeroD; }

// One asynchronous intensity sample <x, y, c, D, delta_t>.
// The channel index c is carried only when the owning stream has 3 channels.
struct AdderEvent {
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    std::uint8_t c = 0;
    std::uint8_t d = 0;
    std::uint32_t delta_t = 1;

    bool operator==(const AdderEvent&) const = default;
};

// Intensity rate expressed by an event: 2^D / delta_t units per tick.
// D = 254 encodes zero intensity regardless of the time span.
inline double event_intensity(const AdderEvent& e) {
    if (e.d == kZeroD) return 0.0;
    return std::ldexp(1.0, e.d) / static_cast<double>(e.delta_t);
}

enum class SourceKind : std::uint8_t {
    FramedU8 = 0,
    DavisModeI = 1,
    DavisModeII = 2,
    DvsModeIII = 3,
};

inline bool valid_source_kind(std::uint8_t v) { return v <= 3; }

// Framed-source streams start every event on an input-frame boundary, so the
// decoder re-anchors its running timestamp to multiples of ref_interval.
inline bool frame_aligned_source(SourceKind k) {
    return k == SourceKind::FramedU8 || k == SourceKind::DavisModeI;
}

struct StreamHeader {
    std::uint8_t version = 1;
    bool little_endian = true;
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::uint8_t channels = 1;
    SourceKind source = SourceKind::FramedU8;
    std::uint32_t tick_rate = 0;     // dt_s: ticks per second
    std::uint32_t ref_interval = 0;  // dt_ref: ticks per reference integration
    std::uint32_t max_interval = 0;  // dt_max: longest span any event may carry

    bool operator==(const StreamHeader&) const = default;
};

// Header invariants: dt_max >= dt_ref >= 1, dt_s >= dt_ref, sane plane.
void validate_header(const StreamHeader& h);

// Event invariants relative to its stream header.
void validate_event(const AdderEvent& e, const StreamHeader& h);

}  // namespace adder
