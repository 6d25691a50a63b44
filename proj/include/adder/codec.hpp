#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>

#include "adder/event.hpp"

namespace adder {

inline constexpr char kMagic[4] = {'A', 'D', 'D', 'E'};
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 24;

// Packed event size: x:2 y:2 [c:1] d:1 delta_t:4.
inline constexpr std::size_t event_size(int channels) { return channels == 3 ? 10 : 9; }

// Packs one event into out (which must hold event_size(channels) bytes).
void encode_event(const AdderEvent& e, int channels, bool little_endian,
                  std::uint8_t* out);

// Inverse of encode_event. Throws FormatError on truncated input or
// reserved field values; never reads past bytes.size().
AdderEvent decode_event(std::span<const std::uint8_t> bytes, int channels,
                        bool little_endian);

std::size_t encode_header(const StreamHeader& h, std::uint8_t* out);  // kHeaderSize bytes
StreamHeader decode_header(std::span<const std::uint8_t> bytes);

// Streaming writer: header up front, then packed events. Owns no file handle;
// single-owner, not meant for concurrent use.
class StreamWriter {
  public:
    StreamWriter(std::ostream& out, const StreamHeader& header);

    void write(const AdderEvent& e);
    std::uint64_t event_count() const { return count_; }
    const StreamHeader& header() const { return header_; }

  private:
    std::ostream& out_;
    StreamHeader header_;
    std::uint64_t count_ = 0;
};

// Streaming reader; constant memory in the number of events.
class StreamReader {
  public:
    explicit StreamReader(std::istream& in);

    const StreamHeader& header() const { return header_; }
    // Next event, or nullopt at a clean end of stream.
    std::optional<AdderEvent> next();

  private:
    std::istream& in_;
    StreamHeader header_;
};

}  // namespace adder
