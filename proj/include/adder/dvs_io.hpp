#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace adder {

// Polarity change event from a DVS/DAVIS sensor. Timestamps are ticks
// (microseconds at the usual tick_rate of 10^6).
struct DvsEvent {
    std::uint64_t t = 0;
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    std::int8_t p = 1;  // +1 or -1

    bool operator==(const DvsEvent&) const = default;
};

// Interchange format: little-endian records (t:u64, x:u16, y:u16, p:i8),
// 13 bytes each, timestamps non-decreasing per pixel.
std::vector<DvsEvent> read_dvs_events(const std::filesystem::path& path);
void write_dvs_events(const std::filesystem::path& path,
                      const std::vector<DvsEvent>& events);

// APS frame reference inside a recording manifest.
struct ApsEntry {
    std::filesystem::path image;
    std::uint64_t exposure_start = 0;
    std::uint64_t exposure_end = 0;
};

// Text manifest, one entry per line:
//   frame <pixmap-path> <exposure_start> <exposure_end>
// Relative paths resolve against the manifest's directory.
std::vector<ApsEntry> read_aps_manifest(const std::filesystem::path& path);
void write_aps_manifest(const std::filesystem::path& path,
                        const std::vector<ApsEntry>& entries);

}  // namespace adder
