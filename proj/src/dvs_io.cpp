#include "adder/dvs_io.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "adder/errors.hpp"

namespace adder {

namespace {
constexpr std::size_t kRecordSize = 13;
}

std::vector<DvsEvent> read_dvs_events(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<DvsEvent> events;
    std::array<std::uint8_t, kRecordSize> rec;
    while (in.read(reinterpret_cast<char*>(rec.data()), kRecordSize)) {
        DvsEvent e;
        e.t = 0;
        for (int i = 7; i >= 0; --i) e.t = (e.t << 8) | rec[static_cast<std::size_t>(i)];
        e.x = static_cast<std::uint16_t>(rec[8] | (rec[9] << 8));
        e.y = static_cast<std::uint16_t>(rec[10] | (rec[11] << 8));
        e.p = static_cast<std::int8_t>(rec[12]);
        if (e.p != 1 && e.p != -1)
            throw FormatError(path.string() + ": DVS polarity must be +1 or -1");
        events.push_back(e);
    }
    if (in.gcount() != 0)
        throw FormatError(path.string() + ": truncated DVS record at end of file");
    return events;
}

void write_dvs_events(const std::filesystem::path& path,
                      const std::vector<DvsEvent>& events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create " + path.string());
    std::array<std::uint8_t, kRecordSize> rec;
    for (const auto& e : events) {
        for (int i = 0; i < 8; ++i) rec[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(e.t >> (8 * i));
        rec[8] = static_cast<std::uint8_t>(e.x);
        rec[9] = static_cast<std::uint8_t>(e.x >> 8);
        rec[10] = static_cast<std::uint8_t>(e.y);
        rec[11] = static_cast<std::uint8_t>(e.y >> 8);
        rec[12] = static_cast<std::uint8_t>(e.p);
        out.write(reinterpret_cast<const char*>(rec.data()), kRecordSize);
    }
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<ApsEntry> read_aps_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    const auto base = path.parent_path();
    std::vector<ApsEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag, file;
        ApsEntry e;
        if (!(ss >> tag >> file >> e.exposure_start >> e.exposure_end) || tag != "frame")
            throw FormatError(path.string() + ":" + std::to_string(lineno) +
                              ": expected 'frame <path> <start> <end>'");
        if (e.exposure_end <= e.exposure_start)
            throw FormatError(path.string() + ":" + std::to_string(lineno) +
                              ": exposure_end must be > exposure_start");
        std::filesystem::path p(file);
        e.image = p.is_absolute() ? p : base / p;
        entries.push_back(std::move(e));
    }
    return entries;
}

void write_aps_manifest(const std::filesystem::path& path,
                        const std::vector<ApsEntry>& entries) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot create " + path.string());
    for (const auto& e : entries)
        out << "frame " << e.image.filename().string() << " " << e.exposure_start
            << " " << e.exposure_end << "\n";
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace adder
