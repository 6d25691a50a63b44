#include "adder/codec.hpp"

#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "adder/errors.hpp"

namespace adder {

namespace {

void put_u16(std::uint8_t* p, std::uint16_t v, bool le) {
    if (le) {
        p[0] = static_cast<std::uint8_t>(v);
        p[1] = static_cast<std::uint8_t>(v >> 8);
    } else {
        p[0] = static_cast<std::uint8_t>(v >> 8);
        p[1] = static_cast<std::uint8_t>(v);
    }
}

void put_u32(std::uint8_t* p, std::uint32_t v, bool le) {
    if (le) {
        p[0] = static_cast<std::uint8_t>(v);
        p[1] = static_cast<std::uint8_t>(v >> 8);
        p[2] = static_cast<std::uint8_t>(v >> 16);
        p[3] = static_cast<std::uint8_t>(v >> 24);
    } else {
        p[0] = static_cast<std::uint8_t>(v >> 24);
        p[1] = static_cast<std::uint8_t>(v >> 16);
        p[2] = static_cast<std::uint8_t>(v >> 8);
        p[3] = static_cast<std::uint8_t>(v);
    }
}

std::uint16_t get_u16(const std::uint8_t* p, bool le) {
    return le ? static_cast<std::uint16_t>(p[0] | (p[1] << 8))
              : static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint32_t get_u32(const std::uint8_t* p, bool le) {
    return le ? (std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
                 (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24))
              : ((std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
                 (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]));
}

}  // namespace

void encode_event(const AdderEvent& e, int channels, bool little_endian,
                  std::uint8_t* out) {
    put_u16(out, e.x, little_endian);
    put_u16(out + 2, e.y, little_endian);
    std::size_t i = 4;
    if (channels == 3) out[i++] = e.c;
    out[i++] = e.d;
    put_u32(out + i, e.delta_t, little_endian);
}

AdderEvent decode_event(std::span<const std::uint8_t> bytes, int channels,
                        bool little_endian) {
    const std::size_t need = event_size(channels);
    if (bytes.size() < need)
        throw FormatError("truncated event: need " + std::to_string(need) +
                          " bytes, have " + std::to_string(bytes.size()));
    AdderEvent e;
    e.x = get_u16(bytes.data(), little_endian);
    e.y = get_u16(bytes.data() + 2, little_endian);
    std::size_t i = 4;
    if (channels == 3) e.c = bytes[i++];
    e.d = bytes[i++];
    e.delta_t = get_u32(bytes.data() + i, little_endian);
    if (!valid_d(e.d))
        throw FormatError("reserved decimation value " + std::to_string(e.d));
    if (e.delta_t == 0) throw FormatError("event delta_t must be >= 1");
    return e;
}

std::size_t encode_header(const StreamHeader& h, std::uint8_t* out) {
    std::memcpy(out, kMagic, 4);
    out[4] = h.version;
    out[5] = h.little_endian ? 0 : 1;
    const bool le = h.little_endian;
    put_u16(out + 6, h.width, le);
    put_u16(out + 8, h.height, le);
    out[10] = h.channels;
    out[11] = static_cast<std::uint8_t>(h.source);
    put_u32(out + 12, h.tick_rate, le);
    put_u32(out + 16, h.ref_interval, le);
    put_u32(out + 20, h.max_interval, le);
    return kHeaderSize;
}

StreamHeader decode_header(std::span<const std::uint8_t> b) {
    if (b.size() < kHeaderSize) throw FormatError("truncated stream header");
    if (std::memcmp(b.data(), kMagic, 4) != 0) throw FormatError("bad magic, not an adder stream");
    StreamHeader h;
    h.version = b[4];
    if (h.version != kFormatVersion)
        throw FormatError("unsupported format version " + std::to_string(h.version));
    if (b[5] > 1) throw FormatError("bad endianness flag");
    h.little_endian = b[5] == 0;
    const bool le = h.little_endian;
    h.width = get_u16(b.data() + 6, le);
    h.height = get_u16(b.data() + 8, le);
    h.channels = b[10];
    if (!valid_source_kind(b[11])) throw FormatError("unknown source kind");
    h.source = static_cast<SourceKind>(b[11]);
    h.tick_rate = get_u32(b.data() + 12, le);
    h.ref_interval = get_u32(b.data() + 16, le);
    h.max_interval = get_u32(b.data() + 20, le);
    try {
        validate_header(h);
    } catch (const ConfigError& err) {
        throw FormatError(std::string("invalid stream header: ") + err.what());
    }
    return h;
}

StreamWriter::StreamWriter(std::ostream& out, const StreamHeader& header)
    : out_(out), header_(header) {
    validate_header(header_);
    std::uint8_t buf[kHeaderSize];
    encode_header(header_, buf);
    out_.write(reinterpret_cast<const char*>(buf), kHeaderSize);
    if (!out_) throw IoError("failed to write stream header");
}

void StreamWriter::write(const AdderEvent& e) {
    validate_event(e, header_);
    std::uint8_t buf[10];
    encode_event(e, header_.channels, header_.little_endian, buf);
    out_.write(reinterpret_cast<const char*>(buf), static_cast<std::streamsize>(event_size(header_.channels)));
    if (!out_) throw IoError("failed to write event");
    ++count_;
}

StreamReader::StreamReader(std::istream& in) : in_(in) {
    std::uint8_t buf[kHeaderSize];
    in_.read(reinterpret_cast<char*>(buf), kHeaderSize);
    if (in_.gcount() != static_cast<std::streamsize>(kHeaderSize))
        throw FormatError("truncated stream header");
    header_ = decode_header(buf);
}

std::optional<AdderEvent> StreamReader::next() {
    const std::size_t sz = event_size(header_.channels);
    std::uint8_t buf[10];
    in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(sz));
    const auto got = in_.gcount();
    if (got == 0) return std::nullopt;
    if (got != static_cast<std::streamsize>(sz))
        throw FormatError("truncated event at end of stream");
    AdderEvent e = decode_event({buf, sz}, header_.channels, header_.little_endian);
    validate_event(e, header_);
    return e;
}

}  // namespace adder
