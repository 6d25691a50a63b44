#include "adder/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "adder/errors.hpp"

namespace adder {

Image8 clamp_to_u8(const ImageF& f) {
    Image8 out(f.width, f.height, f.channels);
    for (std::size_t i = 0; i < f.data.size(); ++i) {
        const double v = std::lround(f.data[i]);
        out.data[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    return out;
}

ImageF to_float(const Image8& img) {
    ImageF out(img.width, img.height, img.channels);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = static_cast<double>(img.data[i]);
    return out;
}

namespace {

int read_pnm_token(std::istream& in) {
    // Skips whitespace and '#' comments, then parses one integer.
    int c = in.peek();
    while (c == '#' || std::isspace(c)) {
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            in.get();
        }
        c = in.peek();
    }
    int value = 0;
    if (!(in >> value)) throw FormatError("malformed pixmap header");
    return value;
}

}  // namespace

Image8 read_pixmap(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    int channels = 0;
    if (m0 == 'P' && m1 == '5') channels = 1;
    else if (m0 == 'P' && m1 == '6') channels = 3;
    else throw FormatError(path.string() + ": not a binary PGM/PPM file");

    const int width = read_pnm_token(in);
    const int height = read_pnm_token(in);
    const int maxval = read_pnm_token(in);
    if (width <= 0 || height <= 0) throw FormatError(path.string() + ": bad dimensions");
    if (maxval != 255) throw FormatError(path.string() + ": only maxval 255 is supported");
    in.get();  // single whitespace after the header

    Image8 img(width, height, channels);
    in.read(reinterpret_cast<char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.data.size()))
        throw FormatError(path.string() + ": truncated pixel data");
    return img;
}

void write_pixmap(const std::filesystem::path& path, const Image8& img) {
    if (img.channels != 1 && img.channels != 3)
        throw ConfigError("pixmap output requires 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create " + path.string());
    out << (img.channels == 1 ? "P5" : "P6") << "\n"
        << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::filesystem::path> list_pixmaps(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir))
        throw IoError(dir.string() + " is not a directory");
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension();
        if (ext == ".pgm" || ext == ".ppm") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace adder
