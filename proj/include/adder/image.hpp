#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace adder {

// Row-major, channel-interleaved 8-bit image (1 or 3 channels).
struct Image8 {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> data;

    Image8() = default;
    Image8(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {}

    std::uint8_t& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t samples() const { return data.size(); }

    bool operator==(const Image8&) const = default;
};

// Floating-point plane used for latent images; values may run past [0,255]
// until explicitly clamped.
struct ImageF {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> data;

    ImageF() = default;
    ImageF(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {}

    double& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

Image8 clamp_to_u8(const ImageF& f);
ImageF to_float(const Image8& img);

// Binary PGM (P5) / PPM (P6), maxval 255.
Image8 read_pixmap(const std::filesystem::path& path);
void write_pixmap(const std::filesystem::path& path, const Image8& img);

// All .pgm/.ppm files in a directory, lexicographically sorted.
std::vector<std::filesystem::path> list_pixmaps(const std::filesystem::path& dir);

}  // namespace adder
