#pragma once

// Forward-synthesis oracle for EDI and DAVIS-mode tests: hard-edged vertical
// bars translating at constant speed. The two intensity levels are an exact
// multiple of theta apart in log space, so the synthesized DVS events land
// exactly on the crossings and the double integral can invert them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "adder/dvs_io.hpp"
#include "adder/edi.hpp"
#include "adder/image.hpp"

namespace synth {

struct BarScene {
    int width = 32;
    int height = 16;
    double theta = 0.15;
    int steps = 2;            // log contrast = steps * theta
    double lo = 80.0;
    double period = 16.0;     // bar period in pixels
    double speed = 0.001;     // pixels per tick (1 px per ms at 1 MHz)

    double hi() const { return lo * std::exp(steps * theta); }

    // pattern coordinate: hi where frac(u / period) < 0.5
    double intensity(int x, double t) const {
        const double u = x - speed * t;
        double f = std::fmod(u / period, 1.0);
        if (f < 0) f += 1.0;
        return f < 0.5 ? hi() : lo;
    }

    adder::ImageF sharp(double t) const {
        adder::ImageF img(width, height, 1);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) img.at(x, y) = intensity(x, t);
        return img;
    }

    // crossing times for one pixel inside (t0, t1]: u(t) passes a half-period
    // boundary; intensity drops at integer multiples of the period, rises at
    // the half multiples.
    std::vector<std::pair<double, int>> crossings(int x, double t0, double t1) const {
        std::vector<std::pair<double, int>> out;
        // u = x - speed * t crosses m * period/2 at t = (x - m*period/2)/speed
        const double m_lo = (x - speed * t1) / (period / 2.0);
        const double m_hi = (x - speed * t0) / (period / 2.0);
        for (std::int64_t m = static_cast<std::int64_t>(std::ceil(m_lo));
             m <= static_cast<std::int64_t>(std::floor(m_hi)); ++m) {
            const double t = (x - m * period / 2.0) / speed;
            if (t <= t0 || t > t1) continue;
            const bool falling = (m % 2 + 2) % 2 == 0;  // integer period multiple
            out.emplace_back(t, falling ? -1 : +1);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<adder::DvsEvent> events(std::uint64_t t0, std::uint64_t t1) const {
        std::vector<adder::DvsEvent> out;
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                for (const auto& [t, dir] : crossings(x, static_cast<double>(t0),
                                                      static_cast<double>(t1)))
                    for (int k = 0; k < steps; ++k)
                        out.push_back({static_cast<std::uint64_t>(std::llround(t)),
                                       static_cast<std::uint16_t>(x),
                                       static_cast<std::uint16_t>(y),
                                       static_cast<std::int8_t>(dir)});
        std::sort(out.begin(), out.end(),
                  [](const adder::DvsEvent& a, const adder::DvsEvent& b) { return a.t < b.t; });
        return out;
    }

    // exact temporal mean over the exposure: piecewise-constant segments
    // split at the crossing times
    adder::Image8 blurry(std::uint64_t s, std::uint64_t e) const {
        adder::ImageF img(width, height, 1);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                auto cr = crossings(x, static_cast<double>(s), static_cast<double>(e));
                double sum = 0;
                double prev = static_cast<double>(s);
                double level = intensity(x, s + 1e-9);
                for (const auto& [t, dir] : cr) {
                    sum += (t - prev) * level;
                    level = dir > 0 ? hi() : lo;
                    prev = t;
                }
                sum += (static_cast<double>(e) - prev) * level;
                img.at(x, y) = sum / static_cast<double>(e - s);
            }
        }
        return adder::clamp_to_u8(img);
    }

    adder::ApsFrame aps(std::uint64_t s, std::uint64_t e) const {
        return adder::ApsFrame{blurry(s, e), s, e};
    }
};

}  // namespace synth
