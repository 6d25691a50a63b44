#pragma once

#include <cstdint>
#include <vector>

#include "adder/event.hpp"
#include "adder/image.hpp"
#include "adder/pixel.hpp"

namespace adder {

struct FramedConfig {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::uint32_t ref_interval = 255;         // ticks per input frame
    double fps = 30.0;
    std::uint32_t max_interval = 255 * 120;   // dt_max
    double m = 0.0;                           // contrast threshold, 8-bit units
    int workers = 1;                          // row-band parallelism

    // dt_s = dt_ref * F
    std::uint32_t tick_rate() const {
        return static_cast<std::uint32_t>(ref_interval * fps + 0.5);
    }

    // strict enforces the 8-bit representability bound I_max/dt_ref <= 1,
    // i.e. ref_interval >= 255. Sweeps relax it to chart the quality knee.
    void validate(bool strict = true) const;
};

// Converts 8-bit frames into an event stream, one intensity integration per
// pixel channel per frame, with M-threshold rate control and dt_max flushes.
class FramedTranscoder {
  public:
    explicit FramedTranscoder(const FramedConfig& cfg);

    // Events emitted while absorbing this frame. Cross-pixel order follows
    // row-band order; per-pixel order is the firing order.
    std::vector<AdderEvent> transcode_frame(const Image8& frame);

    // Flushes every pixel so the stream is complete.
    std::vector<AdderEvent> finalize();

    StreamHeader header() const;
    std::uint64_t frames_in() const { return frames_in_; }
    const FramedConfig& config() const { return cfg_; }

  private:
    void integrate_sample(std::size_t idx, double value, std::vector<AdderEvent>& out);

    FramedConfig cfg_;
    std::vector<PixelList> plane_;  // (y * width + x) * channels + c
    std::uint64_t frames_in_ = 0;
    bool finalized_ = false;
};

inline AdderEvent to_adder_event(const PixelEventOut& p, std::uint16_t x,
                                 std::uint16_t y, std::uint8_t c) {
    return AdderEvent{x, y, c, p.d, p.delta_t < 1 ? 1u : p.delta_t};
}

}  // namespace adder
