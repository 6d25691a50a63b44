#pragma once

#include <cstdint>
#include <vector>

#include "adder/dvs_io.hpp"
#include "adder/event.hpp"
#include "adder/image.hpp"

namespace adder {

// Streaming framed reconstruction: every event writes its normalized value
// 2^D * dt_ref / delta_t to all output frames its span covers
// (piecewise-constant hold), then advances the pixel's running timestamp.
//
// For frame-aligned sources the running timestamp re-anchors to the next
// multiple of dt_ref at each flush boundary. Boundaries are recovered from
// the stream itself: within one flush chain the decimation values strictly
// decrease and the decoded rates stay flat, so an event with non-decreasing
// D, a D=254 neighbor, or a clear rate discontinuity starts a new chain.
class FrameReconstructor {
  public:
    explicit FrameReconstructor(const StreamHeader& h);

    void feed(const AdderEvent& e);

    // Finishes bookkeeping and returns the frames, padded (holding the last
    // written values) or trimmed to frame_count when it is non-zero.
    std::vector<Image8> finish(std::size_t frame_count = 0);

    // Stream duration so far: max over pixels of the running timestamp.
    std::uint64_t duration_ticks() const { return duration_; }

  private:
    struct PixelState {
        std::uint64_t t = 0;
        int prev_d = -1;
        double prev_rate = 0.0;
    };

    void ensure_frames(std::size_t upto);

    StreamHeader header_;
    bool framed_;
    std::vector<PixelState> state_;
    std::vector<ImageF> frames_;
    std::uint64_t duration_ = 0;
};

std::vector<Image8> reconstruct_frames(const StreamHeader& h,
                                       const std::vector<AdderEvent>& events,
                                       std::size_t frame_count = 0);

// Recovers a DVS polarity stream: per pixel, a polarity event fires at an
// event boundary for every theta-sized step the decoded log intensity moved
// since the last recovered event. Color streams are tracked on channel 0.
std::vector<DvsEvent> recover_dvs(const StreamHeader& h,
                                  const std::vector<AdderEvent>& events,
                                  double theta);

struct PrecisionReport {
    std::size_t distinct_levels = 0;
    double min_relative_step = 0.0;  // infinity when fewer than 2 levels
    double bits = 0.0;               // log2(1 / min_relative_step)
};

// Effective intensity precision actually present in a stream.
PrecisionReport measure_precision(const std::vector<AdderEvent>& events);

}  // namespace adder
