#pragma once

#include <cstdint>
#include <vector>

#include "adder/dvs_io.hpp"
#include "adder/edi.hpp"
#include "adder/event.hpp"
#include "adder/framed.hpp"
#include "adder/image.hpp"
#include "adder/pixel.hpp"

namespace adder {

enum class EventMode {
    DeblurredSequence,  // (i)   EDI frame sequence -> framed transcode
    FramePlusEvents,    // (ii)  deblurred APS frames + inter-exposure events
    DvsOnly,            // (iii) DVS events alone over a mid-gray latent
};

struct EventModeConfig {
    EventMode mode = EventMode::FramePlusEvents;
    int width = 0;
    int height = 0;
    std::uint32_t tick_rate = 1'000'000;     // dt_s (microsecond ticks)
    std::uint32_t ref_interval = 2'000;      // dt_s / 500
    std::uint32_t max_interval = 4'000'000;  // dt_s * 4
    double m = 0.0;
    double theta = 0.15;
    bool optimize_theta = false;             // mode (ii): re-fit theta per frame
    std::uint64_t reset_interval = 500'000;  // mode (iii) latent reset cadence

    void validate() const;
};

// Mid-level latent intensity a mode (iii) reset installs; unchanged pixels
// then decode to mid-gray.
inline constexpr double kMidLatent = 0.5;

// Drives the per-pixel integration chains with intensities derived from DVS
// events and deblurred frames (modes ii and iii).
class EventTranscoder {
  public:
    explicit EventTranscoder(const EventModeConfig& cfg);

    // Mode (ii): absorb one deblurred frame across its exposure span.
    std::vector<AdderEvent> ingest_deblurred_frame(const ImageF& latent,
                                                   std::uint64_t exposure_start,
                                                   std::uint64_t exposure_end);

    // Modes (ii)/(iii): one DVS polarity event. Events must be time-ordered
    // per pixel; an out-of-order event raises FormatError.
    std::vector<AdderEvent> integrate_dvs_event(const DvsEvent& e);

    // Advances every pixel to end_t and flushes the plane.
    std::vector<AdderEvent> finalize(std::uint64_t end_t);

    StreamHeader header() const;

    // Mode (ii) pipelines refresh theta as new frames are optimized; the most
    // recent value applies to the inter-frame events that follow.
    void set_theta(double theta);

    double latent_linear(int x, int y) const { return px(x, y).lin; }
    double latent_log(int x, int y) const { return px(x, y).log; }
    const PixelList& pixel_list(int x, int y) const { return px(x, y).list; }

  private:
    struct Pixel {
        PixelList list;
        double lin = kMidLatent;
        double log = 0.0;  // ln(1 + lin), set in the constructor
        std::uint64_t last_t = 0;
        bool seen = false;
    };

    Pixel& px(int x, int y) { return plane_[static_cast<std::size_t>(y) * cfg_.width + x]; }
    const Pixel& px(int x, int y) const {
        return plane_[static_cast<std::size_t>(y) * cfg_.width + x];
    }

    void touch(Pixel& p, std::uint64_t t);
    // Integrates the pixel's current latent forward to t, honoring dt_max and
    // (mode iii) latent reset boundaries.
    void advance(Pixel& p, std::uint64_t t, std::uint16_t x, std::uint16_t y,
                 std::vector<AdderEvent>& out);

    EventModeConfig cfg_;
    std::vector<Pixel> plane_;
    std::uint64_t epoch_ = 0;
    bool epoch_set_ = false;
};

// Whole-recording pipelines. Mode (i) reconstructs a high-rate EDI sequence
// and feeds the framed transcoder; modes (ii)/(iii) run the EventTranscoder.
struct DavisTranscodeResult {
    StreamHeader header;
    std::vector<AdderEvent> events;
    double theta_used = 0.0;
};

DavisTranscodeResult transcode_davis(const EventModeConfig& cfg,
                                     const std::vector<ApsFrame>& frames,
                                     const std::vector<DvsEvent>& dvs);

}  // namespace adder
