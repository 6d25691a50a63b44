#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "adder/dvs_io.hpp"
#include "adder/image.hpp"

namespace adder {

// APS capture: 8-bit frame plus its exposure span in ticks.
struct ApsFrame {
    Image8 image;
    std::uint64_t exposure_start = 0;
    std::uint64_t exposure_end = 0;
};

// DVS events bucketed per pixel and sorted by time, the layout the double
// integral wants for per-pixel scans.
class EventGrid {
  public:
    EventGrid(int width, int height);
    EventGrid(int width, int height, const std::vector<DvsEvent>& events);

    // Incremental ingest for packet-based feeds; call sort_pixels() once all
    // packets are in.
    void add(const DvsEvent& e);
    void sort_pixels();

    int width() const { return width_; }
    int height() const { return height_; }
    const std::vector<std::pair<std::uint64_t, std::int8_t>>& pixel(int x, int y) const {
        return per_pixel_[static_cast<std::size_t>(y) * width_ + x];
    }

    // Signed polarity count over (t0, t1].
    int event_sum(int x, int y, std::uint64_t t0, std::uint64_t t1) const;

  private:
    int width_;
    int height_;
    std::vector<std::vector<std::pair<std::uint64_t, std::int8_t>>> per_pixel_;
};

// Sharp latent image at the exposure start of a blurry frame:
//   L = B * T / integral over the exposure of exp(theta * E(start, t)) dt,
// integrated exactly across the piecewise-constant segments between events.
ImageF deblur(const ApsFrame& frame, const EventGrid& events, double theta);

// Sum of squared forward-difference gradient magnitudes.
double sharpness(const ImageF& img);

// Deterministic theta search: coarse grid scan seeding a golden-section
// refinement, maximizing deblurred sharpness. An empty event set scores
// every theta identically and returns the range midpoint.
double optimize_theta(const ApsFrame& frame, const EventGrid& events,
                      double lo = 0.05, double hi = 0.6, double tol = 1e-3);

struct EdiFrame {
    std::uint64_t t = 0;
    ImageF image;           // unclamped latent intensities
    bool extrapolated = false;  // propagated past its anchor with no successor
};

// Latent frames every output_interval ticks, each propagated forward from the
// most recent deblurred anchor by exp(theta * dE).
std::vector<EdiFrame> reconstruct_sequence(const std::vector<ApsFrame>& frames,
                                           const EventGrid& events, double theta,
                                           std::uint64_t output_interval);

}  // namespace adder
