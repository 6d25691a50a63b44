#pragma once

#include <cstdint>
#include <vector>

namespace adder {

// Pending event on the connection from a node to its child: the intensity the
// node integrated before the child was created.
struct PixelEventOut {
    std::uint8_t d = 0;
    std::uint32_t delta_t = 0;

    bool operator==(const PixelEventOut&) const = default;
};

// One node of a pixel's integration chain. accum and elapsed are measured from
// the moment the node was created (its window start) and stay floating point
// to preserve precision across partial integrations. Packed to 24 bytes;
// planes hold millions of these.
struct PixelNode {
    static constexpr std::uint8_t kNoEvent = 255;

    std::uint8_t d = 0;
    // Set once growing d again could not saturate within the remaining
    // dt_max budget; the node keeps absorbing but stops replacing its event.
    bool capped = false;
    std::uint8_t out_d = kNoEvent;
    std::uint32_t out_dt = 0;
    double accum = 0.0;
    double elapsed = 0.0;

    bool has_out() const { return out_d != kNoEvent; }
    PixelEventOut out() const { return {out_d, out_dt}; }
};

// Decimation for a fresh node facing the given intensity: the largest D whose
// threshold 2^D does not exceed it. Sub-unit intensities get D = 0.
std::uint8_t spawn_d(double intensity);

// Per-pixel integration engine. Head-first chain of nodes; the head has
// absorbed every input since the last flush, each child a suffix of it.
class PixelList {
  public:
    PixelList() = default;
    explicit PixelList(double intensity) { reset(intensity); }

    // Fresh single-node list sized for the given incoming intensity; the
    // intensity also becomes the contrast baseline.
    void reset(double intensity);

    // Absorbs `intensity` units spread uniformly over `span` ticks. Saturating
    // nodes replace their outgoing event, drop their descendants, raise D and
    // hand the remainder to a freshly spawned child. dt_max only gates D
    // growth here; span splitting at the dt_max boundary is the caller's job
    // (see integrate_clamped).
    void integrate(double intensity, double span, double dt_max);

    // Contrast test: strict |incoming - baseline| > m.
    bool should_flush(double incoming, double m) const;

    // Dequeues the pending connection events, head-most first, and resets the
    // list around new_intensity. A list that never saturated emits a best-fit
    // event for its whole accumulation (or the D=254 zero event when the
    // accumulation is below one unit), so isolated intensities are not lost.
    std::vector<PixelEventOut> flush(double new_intensity);

    double baseline() const { return baseline_; }
    double window_elapsed() const { return window_elapsed_; }
    const std::vector<PixelNode>& nodes() const { return nodes_; }

  private:
    std::vector<PixelNode> nodes_;
    double baseline_ = 0.0;
    double window_elapsed_ = 0.0;  // ticks since the last flush
};

// Integrates intensity over span, flushing exactly at every dt_max boundary
// the span crosses. Flush output (including the boundary ones) is appended to
// out; returns the number of dt_max flushes performed. The baseline is kept
// at the incoming intensity across boundary flushes.
std::size_t integrate_clamped(PixelList& list, double intensity, double span,
                              double dt_max, std::vector<PixelEventOut>& out);

}  // namespace adder
