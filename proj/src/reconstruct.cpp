#include "adder/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "adder/errors.hpp"

namespace adder {

namespace {

// Flush-chain boundary detection for frame-aligned sources. Within one chain
// the decimation strictly decreases and every event decodes to (nearly) the
// same rate, so either a non-decreasing D, a zero-intensity neighbor, or a
// clear rate discontinuity marks the first event of a new chain.
bool chain_start(const AdderEvent& e, int prev_d, double prev_rate) {
    if (e.d >= prev_d || prev_d == kZeroD || e.d == kZeroD) return true;
    const double rate = event_intensity(e);
    if (prev_rate <= 0.0) return rate > 0.0;
    const double ratio = rate / prev_rate;
    return ratio > 1.1 || ratio < 1.0 / 1.1;
}

}  // namespace

FrameReconstructor::FrameReconstructor(const StreamHeader& h)
    : header_(h), framed_(frame_aligned_source(h.source)) {
    validate_header(h);
    state_.resize(static_cast<std::size_t>(h.width) * h.height * h.channels);
}

void FrameReconstructor::ensure_frames(std::size_t upto) {
    while (frames_.size() < upto)
        frames_.emplace_back(header_.width, header_.height, header_.channels, 0.0);
}

void FrameReconstructor::feed(const AdderEvent& e) {
    validate_event(e, header_);
    const std::size_t idx =
        (static_cast<std::size_t>(e.y) * header_.width + e.x) * header_.channels + e.c;
    PixelState& st = state_[idx];

    const std::uint64_t ref = header_.ref_interval;
    if (framed_ && st.prev_d >= 0 && chain_start(e, st.prev_d, st.prev_rate)) {
        // New flush chain: re-anchor to the frame grid.
        st.t = (st.t + ref - 1) / ref * ref;
    }

    const double value =
        e.d == kZeroD ? 0.0
                      : std::ldexp(1.0, e.d) * static_cast<double>(ref) / e.delta_t;

    const std::size_t first = static_cast<std::size_t>(st.t / ref);
    const std::size_t last =
        static_cast<std::size_t>((st.t + e.delta_t + ref - 1) / ref);  // exclusive
    ensure_frames(last);
    for (std::size_t f = first; f < last; ++f)
        frames_[f].data[idx] = value;

    st.t += e.delta_t;
    st.prev_d = e.d;
    st.prev_rate = event_intensity(e);
    duration_ = std::max(duration_, st.t);
}

std::vector<Image8> FrameReconstructor::finish(std::size_t frame_count) {
    if (framed_) {
        const std::uint64_t ref = header_.ref_interval;
        std::uint64_t rounded = 0;
        for (const auto& st : state_)
            rounded = std::max(rounded, (st.t + ref - 1) / ref * ref);
        duration_ = std::max(duration_, rounded);
    }
    if (frame_count == 0) frame_count = frames_.size();
    std::vector<Image8> out;
    out.reserve(frame_count);
    for (std::size_t f = 0; f < frame_count; ++f) {
        if (f < frames_.size()) {
            out.push_back(clamp_to_u8(frames_[f]));
        } else {
            // hold the last known plane
            out.push_back(out.empty() ? Image8(header_.width, header_.height, header_.channels)
                                      : out.back());
        }
    }
    return out;
}

std::vector<Image8> reconstruct_frames(const StreamHeader& h,
                                       const std::vector<AdderEvent>& events,
                                       std::size_t frame_count) {
    FrameReconstructor rec(h);
    for (const auto& e : events) rec.feed(e);
    return rec.finish(frame_count);
}

std::vector<DvsEvent> recover_dvs(const StreamHeader& h,
                                  const std::vector<AdderEvent>& events,
                                  double theta) {
    if (theta <= 0) throw ConfigError("theta must be positive");
    validate_header(h);

    struct PixelState {
        std::uint64_t t = 0;
        int prev_d = -1;
        double prev_rate = 0.0;
        bool anchored = false;
        double log_ref = 0.0;
    };
    std::vector<PixelState> state(static_cast<std::size_t>(h.width) * h.height);

    const bool framed = frame_aligned_source(h.source);
    const std::uint64_t ref = h.ref_interval;
    // Smallest decodable nonzero rate stands in for true zero in log space.
    const double floor_rate = 1.0 / static_cast<double>(h.max_interval);

    std::vector<DvsEvent> out;
    for (const auto& e : events) {
        validate_event(e, h);
        if (e.c != 0) continue;  // color streams: track channel 0
        PixelState& st = state[static_cast<std::size_t>(e.y) * h.width + e.x];
        if (framed && st.prev_d >= 0 && chain_start(e, st.prev_d, st.prev_rate))
            st.t = (st.t + ref - 1) / ref * ref;

        const double rate = std::max(event_intensity(e), floor_rate);
        const double lambda = std::log(rate);
        if (!st.anchored) {
            st.anchored = true;
            st.log_ref = lambda;
        } else {
            const double diff = lambda - st.log_ref;
            const auto steps = static_cast<std::int64_t>(std::floor(std::abs(diff) / theta + 1e-9));
            if (steps > 0) {
                const std::int8_t pol = diff > 0 ? 1 : -1;
                for (std::int64_t k = 0; k < steps; ++k)
                    out.push_back(DvsEvent{st.t, e.x, e.y, pol});
                st.log_ref += pol * steps * theta;
            }
        }
        st.t += e.delta_t;
        st.prev_d = e.d;
        st.prev_rate = event_intensity(e);
    }
    return out;
}

PrecisionReport measure_precision(const std::vector<AdderEvent>& events) {
    std::set<double> levels;
    for (const auto& e : events) {
        const double v = event_intensity(e);
        if (v > 0) levels.insert(v);
    }
    PrecisionReport r;
    r.distinct_levels = levels.size();
    if (levels.size() < 2) {
        r.min_relative_step = std::numeric_limits<double>::infinity();
        r.bits = 0.0;
        return r;
    }
    double min_step = std::numeric_limits<double>::infinity();
    double prev = 0.0;
    bool have_prev = false;
    for (double v : levels) {
        if (have_prev) min_step = std::min(min_step, (v - prev) / prev);
        prev = v;
        have_prev = true;
    }
    r.min_relative_step = min_step;
    r.bits = std::log2(1.0 / min_step);
    return r;
}

}  // namespace adder
