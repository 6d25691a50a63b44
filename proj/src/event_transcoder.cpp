#include "adder/event_transcoder.hpp"

#include <algorithm>
#include <cmath>

#include "adder/errors.hpp"

namespace adder {

namespace {
const double kMidLog = std::log(1.0 + kMidLatent);
}

void EventModeConfig::validate() const {
    if (width <= 0 || height <= 0) throw ConfigError("sensor plane must be non-empty");
    if (ref_interval < 1) throw ConfigError("ref_interval must be >= 1");
    if (max_interval < ref_interval)
        throw ConfigError("max_interval must be >= ref_interval");
    if (tick_rate < ref_interval) throw ConfigError("tick_rate must be >= ref_interval");
    if (m < 0) throw ConfigError("contrast threshold M must be >= 0");
    if (theta <= 0) throw ConfigError("theta must be positive");
    if (mode == EventMode::DvsOnly && reset_interval < 1)
        throw ConfigError("reset_interval must be >= 1");
}

EventTranscoder::EventTranscoder(const EventModeConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    plane_.resize(static_cast<std::size_t>(cfg_.width) * cfg_.height);
    for (auto& p : plane_) p.log = kMidLog;
}

StreamHeader EventTranscoder::header() const {
    StreamHeader h;
    h.width = static_cast<std::uint16_t>(cfg_.width);
    h.height = static_cast<std::uint16_t>(cfg_.height);
    h.channels = 1;
    h.source = cfg_.mode == EventMode::DvsOnly ? SourceKind::DvsModeIII
                                               : SourceKind::DavisModeII;
    h.tick_rate = cfg_.tick_rate;
    h.ref_interval = cfg_.ref_interval;
    h.max_interval = cfg_.max_interval;
    return h;
}

void EventTranscoder::set_theta(double theta) {
    if (theta <= 0) throw ConfigError("theta must be positive");
    cfg_.theta = theta;
}

void EventTranscoder::touch(Pixel& p, std::uint64_t t) {
    if (!epoch_set_) {
        epoch_ = t;
        epoch_set_ = true;
    }
    if (!p.seen) {
        p.seen = true;
        p.last_t = epoch_;
        p.list.reset(p.lin * 255.0);
    }
}

void EventTranscoder::advance(Pixel& p, std::uint64_t t, std::uint16_t x,
                              std::uint16_t y, std::vector<AdderEvent>& out) {
    while (p.last_t < t) {
        std::uint64_t stop = t;
        bool reset_here = false;
        if (cfg_.mode == EventMode::DvsOnly) {
            const std::uint64_t since = p.last_t - epoch_;
            const std::uint64_t next_reset =
                epoch_ + (since / cfg_.reset_interval + 1) * cfg_.reset_interval;
            if (next_reset <= t) {
                stop = next_reset;
                reset_here = true;
            }
        }
        // Feed at most one reference integration per call so the chain's
        // spawn thresholds stay at the per-dt_ref intensity scale.
        double span = static_cast<double>(stop - p.last_t);
        std::vector<PixelEventOut> raw;
        while (span > 0) {
            const double chunk = std::min(span, static_cast<double>(cfg_.ref_interval));
            const double units = p.lin * 255.0 * chunk / cfg_.ref_interval;
            integrate_clamped(p.list, units, chunk,
                              static_cast<double>(cfg_.max_interval), raw);
            span -= chunk;
        }
        for (const auto& r : raw) out.push_back(to_adder_event(r, x, y, 0));
        p.last_t = stop;
        if (reset_here) {
            p.lin = kMidLatent;
            p.log = kMidLog;
            const double normalized = p.lin * 255.0;
            if (p.list.should_flush(normalized, cfg_.m))
                for (const auto& r : p.list.flush(normalized))
                    out.push_back(to_adder_event(r, x, y, 0));
        }
    }
}

std::vector<AdderEvent> EventTranscoder::integrate_dvs_event(const DvsEvent& e) {
    if (e.x >= cfg_.width || e.y >= cfg_.height)
        throw FormatError("DVS event outside the sensor plane");
    if (e.p != 1 && e.p != -1) throw FormatError("DVS polarity must be +1 or -1");
    Pixel& p = px(e.x, e.y);
    touch(p, e.t);
    if (e.t < p.last_t)
        throw FormatError("out-of-order DVS event at t=" + std::to_string(e.t));

    std::vector<AdderEvent> out;
    // (1) repeat the previous intensity across the elapsed time
    advance(p, e.t, e.x, e.y, out);
    // (2) the event marks the instant the latent intensity changes
    double log_new = p.log + e.p * cfg_.theta;
    double lin_new = std::exp(log_new) - 1.0;
    if (lin_new < 0.0) {
        lin_new = 0.0;
        log_new = 0.0;
    }
    p.lin = lin_new;
    p.log = log_new;
    // (3) contrast check against the new normalized intensity
    const double normalized = p.lin * 255.0;
    if (p.list.should_flush(normalized, cfg_.m))
        for (const auto& r : p.list.flush(normalized))
            out.push_back(to_adder_event(r, e.x, e.y, 0));
    return out;
}

std::vector<AdderEvent> EventTranscoder::ingest_deblurred_frame(
    const ImageF& latent, std::uint64_t exposure_start, std::uint64_t exposure_end) {
    if (cfg_.mode == EventMode::DvsOnly)
        throw ConfigError("mode (iii) does not ingest frames");
    if (latent.width != cfg_.width || latent.height != cfg_.height ||
        latent.channels != 1)
        throw ConfigError("latent frame dimensions do not match the sensor plane");
    if (exposure_end <= exposure_start)
        throw ConfigError("exposure_end must be > exposure_start");

    std::vector<AdderEvent> out;
    for (int y = 0; y < cfg_.height; ++y) {
        for (int x = 0; x < cfg_.width; ++x) {
            Pixel& p = px(x, y);
            touch(p, exposure_start);
            if (exposure_start < p.last_t)
                throw FormatError("APS exposure overlaps already-integrated time");
            const auto ux = static_cast<std::uint16_t>(x);
            const auto uy = static_cast<std::uint16_t>(y);
            // gap up to the exposure at the previous latent
            advance(p, exposure_start, ux, uy, out);
            // scale to L in [0,1] and absorb the frame across its exposure
            const double L = std::clamp(latent.at(x, y) / 255.0, 0.0, 1.0);
            p.lin = L;
            p.log = std::log(1.0 + L);
            advance(p, exposure_end, ux, uy, out);
            const double normalized = L * 255.0;
            if (p.list.should_flush(normalized, cfg_.m))
                for (const auto& r : p.list.flush(normalized))
                    out.push_back(to_adder_event(r, ux, uy, 0));
        }
    }
    return out;
}

std::vector<AdderEvent> EventTranscoder::finalize(std::uint64_t end_t) {
    if (!epoch_set_) {
        // nothing was fed: the stream covers [0, end_t] of idle latents
        epoch_ = 0;
        epoch_set_ = true;
    }
    std::vector<AdderEvent> out;
    for (int y = 0; y < cfg_.height; ++y) {
        for (int x = 0; x < cfg_.width; ++x) {
            Pixel& p = px(x, y);
            touch(p, end_t);
            const auto ux = static_cast<std::uint16_t>(x);
            const auto uy = static_cast<std::uint16_t>(y);
            if (end_t > p.last_t) advance(p, end_t, ux, uy, out);
            for (const auto& r : p.list.flush(0.0))
                out.push_back(to_adder_event(r, ux, uy, 0));
        }
    }
    return out;
}

DavisTranscodeResult transcode_davis(const EventModeConfig& cfg,
                                     const std::vector<ApsFrame>& frames,
                                     const std::vector<DvsEvent>& dvs) {
    cfg.validate();
    DavisTranscodeResult result;
    result.theta_used = cfg.theta;

    if (cfg.mode == EventMode::DeblurredSequence) {
        if (frames.empty()) throw ConfigError("mode (i) requires APS frames");
        EventGrid grid(cfg.width, cfg.height, dvs);
        if (cfg.optimize_theta)
            result.theta_used = optimize_theta(frames.front(), grid);
        auto seq = reconstruct_sequence(frames, grid, result.theta_used,
                                        cfg.ref_interval);
        FramedConfig fc;
        fc.width = cfg.width;
        fc.height = cfg.height;
        fc.channels = 1;
        fc.ref_interval = cfg.ref_interval;
        fc.fps = static_cast<double>(cfg.tick_rate) / cfg.ref_interval;
        fc.max_interval = cfg.max_interval;
        fc.m = cfg.m;
        FramedTranscoder ft(fc);
        for (const auto& f : seq) {
            // intensities are clamped to [0,255] only at this point
            auto evs = ft.transcode_frame(clamp_to_u8(f.image));
            result.events.insert(result.events.end(), evs.begin(), evs.end());
        }
        auto tail = ft.finalize();
        result.events.insert(result.events.end(), tail.begin(), tail.end());
        result.header = ft.header();
        result.header.source = SourceKind::DavisModeI;
        result.header.tick_rate = cfg.tick_rate;
        return result;
    }

    EventTranscoder et(cfg);
    std::uint64_t end_t = 0;
    auto emit = [&](std::vector<AdderEvent>&& evs) {
        result.events.insert(result.events.end(), evs.begin(), evs.end());
    };

    if (cfg.mode == EventMode::DvsOnly) {
        for (const auto& e : dvs) {
            emit(et.integrate_dvs_event(e));
            end_t = std::max(end_t, e.t);
        }
    } else {
        if (frames.empty()) throw ConfigError("mode (ii) requires APS frames");
        EventGrid grid(cfg.width, cfg.height, dvs);
        std::size_t cursor = 0;
        for (const auto& frame : frames) {
            // events up to the exposure start feed the transcoder directly
            while (cursor < dvs.size() && dvs[cursor].t <= frame.exposure_start) {
                emit(et.integrate_dvs_event(dvs[cursor]));
                ++cursor;
            }
            ApsFrame aps{frame.image, frame.exposure_start, frame.exposure_end};
            const double theta = cfg.optimize_theta
                                     ? optimize_theta(aps, grid)
                                     : cfg.theta;
            result.theta_used = theta;
            et.set_theta(theta);
            emit(et.ingest_deblurred_frame(deblur(aps, grid, theta),
                                           frame.exposure_start, frame.exposure_end));
            // in-exposure events were consumed by the double integral
            while (cursor < dvs.size() && dvs[cursor].t <= frame.exposure_end) ++cursor;
            end_t = std::max(end_t, frame.exposure_end);
        }
        for (; cursor < dvs.size(); ++cursor) {
            emit(et.integrate_dvs_event(dvs[cursor]));
            end_t = std::max(end_t, dvs[cursor].t);
        }
    }
    emit(et.finalize(end_t));
    result.header = et.header();
    return result;
}

}  // namespace adder
