#include "adder/framed.hpp"

#include <string>
#include <thread>

#include "adder/errors.hpp"

namespace adder {

void FramedConfig::validate(bool strict) const {
    if (width <= 0 || height <= 0) throw ConfigError("frame plane must be non-empty");
    if (channels != 1 && channels != 3) throw ConfigError("channels must be 1 or 3");
    if (ref_interval < 1) throw ConfigError("ref_interval must be >= 1");
    if (fps <= 0) throw ConfigError("fps must be positive");
    if (max_interval < ref_interval)
        throw ConfigError("max_interval must be >= ref_interval");
    if (m < 0) throw ConfigError("contrast threshold M must be >= 0");
    if (strict && ref_interval < 255)
        throw ConfigError("ref_interval " + std::to_string(ref_interval) +
                          " cannot represent 8-bit intensities: need I_max/dt_ref <= 1 "
                          "(ref_interval >= 255)");
}

FramedTranscoder::FramedTranscoder(const FramedConfig& cfg) : cfg_(cfg) {
    cfg_.validate(false);
    if (cfg_.workers < 1) cfg_.workers = 1;
    plane_.resize(static_cast<std::size_t>(cfg_.width) * cfg_.height * cfg_.channels);
}

StreamHeader FramedTranscoder::header() const {
    StreamHeader h;
    h.width = static_cast<std::uint16_t>(cfg_.width);
    h.height = static_cast<std::uint16_t>(cfg_.height);
    h.channels = static_cast<std::uint8_t>(cfg_.channels);
    h.source = SourceKind::FramedU8;
    h.tick_rate = cfg_.tick_rate();
    h.ref_interval = cfg_.ref_interval;
    h.max_interval = cfg_.max_interval;
    return h;
}

void FramedTranscoder::integrate_sample(std::size_t idx, double value,
                                        std::vector<AdderEvent>& out) {
    PixelList& list = plane_[idx];
    const auto c = static_cast<std::uint8_t>(idx % cfg_.channels);
    const auto pixel = idx / cfg_.channels;
    const auto x = static_cast<std::uint16_t>(pixel % cfg_.width);
    const auto y = static_cast<std::uint16_t>(pixel / cfg_.width);

    std::vector<PixelEventOut> emitted;
    if (frames_in_ == 0) {
        list.reset(value);
    } else if (list.should_flush(value, cfg_.m)) {
        emitted = list.flush(value);
    }
    integrate_clamped(list, value, static_cast<double>(cfg_.ref_interval),
                      static_cast<double>(cfg_.max_interval), emitted);
    for (const auto& p : emitted) out.push_back(to_adder_event(p, x, y, c));
}

std::vector<AdderEvent> FramedTranscoder::transcode_frame(const Image8& frame) {
    if (finalized_) throw ConfigError("transcoder already finalized");
    if (frame.width != cfg_.width || frame.height != cfg_.height ||
        frame.channels != cfg_.channels)
        throw ConfigError("frame dimensions do not match the configured plane");

    const int bands = std::min(cfg_.workers, cfg_.height);
    std::vector<std::vector<AdderEvent>> band_events(static_cast<std::size_t>(bands));

    auto run_band = [&](int b) {
        const int y0 = cfg_.height * b / bands;
        const int y1 = cfg_.height * (b + 1) / bands;
        auto& out = band_events[static_cast<std::size_t>(b)];
        for (int y = y0; y < y1; ++y) {
            const std::size_t row = static_cast<std::size_t>(y) * cfg_.width * cfg_.channels;
            for (int i = 0; i < cfg_.width * cfg_.channels; ++i)
                integrate_sample(row + i, frame.data[row + i], out);
        }
    };

    if (bands == 1) {
        run_band(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(bands));
        for (int b = 0; b < bands; ++b) pool.emplace_back(run_band, b);
        for (auto& t : pool) t.join();
    }

    ++frames_in_;
    std::vector<AdderEvent> events;
    for (auto& band : band_events)
        events.insert(events.end(), band.begin(), band.end());
    return events;
}

std::vector<AdderEvent> FramedTranscoder::finalize() {
    if (finalized_) return {};
    finalized_ = true;
    std::vector<AdderEvent> events;
    for (std::size_t idx = 0; idx < plane_.size(); ++idx) {
        const auto c = static_cast<std::uint8_t>(idx % cfg_.channels);
        const auto pixel = idx / cfg_.channels;
        const auto x = static_cast<std::uint16_t>(pixel % cfg_.width);
        const auto y = static_cast<std::uint16_t>(pixel / cfg_.width);
        for (const auto& p : plane_[idx].flush(0.0))
            events.push_back(to_adder_event(p, x, y, c));
    }
    return events;
}

}  // namespace adder
