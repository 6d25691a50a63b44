#include "adder/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "adder/errors.hpp"
#include "adder/framed.hpp"
#include "adder/reconstruct.hpp"

namespace adder {

RateReport event_rate(const StreamHeader& h, const std::vector<AdderEvent>& events) {
    RateReport r;
    r.total_events = events.size();
    r.bytes = kHeaderSize + events.size() * event_size(h.channels);
    const double cells = static_cast<double>(h.width) * h.height * h.channels;
    if (cells > 0) r.events_per_pixel_channel = static_cast<double>(events.size()) / cells;

    std::uint64_t duration = 0;
    {
        FrameReconstructor rec(h);
        for (const auto& e : events) rec.feed(e);
        rec.finish(1);
        duration = rec.duration_ticks();
    }
    if (h.tick_rate > 0) {
        r.duration_seconds = static_cast<double>(duration) / h.tick_rate;
        if (r.duration_seconds > 0)
            r.events_per_second = static_cast<double>(events.size()) / r.duration_seconds;
    }
    return r;
}

double psnr(const std::vector<Image8>& a, const std::vector<Image8>& b) {
    if (a.size() != b.size() || a.empty())
        throw ConfigError("psnr needs two equally long, non-empty sequences");
    double sse = 0.0;
    std::uint64_t n = 0;
    for (std::size_t f = 0; f < a.size(); ++f) {
        if (a[f].width != b[f].width || a[f].height != b[f].height ||
            a[f].channels != b[f].channels)
            throw ConfigError("psnr frame dimensions differ");
        for (std::size_t i = 0; i < a[f].data.size(); ++i) {
            const double d = static_cast<double>(a[f].data[i]) - b[f].data[i];
            sse += d * d;
        }
        n += a[f].data.size();
    }
    const double mse = sse / static_cast<double>(n);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

SceneKind scene_kind_from_name(const std::string& name) {
    if (name == "constant") return SceneKind::Constant;
    if (name == "step") return SceneKind::Step;
    if (name == "moving-edge") return SceneKind::MovingEdge;
    if (name == "sinusoid") return SceneKind::Sinusoid;
    if (name == "noise") return SceneKind::NoiseField;
    throw ConfigError("unknown scene kind '" + name + "'");
}

std::string scene_kind_name(SceneKind kind) {
    switch (kind) {
        case SceneKind::Constant: return "constant";
        case SceneKind::Step: return "step";
        case SceneKind::MovingEdge: return "moving-edge";
        case SceneKind::Sinusoid: return "sinusoid";
        case SceneKind::NoiseField: return "noise";
    }
    return "?";
}

namespace {

// Order-independent hash noise in [0,1): reproducible for any (seed,x,y,k).
double hash_noise(std::uint64_t seed, std::uint64_t x, std::uint64_t y, std::uint64_t k) {
    std::uint64_t z = seed ^ (x * 0x9E3779B97F4A7C15ull) ^ (y * 0xC2B2AE3D27D4EB4Full) ^
                      (k * 0x165667B19E3779F9ull);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) / 9007199254740992.0;  // 2^53
}

}  // namespace

SyntheticScene::SyntheticScene(const SceneConfig& cfg) : cfg_(cfg) {
    if (cfg_.width <= 0 || cfg_.height <= 0 || cfg_.frames <= 0)
        throw ConfigError("scene dimensions must be positive");
    if (cfg_.fps <= 0) throw ConfigError("scene fps must be positive");
}

double SyntheticScene::ground_truth(int x, int y, double t) const {
    double v = cfg_.base;
    switch (cfg_.kind) {
        case SceneKind::Constant:
            break;
        case SceneKind::Step:
            // global jump halfway through the clip
            if (t >= cfg_.frames / 2.0) v = cfg_.base + cfg_.amplitude;
            break;
        case SceneKind::MovingEdge: {
            const double edge = cfg_.speed * t;
            const double xr = std::fmod(edge, static_cast<double>(cfg_.width));
            v = x < xr ? cfg_.base + cfg_.amplitude : cfg_.base;
            break;
        }
        case SceneKind::Sinusoid:
            v = cfg_.base + cfg_.amplitude *
                                std::sin(2.0 * 3.14159265358979323846 *
                                         (t / cfg_.period + static_cast<double>(x) / cfg_.width));
            break;
        case SceneKind::NoiseField:
            v = cfg_.base + cfg_.amplitude *
                                (2.0 * hash_noise(cfg_.seed, static_cast<std::uint64_t>(x),
                                                  static_cast<std::uint64_t>(y),
                                                  static_cast<std::uint64_t>(std::floor(t))) -
                                 1.0);
            break;
    }
    return std::clamp(v, 0.0, 255.0);
}

Image8 SyntheticScene::frame(int index) const {
    Image8 img(cfg_.width, cfg_.height, 1);
    for (int y = 0; y < cfg_.height; ++y)
        for (int x = 0; x < cfg_.width; ++x)
            img.at(x, y) = static_cast<std::uint8_t>(
                std::lround(ground_truth(x, y, index + 0.5)));
    return img;
}

std::vector<Image8> SyntheticScene::render() const {
    std::vector<Image8> out;
    out.reserve(static_cast<std::size_t>(cfg_.frames));
    for (int k = 0; k < cfg_.frames; ++k) out.push_back(frame(k));
    return out;
}

std::vector<SweepRow> sweep_framed(
    const std::vector<std::pair<std::string, std::vector<Image8>>>& inputs,
    const SweepGrid& grid, double fps) {
    std::vector<SweepRow> rows;
    for (const auto& [name, frames] : inputs) {
        if (frames.empty()) throw ConfigError("sweep input '" + name + "' has no frames");
        for (const std::uint32_t ref : grid.ref_intervals) {
            for (const std::uint32_t mult : grid.max_multiples) {
                for (const double m : grid.m_values) {
                    FramedConfig fc;
                    fc.width = frames[0].width;
                    fc.height = frames[0].height;
                    fc.channels = frames[0].channels;
                    fc.ref_interval = ref;
                    fc.fps = fps;
                    fc.max_interval = ref * mult;
                    fc.m = m;
                    fc.validate(false);  // sweeps chart the sub-255 knee too

                    const auto t0 = std::chrono::steady_clock::now();
                    FramedTranscoder ft(fc);
                    std::vector<AdderEvent> events;
                    for (const auto& f : frames) {
                        auto evs = ft.transcode_frame(f);
                        events.insert(events.end(), evs.begin(), evs.end());
                    }
                    auto tail = ft.finalize();
                    events.insert(events.end(), tail.begin(), tail.end());
                    const auto t1 = std::chrono::steady_clock::now();

                    const auto recon =
                        reconstruct_frames(ft.header(), events, frames.size());
                    const RateReport rate = event_rate(ft.header(), events);

                    SweepRow row;
                    row.input = name;
                    row.m = m;
                    row.ref_interval = ref;
                    row.max_interval = fc.max_interval;
                    row.events = rate.total_events;
                    row.bytes = rate.bytes;
                    row.events_per_pixel_channel = rate.events_per_pixel_channel;
                    row.psnr_db = psnr(frames, recon);
                    row.wall_ms =
                        std::chrono::duration<double, std::milli>(t1 - t0).count();
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

namespace {

std::string psnr_str(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot create " + path.string());
    out << "input,m,ref_interval,max_interval,events,bytes,events_per_pixel_channel,psnr_db,wall_ms\n";
    for (const auto& r : rows)
        out << r.input << ',' << r.m << ',' << r.ref_interval << ',' << r.max_interval
            << ',' << r.events << ',' << r.bytes << ',' << r.events_per_pixel_channel
            << ',' << psnr_str(r.psnr_db) << ',' << r.wall_ms << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

void write_sweep_jsonl(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot create " + path.string());
    for (const auto& r : rows) {
        out << "{\"input\":\"" << r.input << "\",\"m\":" << r.m
            << ",\"ref_interval\":" << r.ref_interval
            << ",\"max_interval\":" << r.max_interval << ",\"events\":" << r.events
            << ",\"bytes\":" << r.bytes
            << ",\"events_per_pixel_channel\":" << r.events_per_pixel_channel
            << ",\"psnr_db\":";
        if (std::isinf(r.psnr_db)) out << "\"inf\"";
        else out << r.psnr_db;
        out << ",\"wall_ms\":" << r.wall_ms << "}\n";
    }
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace adder
