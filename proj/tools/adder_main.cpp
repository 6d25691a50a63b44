// adder: transcode framed and event-camera video to the ADDER intensity-event
// representation, reconstruct frames, recover DVS streams, and measure
// rate/quality tradeoffs.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>
#include <vector>

#include "adder/codec.hpp"
#include "adder/dvs_io.hpp"
#include "adder/edi.hpp"
#include "adder/errors.hpp"
#include "adder/event_transcoder.hpp"
#include "adder/framed.hpp"
#include "adder/image.hpp"
#include "adder/reconstruct.hpp"
#include "adder/stats.hpp"

namespace fs = std::filesystem;
using namespace adder;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitFormat = 4;

int log_level() {
    const char* env = std::getenv("ADDER_LOG");
    if (!env) return 1;
    const std::string v = env;
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "adder: " << msg << "\n";
}

// No partial outputs: write to a sibling temp file, rename on success.
class AtomicFile {
  public:
    explicit AtomicFile(const fs::path& target)
        : target_(target), tmp_(target.string() + ".tmp"),
          out_(tmp_, std::ios::binary) {
        if (!out_) throw IoError("cannot create " + tmp_.string());
    }
    ~AtomicFile() {
        if (!committed_) {
            out_.close();
            std::error_code ec;
            fs::remove(tmp_, ec);
        }
    }
    std::ostream& stream() { return out_; }
    void commit() {
        out_.flush();
        if (!out_) throw IoError("failed writing " + tmp_.string());
        out_.close();
        fs::rename(tmp_, target_);
        committed_ = true;
    }

  private:
    fs::path target_;
    fs::path tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

std::vector<Image8> load_frames(const fs::path& input, int width, int height,
                                int channels) {
    if (!fs::exists(input)) throw IoError("input not found: " + input.string());
    std::vector<Image8> frames;
    if (fs::is_directory(input)) {
        for (const auto& p : list_pixmaps(input)) frames.push_back(read_pixmap(p));
        if (frames.empty()) throw IoError("no .pgm/.ppm frames in " + input.string());
    } else if (input.extension() == ".raw") {
        if (width <= 0 || height <= 0)
            throw ConfigError("raw input needs --width and --height");
        std::ifstream in(input, std::ios::binary);
        if (!in) throw IoError("cannot open " + input.string());
        const std::size_t frame_bytes =
            static_cast<std::size_t>(width) * height * channels;
        Image8 img(width, height, channels);
        while (in.read(reinterpret_cast<char*>(img.data.data()),
                       static_cast<std::streamsize>(frame_bytes)))
            frames.push_back(img);
        if (in.gcount() != 0) throw FormatError(input.string() + ": trailing partial frame");
        if (frames.empty()) throw FormatError(input.string() + ": no frames");
    } else {
        throw ConfigError("--input must be a frame directory or a .raw file");
    }
    return frames;
}

void write_stream_file(const fs::path& out, const StreamHeader& header,
                       const std::vector<AdderEvent>& events) {
    AtomicFile file(out);
    StreamWriter writer(file.stream(), header);
    for (const auto& e : events) writer.write(e);
    file.commit();
    info("wrote " + std::to_string(events.size()) + " events to " + out.string());
}

std::pair<StreamHeader, std::vector<AdderEvent>> read_stream_file(const fs::path& in) {
    std::ifstream f(in, std::ios::binary);
    if (!f) throw IoError("cannot open " + in.string());
    StreamReader reader(f);
    std::vector<AdderEvent> events;
    while (auto e = reader.next()) events.push_back(*e);
    return {reader.header(), std::move(events)};
}

std::vector<ApsFrame> load_aps(const fs::path& manifest) {
    std::vector<ApsFrame> frames;
    for (const auto& entry : read_aps_manifest(manifest)) {
        ApsFrame f;
        f.image = read_pixmap(entry.image);
        f.exposure_start = entry.exposure_start;
        f.exposure_end = entry.exposure_end;
        frames.push_back(std::move(f));
    }
    if (frames.empty()) throw FormatError(manifest.string() + ": no frames listed");
    return frames;
}

void save_frame_sequence(const fs::path& dir, const std::vector<Image8>& frames,
                         const std::string& stem) {
    fs::create_directories(dir);
    char name[64];
    for (std::size_t i = 0; i < frames.size(); ++i) {
        std::snprintf(name, sizeof name, "%s_%05zu.%s", stem.c_str(), i,
                      frames[i].channels == 3 ? "ppm" : "pgm");
        write_pixmap(dir / name, frames[i]);
    }
    info("wrote " + std::to_string(frames.size()) + " frames to " + dir.string());
}

// ---- subcommands -----------------------------------------------------------

struct FramedArgs {
    std::string input;
    std::string out;
    int width = 0, height = 0, channels = 1;
    double fps = 30.0;
    std::uint32_t dtref = 255;
    std::uint32_t dtmax = 0;  // 0 -> dtref * 120
    double m = 0.0;
    int workers = 0;
    bool allow_low_dtref = false;
};

int run_transcode_framed(const FramedArgs& a) {
    FramedConfig cfg;
    const auto frames = load_frames(a.input, a.width, a.height, a.channels);
    cfg.width = frames[0].width;
    cfg.height = frames[0].height;
    cfg.channels = frames[0].channels;
    cfg.ref_interval = a.dtref;
    cfg.fps = a.fps;
    cfg.max_interval = a.dtmax == 0 ? a.dtref * 120 : a.dtmax;
    cfg.m = a.m;
    cfg.workers = a.workers > 0
                      ? a.workers
                      : static_cast<int>(std::thread::hardware_concurrency());
    cfg.validate(!a.allow_low_dtref);

    FramedTranscoder ft(cfg);
    std::vector<AdderEvent> events;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& f : frames) {
        auto evs = ft.transcode_frame(f);
        events.insert(events.end(), evs.begin(), evs.end());
    }
    auto tail = ft.finalize();
    events.insert(events.end(), tail.begin(), tail.end());
    const auto t1 = std::chrono::steady_clock::now();
    info("transcoded " + std::to_string(frames.size()) + " frames in " +
         std::to_string(std::chrono::duration<double, std::milli>(t1 - t0).count()) +
         " ms");
    write_stream_file(a.out, ft.header(), events);
    return kExitOk;
}

struct EventsArgs {
    std::string mode = "ii";
    std::string events;
    std::string frames;
    std::string out;
    int width = 0, height = 0;
    std::uint32_t dts = 1'000'000;
    std::uint32_t dtref = 0;  // 0 -> dts / 500
    std::uint32_t dtmax = 0;  // 0 -> dts * 4
    double m = 0.0;
    double theta = 0.15;
    bool optimize = false;
    std::uint64_t reset_interval = 0;  // 0 -> dts / 2
};

int run_transcode_events(const EventsArgs& a) {
    EventModeConfig cfg;
    if (a.mode == "i") cfg.mode = EventMode::DeblurredSequence;
    else if (a.mode == "ii") cfg.mode = EventMode::FramePlusEvents;
    else if (a.mode == "iii") cfg.mode = EventMode::DvsOnly;
    else throw ConfigError("--mode must be i, ii or iii");

    const auto dvs = read_dvs_events(a.events);
    std::vector<ApsFrame> frames;
    if (!a.frames.empty()) frames = load_aps(a.frames);
    if (cfg.mode != EventMode::DvsOnly && frames.empty())
        throw ConfigError("modes (i) and (ii) need --frames");

    int width = a.width, height = a.height;
    if ((width <= 0 || height <= 0) && !frames.empty()) {
        width = frames[0].image.width;
        height = frames[0].image.height;
    }
    if (width <= 0 || height <= 0)
        throw ConfigError("mode (iii) needs --width and --height");

    cfg.width = width;
    cfg.height = height;
    cfg.tick_rate = a.dts;
    cfg.ref_interval = a.dtref == 0 ? a.dts / 500 : a.dtref;
    cfg.max_interval = a.dtmax == 0 ? a.dts * 4 : a.dtmax;
    cfg.m = a.m;
    cfg.theta = a.theta;
    cfg.optimize_theta = a.optimize;
    cfg.reset_interval = a.reset_interval == 0 ? a.dts / 2 : a.reset_interval;

    const auto t0 = std::chrono::steady_clock::now();
    const auto result = transcode_davis(cfg, frames, dvs);
    const auto t1 = std::chrono::steady_clock::now();
    info("mode (" + a.mode + ") transcode: " + std::to_string(dvs.size()) +
         " DVS events in, " + std::to_string(result.events.size()) +
         " adder events out, theta=" + std::to_string(result.theta_used) + ", " +
         std::to_string(std::chrono::duration<double, std::milli>(t1 - t0).count()) +
         " ms");
    write_stream_file(a.out, result.header, result.events);
    return kExitOk;
}

struct EdiArgs {
    std::string frames;
    std::string events;
    std::string out;
    double theta = 0.15;
    bool optimize = false;
    std::uint32_t fps_out = 0;  // 0 -> one latent per APS frame
    bool pace = false;
    std::size_t packet = 10000;
};

int run_edi(const EdiArgs& a) {
    const auto frames = load_aps(a.frames);
    const auto dvs = read_dvs_events(a.events);
    const int w = frames[0].image.width;
    const int h = frames[0].image.height;

    // replay event packets against their recorded timestamps; per-packet
    // ingest (bucketing into the per-pixel grid) is the timed stage
    EventGrid grid(w, h);
    std::vector<double> packet_ms;
    if (!dvs.empty()) {
        const auto wall0 = std::chrono::steady_clock::now();
        const std::uint64_t t0 = dvs.front().t;
        for (std::size_t i = 0; i < dvs.size(); i += a.packet) {
            const std::size_t end = std::min(dvs.size(), i + a.packet);
            if (a.pace) {
                const auto due = wall0 + std::chrono::microseconds(dvs[end - 1].t - t0);
                std::this_thread::sleep_until(due);
            }
            const auto p0 = std::chrono::steady_clock::now();
            for (std::size_t k = i; k < end; ++k) grid.add(dvs[k]);
            const auto p1 = std::chrono::steady_clock::now();
            packet_ms.push_back(std::chrono::duration<double, std::milli>(p1 - p0).count());
        }
    }
    grid.sort_pixels();
    double theta = a.theta;
    if (a.optimize) {
        theta = optimize_theta(frames[0], grid);
        info("optimized theta = " + std::to_string(theta));
    }

    std::vector<Image8> out_frames;
    if (a.fps_out == 0) {
        for (const auto& f : frames) out_frames.push_back(clamp_to_u8(deblur(f, grid, theta)));
    } else {
        const std::uint64_t interval = 1'000'000ull / a.fps_out;
        for (const auto& f : reconstruct_sequence(frames, grid, theta, interval))
            out_frames.push_back(clamp_to_u8(f.image));
    }
    save_frame_sequence(a.out, out_frames, "latent");

    if (!packet_ms.empty()) {
        std::sort(packet_ms.begin(), packet_ms.end());
        info("packet latency ms: median " +
             std::to_string(packet_ms[packet_ms.size() / 2]) + ", max " +
             std::to_string(packet_ms.back()));
    }
    return kExitOk;
}

int run_reconstruct(const std::string& in, const std::string& out) {
    const auto [header, events] = read_stream_file(in);
    const auto frames = reconstruct_frames(header, events, 0);
    save_frame_sequence(out, frames, "frame");
    return kExitOk;
}

int run_to_dvs(const std::string& in, const std::string& out, double theta) {
    const auto [header, events] = read_stream_file(in);
    const auto dvs = recover_dvs(header, events, theta);
    const fs::path target(out);
    // write through a temp path for the same no-partial-output contract
    const fs::path tmp = target.string() + ".tmp";
    write_dvs_events(tmp, dvs);
    fs::rename(tmp, target);
    info("recovered " + std::to_string(dvs.size()) + " DVS events");
    return kExitOk;
}

int run_play(const std::string& in, bool no_delay) {
    const auto [header, events] = read_stream_file(in);
    const auto frames = reconstruct_frames(header, events, 0);
    const double fps = header.ref_interval > 0
                           ? static_cast<double>(header.tick_rate) / header.ref_interval
                           : 30.0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        double mean = 0;
        for (auto v : frames[i].data) mean += v;
        mean /= static_cast<double>(frames[i].data.size());
        std::printf("frame %5zu  mean %7.2f\n", i, mean);
        if (!no_delay)
            std::this_thread::sleep_for(
                std::chrono::microseconds(static_cast<std::uint64_t>(1e6 / fps)));
    }
    return kExitOk;
}

int run_stats(const std::string& in, bool as_json) {
    const auto [header, events] = read_stream_file(in);
    const auto rate = event_rate(header, events);
    const auto precision = measure_precision(events);
    if (as_json) {
        std::printf("{\"events\":%llu,\"bytes\":%llu,"
                    "\"events_per_pixel_channel\":%.6f,\"events_per_second\":%.3f,"
                    "\"duration_seconds\":%.6f,\"distinct_levels\":%zu,"
                    "\"precision_bits\":%.3f}\n",
                    static_cast<unsigned long long>(rate.total_events),
                    static_cast<unsigned long long>(rate.bytes),
                    rate.events_per_pixel_channel, rate.events_per_second,
                    rate.duration_seconds, precision.distinct_levels, precision.bits);
    } else {
        std::printf("events                    %llu\n",
                    static_cast<unsigned long long>(rate.total_events));
        std::printf("bytes                     %llu\n",
                    static_cast<unsigned long long>(rate.bytes));
        std::printf("events per pixel channel  %.4f\n", rate.events_per_pixel_channel);
        std::printf("events per second         %.1f\n", rate.events_per_second);
        std::printf("duration seconds          %.4f\n", rate.duration_seconds);
        std::printf("distinct intensity levels %zu\n", precision.distinct_levels);
        std::printf("precision bits            %.2f\n", precision.bits);
    }
    return kExitOk;
}

struct GenArgs {
    std::string kind = "constant";
    std::string out;
    int width = 64, height = 64, frames = 30;
    double base = 100, amplitude = 80, speed = 2, period = 16;
    std::uint64_t seed = 1;
};

int run_gen_scene(const GenArgs& a) {
    SceneConfig cfg;
    cfg.kind = scene_kind_from_name(a.kind);
    cfg.width = a.width;
    cfg.height = a.height;
    cfg.frames = a.frames;
    cfg.base = a.base;
    cfg.amplitude = a.amplitude;
    cfg.speed = a.speed;
    cfg.period = a.period;
    cfg.seed = a.seed;
    const SyntheticScene scene(cfg);
    save_frame_sequence(a.out, scene.render(), a.kind);
    return kExitOk;
}

struct SweepArgs {
    std::vector<std::string> inputs;  // frame directories
    std::string out;
    std::string format = "csv";
    double fps = 30.0;
    std::vector<double> m_values{0, 10, 20, 30, 40};
    std::vector<std::uint32_t> refs{255};
    std::vector<std::uint32_t> max_multiples{120};
};

int run_sweep(const SweepArgs& a) {
    std::vector<std::pair<std::string, std::vector<Image8>>> inputs;
    for (const auto& dir : a.inputs) {
        std::vector<Image8> frames;
        for (const auto& p : list_pixmaps(dir)) frames.push_back(read_pixmap(p));
        if (frames.empty()) throw IoError("no frames in " + dir);
        inputs.emplace_back(fs::path(dir).filename().string(), std::move(frames));
    }
    SweepGrid grid;
    grid.m_values = a.m_values;
    grid.ref_intervals = a.refs;
    grid.max_multiples = a.max_multiples;
    const auto rows = sweep_framed(inputs, grid, a.fps);

    const fs::path target(a.out);
    const fs::path tmp = target.string() + ".tmp";
    if (a.format == "csv") write_sweep_csv(tmp, rows);
    else if (a.format == "jsonl") write_sweep_jsonl(tmp, rows);
    else throw ConfigError("--format must be csv or jsonl");
    fs::rename(tmp, target);
    info("wrote " + std::to_string(rows.size()) + " sweep rows to " + a.out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "adder: asynchronous intensity-event video transcoder.\n"
        "Events carry <x, y, [c,] D, dt>: an intensity of 2^D units over dt "
        "ticks.\nTick parameters: dt_s ticks/second, dt_ref per reference "
        "integration,\ndt_max the longest span one event may cover; M is the "
        "contrast threshold."};
    app.require_subcommand(1);
    app.set_config("--config");

    FramedArgs fa;
    auto* tf = app.add_subcommand("transcode-framed",
                                  "framed 8-bit video -> .adder stream");
    tf->add_option("--input", fa.input, "frame directory (.pgm/.ppm) or .raw file")
        ->required();
    tf->add_option("--out", fa.out, "output .adder path")->required();
    tf->add_option("--width", fa.width, "raw input width (pixels)");
    tf->add_option("--height", fa.height, "raw input height (pixels)");
    tf->add_option("--channels", fa.channels, "raw input channels (1 or 3)");
    tf->add_option("--fps", fa.fps, "source frames per second (F; dt_s = dt_ref*F)");
    tf->add_option("--dtref", fa.dtref, "ticks per input frame (dt_ref, >= 255 for 8-bit)");
    tf->add_option("--dtmax", fa.dtmax, "max event span in ticks (dt_max; default dt_ref*120)");
    tf->add_option("--m", fa.m, "contrast threshold M in 8-bit units per dt_ref");
    tf->add_option("--workers", fa.workers, "row-band worker threads (default: cores)");
    tf->add_flag("--allow-low-dtref", fa.allow_low_dtref,
                 "permit dt_ref < 255 (lossy; for rate-quality experiments)");

    EventsArgs ea;
    auto* te = app.add_subcommand("transcode-events",
                                  "DVS/DAVIS events [+ APS frames] -> .adder stream");
    te->add_option("--mode", ea.mode, "pipeline: i (EDI frames), ii (frames+events), iii (events only)")
        ->required();
    te->add_option("--events", ea.events, "DVS event file (t:u64,x:u16,y:u16,p:i8 LE records)")
        ->required();
    te->add_option("--frames", ea.frames, "APS manifest: 'frame <pixmap> <start> <end>' lines");
    te->add_option("--out", ea.out, "output .adder path")->required();
    te->add_option("--width", ea.width, "sensor width (mode iii)");
    te->add_option("--height", ea.height, "sensor height (mode iii)");
    te->add_option("--dts", ea.dts, "ticks per second (dt_s; default 10^6)");
    te->add_option("--dtref", ea.dtref, "reference integration ticks (dt_ref; default dt_s/500)");
    te->add_option("--dtmax", ea.dtmax, "max event span (dt_max; default dt_s*4)");
    te->add_option("--m", ea.m, "contrast threshold M");
    te->add_option("--theta", ea.theta, "DVS log-intensity threshold theta");
    te->add_flag("--optimize-theta", ea.optimize, "fit theta per APS frame via EDI sharpness");
    te->add_option("--reset-interval", ea.reset_interval,
                   "mode iii latent reset cadence in ticks (default dt_s/2)");

    EdiArgs eda;
    auto* ed = app.add_subcommand("edi", "event-based double integral deblurring");
    ed->add_option("--frames", eda.frames, "APS manifest")->required();
    ed->add_option("--events", eda.events, "DVS event file")->required();
    ed->add_option("--out", eda.out, "output frame directory")->required();
    ed->add_option("--theta", eda.theta, "DVS threshold theta");
    ed->add_flag("--optimize", eda.optimize, "search theta for the sharpest latent");
    ed->add_option("--fps-out", eda.fps_out, "latent frames per second (0: one per APS frame)");
    ed->add_flag("--pace", eda.pace, "replay event packets at recorded wall-clock rate");
    ed->add_option("--packet", eda.packet, "events per simulated packet");

    std::string rin, rout;
    auto* rc = app.add_subcommand("reconstruct", ".adder stream -> framed video");
    rc->add_option("--in", rin, "input .adder path")->required();
    rc->add_option("--out", rout, "output frame directory")->required();

    std::string din, dout;
    double dtheta = 0.15;
    auto* td = app.add_subcommand("to-dvs", ".adder stream -> recovered DVS events");
    td->add_option("--in", din, "input .adder path")->required();
    td->add_option("--out", dout, "output DVS event file")->required();
    td->add_option("--theta", dtheta, "log-intensity step per recovered event");

    std::string pin;
    bool pnodelay = false;
    auto* pl = app.add_subcommand("play", "dump reconstructed frames at the stream rate");
    pl->add_option("--in", pin, "input .adder path")->required();
    pl->add_flag("--no-delay", pnodelay, "do not sleep between frames");

    std::string sin;
    bool sjson = false;
    auto* st = app.add_subcommand("stats", "rate and precision report for a stream");
    st->add_option("--in", sin, "input .adder path")->required();
    st->add_flag("--json", sjson, "emit a JSON object");

    GenArgs ga;
    auto* gs = app.add_subcommand("gen-scene", "deterministic synthetic test video");
    gs->add_option("--kind", ga.kind, "constant|step|moving-edge|sinusoid|noise");
    gs->add_option("--out", ga.out, "output frame directory")->required();
    gs->add_option("--width", ga.width, "width");
    gs->add_option("--height", ga.height, "height");
    gs->add_option("--frames", ga.frames, "frame count");
    gs->add_option("--base", ga.base, "resting intensity");
    gs->add_option("--amplitude", ga.amplitude, "step height / contrast / noise span");
    gs->add_option("--speed", ga.speed, "moving edge speed, pixels per frame");
    gs->add_option("--period", ga.period, "sinusoid period in frames");
    gs->add_option("--seed", ga.seed, "noise seed");

    SweepArgs sa;
    auto* sw = app.add_subcommand("sweep", "rate-distortion grid over M / dt_ref / dt_max");
    sw->add_option("--input", sa.inputs, "frame directories")->required();
    sw->add_option("--out", sa.out, "report file")->required();
    sw->add_option("--format", sa.format, "csv or jsonl");
    sw->add_option("--fps", sa.fps, "source fps");
    sw->add_option("--m", sa.m_values, "M grid");
    sw->add_option("--dtref", sa.refs, "dt_ref grid");
    sw->add_option("--dtmax-mult", sa.max_multiples, "dt_max as multiples of dt_ref");

    try {
        app.parse(argc, argv);
        if (*tf) return run_transcode_framed(fa);
        if (*te) return run_transcode_events(ea);
        if (*ed) return run_edi(eda);
        if (*rc) return run_reconstruct(rin, rout);
        if (*td) return run_to_dvs(din, dout, dtheta);
        if (*pl) return run_play(pin, pnodelay);
        if (*st) return run_stats(sin, sjson);
        if (*gs) return run_gen_scene(ga);
        if (*sw) return run_sweep(sa);
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << "adder: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const FormatError& e) {
        std::cerr << "adder: format error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const IoError& e) {
        std::cerr << "adder: i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "adder: i/o error: " << e.what() << "\n";
        return kExitIo;
    }
}
