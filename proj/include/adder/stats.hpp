#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "adder/codec.hpp"
#include "adder/event.hpp"
#include "adder/image.hpp"

namespace adder {

struct RateReport {
    std::uint64_t total_events = 0;
    double events_per_pixel_channel = 0.0;
    double events_per_second = 0.0;
    std::uint64_t bytes = 0;  // header + N * event_size, exact
    double duration_seconds = 0.0;
};

RateReport event_rate(const StreamHeader& h, const std::vector<AdderEvent>& events);

// Peak signal-to-noise ratio across two equally-shaped frame sequences,
// 8-bit peak. Identical sequences return +infinity.
double psnr(const std::vector<Image8>& a, const std::vector<Image8>& b);

// --- synthetic corpus ------------------------------------------------------

enum class SceneKind { Constant, Step, MovingEdge, Sinusoid, NoiseField };

SceneKind scene_kind_from_name(const std::string& name);
std::string scene_kind_name(SceneKind kind);

struct SceneConfig {
    SceneKind kind = SceneKind::Constant;
    int width = 64;
    int height = 64;
    int frames = 30;
    double fps = 30.0;
    double base = 100.0;       // resting intensity
    double amplitude = 80.0;   // step height / edge contrast / noise span
    double speed = 2.0;        // moving edge: pixels per frame
    double period = 16.0;      // sinusoid: frames per cycle
    std::uint64_t seed = 1;
};

// Deterministic scene with a ground-truth intensity function of (x, y, t);
// t is measured in frames (so t = k + 0.5 is the middle of frame k). The
// function itself is the brute-force oracle for transcoder tests.
class SyntheticScene {
  public:
    explicit SyntheticScene(const SceneConfig& cfg);

    const SceneConfig& config() const { return cfg_; }
    double ground_truth(int x, int y, double t) const;  // clamped to [0,255]
    Image8 frame(int index) const;
    std::vector<Image8> render() const;

  private:
    SceneConfig cfg_;
};

// --- sweep harness ---------------------------------------------------------

struct SweepRow {
    std::string input;
    double m = 0.0;
    std::uint32_t ref_interval = 0;
    std::uint32_t max_interval = 0;
    std::uint64_t events = 0;
    std::uint64_t bytes = 0;
    double events_per_pixel_channel = 0.0;
    double psnr_db = 0.0;
    double wall_ms = 0.0;
};

struct SweepGrid {
    std::vector<double> m_values{0, 10, 20, 30, 40};
    std::vector<std::uint32_t> ref_intervals{255};
    std::vector<std::uint32_t> max_multiples{120};  // dt_max = ref * multiple
};

// Transcode + reconstruct each (scene, M, dt_ref, dt_max) cell and measure
// rate and quality against the scene's own frames.
std::vector<SweepRow> sweep_framed(const std::vector<std::pair<std::string, std::vector<Image8>>>& inputs,
                                   const SweepGrid& grid, double fps);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
void write_sweep_jsonl(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace adder
