#include "adder/edi.hpp"

#include <algorithm>
#include <cmath>

#include "adder/errors.hpp"

namespace adder {

EventGrid::EventGrid(int width, int height)
    : width_(width), height_(height),
      per_pixel_(static_cast<std::size_t>(width) * height) {
    if (width <= 0 || height <= 0) throw ConfigError("event grid must be non-empty");
}

EventGrid::EventGrid(int width, int height, const std::vector<DvsEvent>& events)
    : EventGrid(width, height) {
    for (const auto& e : events) add(e);
    sort_pixels();
}

void EventGrid::add(const DvsEvent& e) {
    if (e.x >= width_ || e.y >= height_)
        throw FormatError("DVS event outside the sensor plane");
    per_pixel_[static_cast<std::size_t>(e.y) * width_ + e.x].emplace_back(e.t, e.p);
}

void EventGrid::sort_pixels() {
    for (auto& v : per_pixel_)
        std::stable_sort(v.begin(), v.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
}

int EventGrid::event_sum(int x, int y, std::uint64_t t0, std::uint64_t t1) const {
    int sum = 0;
    for (const auto& [t, p] : pixel(x, y)) {
        if (t <= t0) continue;
        if (t > t1) break;
        sum += p;
    }
    return sum;
}

ImageF deblur(const ApsFrame& frame, const EventGrid& events, double theta) {
    const std::uint64_t s = frame.exposure_start;
    const std::uint64_t e = frame.exposure_end;
    if (e <= s) throw ConfigError("zero-length exposure");
    if (frame.image.channels != 1)
        throw ConfigError("deblur expects monochrome APS frames");
    const double T = static_cast<double>(e - s);

    ImageF latent(frame.image.width, frame.image.height, 1);
    for (int y = 0; y < frame.image.height; ++y) {
        for (int x = 0; x < frame.image.width; ++x) {
            double integral = 0.0;
            double acc = 0.0;  // theta * E(s, t)
            std::uint64_t prev = s;
            for (const auto& [t, p] : events.pixel(x, y)) {
                if (t <= s) continue;
                if (t > e) break;
                integral += static_cast<double>(t - prev) * std::exp(acc);
                acc += theta * p;
                prev = t;
            }
            integral += static_cast<double>(e - prev) * std::exp(acc);
            const double B = frame.image.at(x, y);
            latent.at(x, y) = std::max(0.0, B * T / integral);
        }
    }
    return latent;
}

double sharpness(const ImageF& img) {
    // Contrast per unit of total variation: steep transitions score high,
    // smeared or ghosted ones low. Normalizing by the gradient mass keeps the
    // score invariant to plain amplification, which raw gradient energy is
    // not (it grows without bound as theta over-corrects).
    double sum = 0.0, sum2 = 0.0, grad = 0.0;
    std::size_t n = 0, g = 0;
    for (int c = 0; c < img.channels; ++c) {
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                const double v = img.at(x, y, c);
                sum += v;
                sum2 += v * v;
                ++n;
                if (x + 1 < img.width) {
                    grad += std::abs(img.at(x + 1, y, c) - v);
                    ++g;
                }
                if (y + 1 < img.height) {
                    grad += std::abs(img.at(x, y + 1, c) - v);
                    ++g;
                }
            }
        }
    }
    if (n == 0 || g == 0) return 0.0;
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
    const double mean_grad = grad / static_cast<double>(g);
    return std::sqrt(var) / (mean_grad + 1e-9);
}

double optimize_theta(const ApsFrame& frame, const EventGrid& events, double lo,
                      double hi, double tol) {
    if (!(lo > 0) || !(hi > lo)) throw ConfigError("empty theta search range");

    bool any_event = false;
    for (int y = 0; y < frame.image.height && !any_event; ++y)
        for (int x = 0; x < frame.image.width && !any_event; ++x)
            if (events.event_sum(x, y, frame.exposure_start, frame.exposure_end) != 0 ||
                !events.pixel(x, y).empty())
                any_event = true;
    if (!any_event) return (lo + hi) / 2.0;  // constant score: midpoint tie rule

    const auto score = [&](double theta) { return sharpness(deblur(frame, events, theta)); };

    // Coarse scan to bracket the peak, then golden-section refinement.
    constexpr int kGrid = 16;
    double best = lo;
    double best_score = score(lo);
    for (int i = 1; i <= kGrid; ++i) {
        const double t = lo + (hi - lo) * i / kGrid;
        const double sc = score(t);
        if (sc > best_score) {
            best_score = sc;
            best = t;
        }
    }
    double a = std::max(lo, best - (hi - lo) / kGrid);
    double b = std::min(hi, best + (hi - lo) / kGrid);

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = score(c);
    double fd = score(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = score(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = score(d);
        }
    }
    return (a + b) / 2.0;
}

std::vector<EdiFrame> reconstruct_sequence(const std::vector<ApsFrame>& frames,
                                           const EventGrid& events, double theta,
                                           std::uint64_t output_interval) {
    if (frames.empty()) return {};
    if (output_interval == 0) throw ConfigError("output_interval must be >= 1");

    // Typical anchor spacing, for flagging propagation across missing frames.
    std::uint64_t typical_gap = output_interval;
    if (frames.size() > 1) {
        std::vector<std::uint64_t> gaps;
        for (std::size_t i = 1; i < frames.size(); ++i)
            gaps.push_back(frames[i].exposure_start - frames[i - 1].exposure_start);
        std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
        typical_gap = gaps[gaps.size() / 2];
    }

    const int w = events.width();
    const int h = events.height();
    std::vector<EdiFrame> out;

    std::size_t anchor_idx = 0;
    ImageF anchor = deblur(frames[0], events, theta);
    std::uint64_t anchor_t = frames[0].exposure_start;

    // Per-pixel cursor into the event list plus the running exp(theta*dE).
    std::vector<std::size_t> cursor(static_cast<std::size_t>(w) * h, 0);
    std::vector<double> scale(static_cast<std::size_t>(w) * h, 1.0);
    auto reset_cursors = [&](std::uint64_t t) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                const auto& evs = events.pixel(x, y);
                std::size_t k = 0;
                while (k < evs.size() && evs[k].first <= t) ++k;
                cursor[i] = k;
                scale[i] = 1.0;
            }
    };
    reset_cursors(anchor_t);

    const std::uint64_t end_t = frames.back().exposure_end;
    for (std::uint64_t t = anchor_t;; t += output_interval) {
        // Re-anchor on the latest APS frame whose exposure has started.
        while (anchor_idx + 1 < frames.size() &&
               frames[anchor_idx + 1].exposure_start <= t) {
            ++anchor_idx;
            anchor = deblur(frames[anchor_idx], events, theta);
            anchor_t = frames[anchor_idx].exposure_start;
            reset_cursors(anchor_t);
        }

        EdiFrame f;
        f.t = t;
        f.extrapolated =
            anchor_idx + 1 == frames.size()
                ? t > frames[anchor_idx].exposure_end
                : t > anchor_t + 2 * typical_gap;
        f.image = ImageF(w, h, 1);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                const auto& evs = events.pixel(x, y);
                while (cursor[i] < evs.size() && evs[cursor[i]].first <= t) {
                    scale[i] *= std::exp(theta * evs[cursor[i]].second);
                    ++cursor[i];
                }
                f.image.at(x, y) = anchor.at(x, y) * scale[i];
            }
        out.push_back(std::move(f));
        if (t >= end_t) break;
    }
    return out;
}

}  // namespace adder
