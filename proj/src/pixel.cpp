#include "adder/pixel.hpp"

#include <cmath>

#include "adder/event.hpp"

namespace adder {

namespace {

constexpr double kBoundaryEps = 1e-9;

inline double threshold(std::uint8_t d) { return std::ldexp(1.0, d); }

}  // namespace

std::uint8_t spawn_d(double intensity) {
    if (!(intensity >= 1.0)) return 0;
    const int e = std::ilogb(intensity);
    return e >= kMaxNaturalD ? kMaxNaturalD : static_cast<std::uint8_t>(e);
}

void PixelList::reset(double intensity) {
    nodes_.clear();
    if (nodes_.capacity() < 8) nodes_.reserve(8);  // typical chain depth
    PixelNode head;
    head.d = spawn_d(intensity);
    nodes_.push_back(head);
    baseline_ = intensity;
    window_elapsed_ = 0.0;
}

bool PixelList::should_flush(double incoming, double m) const {
    return std::abs(incoming - baseline_) > m;
}

void PixelList::integrate(double intensity, double span, double dt_max) {
    if (span <= 0.0) return;
    if (nodes_.empty()) reset(intensity);
    window_elapsed_ += span;

    const double rate = intensity / span;
    const std::uint8_t child_d = spawn_d(intensity);

    double in_i = intensity;
    double in_t = span;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        bool saturated = false;
        while (!nodes_[i].capped && in_i > 0.0 &&
               nodes_[i].accum + in_i >= threshold(nodes_[i].d)) {
            PixelNode& n = nodes_[i];
            const double need = threshold(n.d) - n.accum;
            const double f = need / in_i;
            n.accum += need;
            n.elapsed += f * in_t;
            n.out_d = n.d;
            n.out_dt = static_cast<std::uint32_t>(std::floor(n.elapsed));
            in_i -= need;
            in_t -= f * in_t;
            saturated = true;
            // Raise D unless the next doubling could not complete within the
            // remaining dt_max budget at the current input rate.
            const double budget = dt_max - (window_elapsed_ - in_t);
            if (n.d >= kMaxNaturalD ||
                (rate > 0.0 && threshold(n.d) / rate > budget)) {
                n.capped = true;
            } else {
                ++n.d;
            }
        }
        nodes_[i].accum += in_i;
        nodes_[i].elapsed += in_t;
        if (saturated) {
            nodes_.resize(i + 1);
            PixelNode child;
            child.d = child_d;
            nodes_.push_back(child);
            // the fresh child absorbs only the remainder; recursion continues
        }
        // without a saturation, the next node absorbs the same input
    }
}

std::vector<PixelEventOut> PixelList::flush(double new_intensity) {
    std::vector<PixelEventOut> out;
    for (const PixelNode& n : nodes_)
        if (n.has_out()) out.push_back(n.out());
    if (out.empty() && !nodes_.empty()) {
        const PixelNode& n = nodes_.front();
        if (n.accum >= 1.0) {
            // Best-fit event preserving the mean rate accum/elapsed.
            const std::uint8_t d = spawn_d(n.accum);
            const double dt = std::round(n.elapsed * threshold(d) / n.accum);
            if (dt >= 1.0) out.push_back({d, static_cast<std::uint32_t>(dt)});
        } else if (n.elapsed >= 1.0) {
            out.push_back({kZeroD, static_cast<std::uint32_t>(std::floor(n.elapsed))});
        }
    }
    reset(new_intensity);
    return out;
}

std::size_t integrate_clamped(PixelList& list, double intensity, double span,
                              double dt_max, std::vector<PixelEventOut>& out) {
    if (span <= 0.0) return 0;
    const double rate = intensity / span;
    const double reinit = list.baseline();
    const double eps = kBoundaryEps * dt_max;
    std::size_t flushes = 0;
    double left = span;
    while (left > 0.0) {
        const double room = dt_max - list.window_elapsed();
        if (left < room - eps) {
            list.integrate(rate * left, left, dt_max);
            break;
        }
        const double step = room > 0.0 ? std::min(left, room) : 0.0;
        if (step > 0.0) list.integrate(rate * step, step, dt_max);
        auto evs = list.flush(reinit);
        out.insert(out.end(), evs.begin(), evs.end());
        ++flushes;
        left -= step;
        if (left <= eps) break;
    }
    return flushes;
}

}  // namespace adder
