#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "adder/event.hpp"
#include "adder/pixel.hpp"

using namespace adder;

namespace {

constexpr double kNoDtMax = 1e15;

// Scalar reference: accumulate the same piecewise-constant input at 1000 steps
// per tick, fully independent of the pixel-list integration path.
struct ScalarOracle {
    double units = 0.0;
    double ticks = 0.0;
    void feed(double intensity, double span) {
        const int steps = static_cast<int>(span * 1000.0);
        const double dt = span / steps;
        const double rate = intensity / span;
        for (int i = 0; i < steps; ++i) {
            units += rate * dt;
            ticks += dt;
        }
    }
    double mean() const { return units / ticks; }
};

}  // namespace

TEST_CASE("list initialization picks the maximal representable D") {
    CHECK(PixelList(101).nodes().front().d == 6);
    CHECK(PixelList(1).nodes().front().d == 0);
    CHECK(PixelList(0).nodes().front().d == 0);
    CHECK(PixelList(0.25).nodes().front().d == 0);
    CHECK(PixelList(255).nodes().front().d == 7);
}

TEST_CASE("pixel list walkthrough: 101 over 20, 40 over 30, 25 over 30") {
    PixelList list(101);

    list.integrate(101, 20, kNoDtMax);
    {
        const auto& n = list.nodes();
        REQUIRE(n.size() == 2);
        CHECK(n[0].d == 7);
        CHECK(n[0].accum == doctest::Approx(101).epsilon(1e-9));
        CHECK(n[0].elapsed == doctest::Approx(20).epsilon(1e-9));
        REQUIRE(n[0].has_out());
        CHECK(n[0].out().d == 6);
        CHECK(n[0].out().delta_t == 12);
        CHECK(n[1].d == 6);
        CHECK(n[1].accum == doctest::Approx(37.0).epsilon(1e-9));
        CHECK(n[1].elapsed == doctest::Approx(37.0 / 101.0 * 20.0).epsilon(1e-9));
        CHECK_FALSE(n[1].has_out());
    }

    list.integrate(40, 30, kNoDtMax);
    {
        const auto& n = list.nodes();
        REQUIRE(n.size() == 2);  // old child replaced
        CHECK(n[0].d == 8);
        CHECK(n[0].accum == doctest::Approx(141).epsilon(1e-9));
        CHECK(n[0].elapsed == doctest::Approx(50).epsilon(1e-9));
        REQUIRE(n[0].has_out());
        CHECK(n[0].out().d == 7);
        CHECK(n[0].out().delta_t == 40);  // floor(20 + (27/40)*30)
        CHECK(n[1].d == 5);
        CHECK(n[1].accum == doctest::Approx(13.0).epsilon(1e-9));
        CHECK(n[1].elapsed == doctest::Approx(9.75).epsilon(1e-9));
    }

    list.integrate(25, 30, kNoDtMax);
    {
        const auto& n = list.nodes();
        REQUIRE(n.size() == 3);
        CHECK(n[0].d == 8);  // head did not reach 256
        CHECK(n[0].accum == doctest::Approx(166).epsilon(1e-9));
        CHECK(n[0].elapsed == doctest::Approx(80).epsilon(1e-9));
        CHECK(n[0].out().d == 7);
        CHECK(n[0].out().delta_t == 40);
        CHECK(n[1].d == 6);
        CHECK(n[1].accum == doctest::Approx(38).epsilon(1e-9));
        CHECK(n[1].elapsed == doctest::Approx(39.75).epsilon(1e-9));
        REQUIRE(n[1].has_out());
        CHECK(n[1].out().d == 5);
        CHECK(n[1].out().delta_t == 32);  // floor(9.75 + (19/25)*30)
        CHECK(n[2].d == 4);
        CHECK(n[2].accum == doctest::Approx(6).epsilon(1e-9));
        CHECK(n[2].elapsed == doctest::Approx(7.2).epsilon(1e-9));
        CHECK_FALSE(n[2].has_out());
    }

    // Dequeue order: head-most connection first.
    const auto events = list.flush(0.0);
    REQUIRE(events.size() == 2);
    CHECK(events[0] == PixelEventOut{7, 40});
    CHECK(events[1] == PixelEventOut{5, 32});
}

TEST_CASE("contrast check is strict and absolute") {
    PixelList list(100);
    CHECK_FALSE(list.should_flush(100, 0));
    CHECK(list.should_flush(141, 40));
    CHECK_FALSE(list.should_flush(140, 40));  // boundary: strict inequality
    CHECK(list.should_flush(59, 40));
    CHECK_FALSE(list.should_flush(60, 40));
}

TEST_CASE("flush of a fresh list emits the zero-intensity fallback") {
    PixelList list(0.0);
    list.integrate(0.0, 500.0, kNoDtMax);
    auto events = list.flush(0.0);
    REQUIRE(events.size() == 1);
    CHECK(events[0].d == kZeroD);
    CHECK(events[0].delta_t == 500);

    // Second flush with nothing integrated emits nothing.
    CHECK(list.flush(0.0).empty());
}

TEST_CASE("flush below one elapsed tick emits nothing") {
    PixelList list(0.0);
    list.integrate(0.0, 0.5, kNoDtMax);
    CHECK(list.flush(0.0).empty());
}

TEST_CASE("unsaturated accumulation flushes as a rate-preserving best fit") {
    PixelList list(100);
    // 40 units over 102 ticks: never reaches the 2^6 threshold.
    list.integrate(40.0, 102.0, kNoDtMax);
    auto events = list.flush(100);
    REQUIRE(events.size() == 1);
    CHECK(events[0].d == 5);  // floor(log2 40)
    // delta_t scaled so 2^5 / delta_t keeps the mean rate 40/102.
    CHECK(events[0].delta_t == static_cast<std::uint32_t>(std::lround(102.0 * 32.0 / 40.0)));
    const double decoded = 32.0 / events[0].delta_t;
    CHECK(decoded == doctest::Approx(40.0 / 102.0).epsilon(0.01));
}

TEST_CASE("zero-intensity input only advances elapsed") {
    PixelList list(100);
    list.integrate(100, 255, kNoDtMax);
    const auto before = list.nodes();
    list.integrate(0.0, 300.0, kNoDtMax);
    const auto& after = list.nodes();
    REQUIRE(after.size() == before.size());
    for (std::size_t i = 0; i < after.size(); ++i) {
        CHECK(after[i].accum == before[i].accum);
        CHECK(after[i].d == before[i].d);
        CHECK(after[i].elapsed == doctest::Approx(before[i].elapsed + 300.0));
    }
}

TEST_CASE("dt_max boundaries: constant unit rate yields exactly one flush per window") {
    const double dt_max = 4096;
    PixelList list(100);
    std::vector<PixelEventOut> events;
    std::size_t flushes = 0;
    double fed = 0;
    while (fed < 10 * dt_max) {
        flushes += integrate_clamped(list, 100.0, 100.0, dt_max, events);
        fed += 100.0;
    }
    CHECK(flushes == 10);
    // Unit rate, power-of-two window: each window collapses to one event
    // spanning exactly dt_max.
    REQUIRE(events.size() == 10);
    for (const auto& e : events) {
        CHECK(e.d == 12);
        CHECK(e.delta_t == 4096);
    }
}

TEST_CASE("halving dt_max doubles the event count on a static input") {
    auto run = [](double dt_max) {
        PixelList list(100);
        std::vector<PixelEventOut> events;
        double fed = 0;
        while (fed < 81920.0) {
            integrate_clamped(list, 100.0, 100.0, dt_max, events);
            fed += 100.0;
        }
        return events.size();
    };
    const auto full = run(4096);
    const auto half = run(2048);
    CHECK(half == 2 * full);
}

TEST_CASE("no emitted delta_t exceeds dt_max") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> ui(0.0, 300.0);
    std::uniform_real_distribution<double> us(1.0, 400.0);
    const double dt_max = 2000.0;
    PixelList list(150);
    std::vector<PixelEventOut> events;
    for (int i = 0; i < 500; ++i)
        integrate_clamped(list, ui(rng), us(rng), dt_max, events);
    auto tail = list.flush(0.0);
    events.insert(events.end(), tail.begin(), tail.end());
    for (const auto& e : events) CHECK(e.delta_t <= dt_max);
}

TEST_CASE("node suffix property holds under random integration") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ui(0.0, 260.0);
    std::uniform_real_distribution<double> us(0.5, 300.0);
    PixelList list(130);
    for (int i = 0; i < 300; ++i) {
        list.integrate(ui(rng), us(rng), kNoDtMax);
        const auto& n = list.nodes();
        for (std::size_t k = 1; k < n.size(); ++k) {
            CHECK(n[k - 1].accum >= n[k].accum - 1e-9);
            CHECK(n[k - 1].elapsed >= n[k].elapsed - 1e-9);
        }
        // Replacement property: every node carries at most one pending event
        // (structural), and only the tail lacks one.
        for (std::size_t k = 0; k + 1 < n.size(); ++k) CHECK(n[k].has_out());
        CHECK_FALSE(n.back().has_out());
    }
}

TEST_CASE("head event delta_t is non-decreasing over integration time") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ui(0.0, 260.0);
    PixelList list(130);
    std::uint32_t last = 0;
    for (int i = 0; i < 200; ++i) {
        list.integrate(ui(rng), 100.0, kNoDtMax);
        const auto& head = list.nodes().front();
        if (head.has_out()) {
            CHECK(head.out().delta_t >= last);
            last = head.out().delta_t;
        }
    }
}

TEST_CASE("identical input sequences produce identical event sequences") {
    auto run = [] {
        PixelList list(77);
        std::mt19937 rng(2024);
        std::uniform_real_distribution<double> ui(0.0, 255.0);
        std::uniform_real_distribution<double> us(0.5, 600.0);
        std::vector<PixelEventOut> events;
        for (int i = 0; i < 400; ++i)
            integrate_clamped(list, ui(rng), us(rng), 5000.0, events);
        auto tail = list.flush(0.0);
        events.insert(events.end(), tail.begin(), tail.end());
        return events;
    };
    CHECK(run() == run());
}

TEST_CASE("decoded mean matches a fine-grained scalar oracle at constant rate") {
    for (double value : {3.0, 17.0, 100.0, 200.0, 254.0}) {
        PixelList list(value);
        ScalarOracle oracle;
        for (int frame = 0; frame < 24; ++frame) {
            list.integrate(value, 255.0, kNoDtMax);
            oracle.feed(value, 255.0);
        }
        const auto events = list.flush(0.0);
        REQUIRE(!events.empty());
        double sum_units = 0, sum_ticks = 0;
        for (const auto& e : events) {
            sum_units += std::ldexp(1.0, e.d);
            sum_ticks += e.delta_t;
        }
        const double decoded_mean = sum_units / sum_ticks;
        CHECK(decoded_mean == doctest::Approx(oracle.mean()).epsilon(0.02));
    }
}
