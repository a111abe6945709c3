#include <algorithm>
#include <random>
#include <vector>

#include <doctest.h>

#include "saghs/histogram.hpp"
#include "support/synthetic.hpp"

using namespace saghs;

namespace {

RgbImage image_from_channel(const std::vector<double>& values) {
    RgbImage img(static_cast<int>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
        img.data[i * 3 + 0] = values[i];
        img.data[i * 3 + 1] = values[i];
        img.data[i * 3 + 2] = values[i];
    }
    return img;
}

}  // namespace

TEST_CASE("mode and mode rank by direct count") {
    const RgbImage img = image_from_channel({5, 5, 7, 7, 7, 9});
    const ChannelStats s = channel_stats(img, Channel::R);
    CHECK(s.mode_value == 7.0);
    CHECK(s.mode_rank == 2);
    CHECK(s.sorted_len == 6);
    CHECK(s.hist[7] == 3);
    CHECK_FALSE(s.degenerate);
}

TEST_CASE("sigma is 0.655 times the mode") {
    std::vector<double> values(10, 100.0);
    values.push_back(50.0);  // avoid the degenerate flag
    const ChannelStats s = channel_stats(image_from_channel(values), Channel::G);
    CHECK(s.mode_value == 100.0);
    CHECK(s.sigma == doctest::Approx(65.5).epsilon(1e-12));
}

TEST_CASE("mode ties resolve to the lower bin") {
    const RgbImage img = image_from_channel({10, 10, 20, 20, 30});
    CHECK(channel_stats(img, Channel::B).mode_value == 10.0);
}

TEST_CASE("degenerate channel keeps its value and raises the flag") {
    const ChannelStats s = channel_stats(image_from_channel({42, 42, 42, 42}), Channel::R);
    CHECK(s.mode_value == 42.0);
    CHECK(s.degenerate);
}

TEST_CASE("mode rank uses the first value that rounds into the mode bin") {
    // 99.6 and 100.4 both round to 100; the run starts at sorted index 1.
    const RgbImage img = image_from_channel({50.0, 99.6, 100.4, 100.0, 180.0});
    const ChannelStats s = channel_stats(img, Channel::R);
    CHECK(s.mode_value == 100.0);
    CHECK(s.mode_rank == 1);
}

TEST_CASE("clipped range index arithmetic") {
    // 1000 ascending values with a 30-deep mode run starting at index 400.
    std::vector<double> sorted(1000);
    for (int i = 0; i < 400; ++i) sorted[i] = 0.1 * i;                 // up to 39.9
    for (int i = 400; i < 430; ++i) sorted[i] = 100.0;                 // the mode
    for (int i = 430; i < 1000; ++i) sorted[i] = 150.0 + 0.1 * (i - 430);

    ChannelStats stats = channel_stats(sorted, Channel::R);
    REQUIRE(stats.mode_value == 100.0);
    REQUIRE(stats.mode_rank == 400);

    const ClippedRange r = clipped_range(stats, sorted, 0.005);
    // floor(400 * 0.005) = 2 below the mode; floor(600 * 0.005) = 3 from the top.
    CHECK(r.i_min == sorted[2]);
    CHECK(r.i_max == sorted[997]);
    CHECK_FALSE(r.degenerate);
}

TEST_CASE("vanishing clip keeps the full range") {
    std::vector<double> sorted(200);
    for (int i = 0; i < 200; ++i) sorted[i] = i;
    const ChannelStats stats = channel_stats(sorted, Channel::R);
    const ClippedRange r = clipped_range(stats, sorted, 1e-9);
    CHECK(r.i_min == sorted.front());
    CHECK(r.i_max == sorted.back());
}

TEST_CASE("constant channel reports the degenerate condition") {
    const std::vector<double> sorted(64, 9.0);
    const ChannelStats stats = channel_stats(sorted, Channel::R);
    const ClippedRange r = clipped_range(stats, sorted, 0.005);
    CHECK(r.i_min == 9.0);
    CHECK(r.i_max == 9.0);
    CHECK(r.degenerate);
}

TEST_CASE("clipped range stays within the channel extremes") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> value(0.0, 255.0);
    std::uniform_real_distribution<double> clip(0.001, 0.49);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> sorted(1 + rng() % 5000);
        for (auto& v : sorted) v = value(rng);
        std::sort(sorted.begin(), sorted.end());
        const ChannelStats stats = channel_stats(sorted, Channel::R);
        const ClippedRange r = clipped_range(stats, sorted, clip(rng));
        CHECK(r.i_min >= sorted.front());
        CHECK(r.i_max <= sorted.back());
        CHECK(r.i_min <= r.i_max);
    }
}

TEST_CASE("entropy of reference histograms") {
    std::array<std::uint64_t, 256> hist{};
    hist[40] = 1234;
    CHECK(entropy(hist) == doctest::Approx(0.0));

    hist.fill(3);
    CHECK(entropy(hist) == doctest::Approx(8.0).epsilon(1e-12));

    hist.fill(0);
    hist[10] = 500;
    hist[200] = 500;
    CHECK(entropy(hist) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entropy ignores bin positions and total scale") {
    std::mt19937 rng(5);
    std::array<std::uint64_t, 256> hist{};
    for (auto& c : hist) c = rng() % 100;
    hist[0] += 1;  // non-empty

    std::array<std::uint64_t, 256> shuffled = hist;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(entropy(hist) == doctest::Approx(entropy(shuffled)).epsilon(1e-12));

    std::array<std::uint64_t, 256> scaled;
    for (std::size_t i = 0; i < 256; ++i) scaled[i] = hist[i] * 7;
    CHECK(entropy(hist) == doctest::Approx(entropy(scaled)).epsilon(1e-12));
}
