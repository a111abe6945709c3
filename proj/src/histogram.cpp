#include "saghs/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "saghs/errors.hpp"

namespace saghs {

namespace {

int round_to_bin(double v) {
    long long r = std::llround(v);
    return static_cast<int>(std::clamp<long long>(r, 0, 255));
}

}  // namespace

std::vector<double> sorted_channel(const RgbImage& img, Channel ch) {
    std::vector<double> values(img.pixel_count());
    const int c = static_cast<int>(ch);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = img.data[i * 3 + c];
    std::sort(values.begin(), values.end());
    return values;
}

ChannelStats channel_stats(const RgbImage& img, Channel ch) {
    return channel_stats(sorted_channel(img, ch), ch);
}

ChannelStats channel_stats(std::span<const double> sorted_values, Channel ch) {
    if (sorted_values.empty())
        throw std::invalid_argument("channel_stats: empty channel");

    ChannelStats s;
    s.channel = ch;
    s.sorted_len = sorted_values.size();

    for (double v : sorted_values)
        ++s.hist[round_to_bin(v)];

    // Mode = bin with the maximal count; lowest bin value wins ties.
    int mode_bin = 0;
    std::uint64_t best = 0;
    for (int b = 0; b < 256; ++b) {
        if (s.hist[b] > best) {
            best = s.hist[b];
            mode_bin = b;
        }
    }
    s.mode_value = static_cast<double>(mode_bin);
    s.sigma = 0.655 * s.mode_value;
    s.degenerate = sorted_values.front() == sorted_values.back();

    // Values rounding to the mode form a contiguous run in the ascending
    // ordering; mode_rank is the first index of that run.
    const double run_start = mode_bin == 0 ? 0.0 : s.mode_value - 0.5;
    auto it = std::lower_bound(sorted_values.begin(), sorted_values.end(), run_start);
    s.mode_rank = static_cast<std::size_t>(it - sorted_values.begin());
    if (s.mode_rank >= s.sorted_len) s.mode_rank = s.sorted_len - 1;
    return s;
}

ClippedRange clipped_range(const ChannelStats& stats, std::span<const double> sorted_pixels,
                           double clip) {
    if (sorted_pixels.size() != stats.sorted_len)
        throw std::invalid_argument("clipped_range: array length does not match stats");
    if (!(clip > 0.0 && clip < 0.5))
        throw std::invalid_argument("clipped_range: clip must be in (0, 0.5)");

    const std::size_t n = sorted_pixels.size();
    const std::size_t lo = static_cast<std::size_t>(
        std::floor(static_cast<double>(stats.mode_rank) * clip));
    // Upper tail counts from the end of the array; zero clip keeps the last
    // element rather than wrapping to the front.
    std::size_t hi_off = static_cast<std::size_t>(
        std::floor(static_cast<double>(n - stats.mode_rank) * clip));
    if (hi_off < 1) hi_off = 1;

    std::size_t lo_idx = std::min(lo, n - 1);
    std::size_t hi_idx = n - hi_off;
    if (hi_idx < lo_idx) hi_idx = lo_idx;

    ClippedRange r;
    r.i_min = sorted_pixels[lo_idx];
    r.i_max = sorted_pixels[hi_idx];
    r.degenerate = r.i_min == r.i_max;
    return r;
}

double entropy(std::span<const std::uint64_t> hist) {
    std::uint64_t total = 0;
    for (auto c : hist) total += c;
    if (total == 0)
        throw std::invalid_argument("entropy: empty histogram");

    double h = 0.0;
    const double inv_total = 1.0 / static_cast<double>(total);
    for (auto c : hist) {
        if (c == 0) continue;
        double p = static_cast<double>(c) * inv_total;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace saghs
