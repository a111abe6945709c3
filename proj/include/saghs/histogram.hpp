#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "saghs/image.hpp"

namespace saghs {

/// Per-channel distribution summary. The histogram counts integer-rounded
/// values; the mode doubles as the Rayleigh scale parameter with
/// sigma = 0.655 * mode.
struct ChannelStats {
    Channel channel = Channel::R;
    std::array<std::uint64_t, 256> hist{};
    double mode_value = 0.0;       // lowest bin wins ties
    double sigma = 0.0;            // 0.655 * mode_value
    std::size_t sorted_len = 0;
    std::size_t mode_rank = 0;     // first index of the mode in the ascending ordering
    bool degenerate = false;       // all samples identical
};

/// Ascending copy of one channel's values.
std::vector<double> sorted_channel(const RgbImage& img, Channel ch);

ChannelStats channel_stats(const RgbImage& img, Channel ch);

/// Same, but over an already-sorted value array (ascending).
ChannelStats channel_stats(std::span<const double> sorted_values, Channel ch);

struct ClippedRange {
    double i_min = 0.0;
    double i_max = 0.0;
    bool degenerate = false;  // constant channel: i_min == i_max
};

/// Percentile clipping split at the mode: the lower tail keeps clip of the
/// pixels below the mode rank, the upper tail clip of those above it.
/// Requires 0 < clip < 0.5 and sorted_pixels.size() == stats.sorted_len.
ClippedRange clipped_range(const ChannelStats& stats, std::span<const double> sorted_pixels,
                           double clip);

/// Shannon entropy of a count histogram, in bits. Total count must be > 0.
double entropy(std::span<const std::uint64_t> hist);

}  // namespace saghs
