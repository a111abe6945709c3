#pragma once

#include <array>
#include <optional>
#include <vector>

#include "saghs/image.hpp"

namespace saghs {

struct MetricsReport {
    std::array<double, 3> entropy{};       // bits, per channel
    std::array<double, 3> rms_contrast{};  // std dev of channel values
    std::array<double, 3> mean{};
    double channel_imbalance = 0.0;        // max pairwise |mean_i - mean_j|
    std::optional<double> corner_repeatability;

    double mean_entropy() const { return (entropy[0] + entropy[1] + entropy[2]) / 3.0; }
    double mean_rms_contrast() const {
        return (rms_contrast[0] + rms_contrast[1] + rms_contrast[2]) / 3.0;
    }
};

/// Histogram/moment statistics; invariant to pixel order.
MetricsReport compute_metrics(const RgbImage& img);

struct CornerPoint {
    double x = 0.0;
    double y = 0.0;
    double response = 0.0;
};

/// Harris corners (k = 0.04) on the image's luminance: strongest 200
/// responses surviving a 3x3 non-maximum suppression, deterministic order.
std::vector<CornerPoint> harris_corners(const RgbImage& img);

/// Rotate about the image center with bilinear interpolation; same output
/// dimensions, uncovered regions are black.
RgbImage rotate_bilinear(const RgbImage& img, double degrees);

struct RepeatabilityResult {
    double fraction = 0.0;   // matched / evaluated
    int corners_evaluated = 0;
    int corners_matched = 0;
    bool sufficient = false;  // at least 10 corners entered the measure
};

/// Fraction of detected corners that re-appear within 2 px of their rotated
/// position when the image is rotated by rotation_deg. Corners whose rotated
/// position leaves the detectable region are excluded from the denominator.
RepeatabilityResult corner_repeatability(const RgbImage& img, double rotation_deg);

struct RepeatabilityComparison {
    RepeatabilityResult original;
    RepeatabilityResult enhanced;
};

/// The same measure on both images of an enhancement pair.
RepeatabilityComparison corner_repeatability(const RgbImage& original, const RgbImage& enhanced,
                                             double rotation_deg);

}  // namespace saghs
