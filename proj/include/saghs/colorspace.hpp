#pragma once

#include "saghs/image.hpp"

namespace saghs {

/// sRGB (D65) to CIE-Lab. L lands in [0, 100]; a and b are clamped to
/// [-128, 127], which every in-gamut sRGB color fits inside.
LabImage rgb_to_lab(const RgbImage& img);

/// Inverse of rgb_to_lab; out-of-gamut results are clamped to [0, 255].
RgbImage lab_to_rgb(const LabImage& img);

struct LStretchResult {
    LabImage image;
    double v_lo = 0.0;   // lower percentile actually used
    double v_hi = 0.0;   // upper percentile actually used
    bool degenerate = false;  // constant L, left unchanged
};

/// Linear stretch of L onto [0, 100] anchored at the clip_lo/clip_hi
/// percentiles (defaults 1% and 99%). a and b pass through.
LStretchResult stretch_l(const LabImage& lab, double clip_lo = 0.01, double clip_hi = 0.99);

/// The chroma S-curve x * phi^(1 - |x|/128), before clamping. Odd in x,
/// fixes 0 and +-128, and expands everything in between for phi > 1.
double s_curve_value(double x, double phi);

/// Apply the S-curve to a and b with output clamped to [-128, 127];
/// L passes through. phi must be in [1.2, 2.0].
LabImage s_curve_ab(const LabImage& lab, double phi);

struct ColorCorrectConfig {
    double phi = 1.3;        // valid range [1.2, 2.0]
    double l_clip_lo = 0.01;
    double l_clip_hi = 0.99;
};

struct ColorCorrectResult {
    RgbImage image;
    double l_lo = 0.0;
    double l_hi = 0.0;
    bool l_degenerate = false;
};

/// RGB -> Lab -> percentile L stretch -> chroma S-curve -> RGB.
ColorCorrectResult color_correct(const RgbImage& img, const ColorCorrectConfig& cfg);

}  // namespace saghs
