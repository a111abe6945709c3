#pragma once

#include <array>
#include <utility>

#include "saghs/contrast.hpp"
#include "saghs/image.hpp"
#include "saghs/metrics.hpp"

namespace saghs {

struct PipelineConfig {
    double clip = 0.005;                       // tail fraction for the stretch range
    double kappa = 1.0;                        // correction factor
    std::array<double, 3> t{0.83, 0.95, 0.97}; // per-channel transmission (R, G, B)
    double phi = 1.3;                          // chroma S-curve base
    bool bilateral_enabled = true;
    int bilateral_radius = 3;
    double bilateral_sigma_spatial = 3.0;
    double bilateral_sigma_range = 10.0;
    CoeffStrategy strategy = CoeffStrategy::Midpoint;
};

struct ChannelTrace {
    StretchParams params;
    bool degenerate = false;  // channel passed through unmodified
};

struct EnhancementTrace {
    double g_gain = 1.0;
    double b_gain = 1.0;
    bool gains_degenerate = false;  // zero-mean channel, gains forced to 1
    std::array<ChannelTrace, 3> channels;
    double l_lo = 0.0;
    double l_hi = 0.0;
    bool l_degenerate = false;
    MetricsReport pre;
    MetricsReport post;

    bool any_degenerate() const {
        return gains_degenerate || l_degenerate || channels[0].degenerate ||
               channels[1].degenerate || channels[2].degenerate;
    }
};

/// Stage 1: gray-world equalization of G/B, then the per-channel adaptive
/// stretch. Degenerate channels pass through and are flagged in the trace.
RgbImage contrast_stage(const RgbImage& img, const PipelineConfig& cfg, EnhancementTrace& trace);

/// Stage 2: CIE-Lab L stretch over the [1%, 99%] percentiles plus the
/// chroma S-curve, returned in RGB.
RgbImage color_stage(const RgbImage& img, const PipelineConfig& cfg, EnhancementTrace& trace);

/// The full two-stage enhancement; deterministic for identical inputs.
/// Never throws on degenerate content - such channels pass through flagged.
std::pair<RgbImage, EnhancementTrace> enhance(const RgbImage& img, const PipelineConfig& cfg);

}  // namespace saghs
