#include "saghs/pipeline.hpp"

#include <stdexcept>
#include <vector>

#include "saghs/colorspace.hpp"
#include "saghs/errors.hpp"
#include "saghs/histogram.hpp"

namespace saghs {

RgbImage contrast_stage(const RgbImage& img, const PipelineConfig& cfg,
                        EnhancementTrace& trace) {
    RgbImage work;
    try {
        const GrayWorldGains gains = gray_world_gains(img);
        trace.g_gain = gains.g;
        trace.b_gain = gains.b;
        work = apply_gain(img, gains.g, gains.b);
    } catch (const DegenerateChannelError&) {
        trace.gains_degenerate = true;
        trace.g_gain = 1.0;
        trace.b_gain = 1.0;
        work = img;
    }

    for (int c = 0; c < 3; ++c) {
        ChannelTrace& ct = trace.channels[c];
        const Channel ch = static_cast<Channel>(c);

        std::vector<double> values(work.pixel_count());
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] = work.data[i * 3 + c];
        std::vector<double> ascending = values;
        std::sort(ascending.begin(), ascending.end());

        const ChannelStats stats = channel_stats(ascending, ch);
        const ClippedRange range = clipped_range(stats, ascending, cfg.clip);
        if (range.degenerate) {
            ct.degenerate = true;
            ct.params.channel = ch;
            ct.params.i_min = range.i_min;
            ct.params.i_max = range.i_max;
            continue;  // constant channel passes through
        }

        ct.params = solve_stretch_params(stats, range.i_min, range.i_max, cfg.kappa,
                                         cfg.t[c], cfg.strategy);
        const std::vector<double> stretched = stretch_channel(values, ct.params);
        for (std::size_t i = 0; i < stretched.size(); ++i)
            work.data[i * 3 + c] = stretched[i];
    }
    return work;
}

RgbImage color_stage(const RgbImage& img, const PipelineConfig& cfg, EnhancementTrace& trace) {
    ColorCorrectConfig ccfg;
    ccfg.phi = cfg.phi;
    ColorCorrectResult res = color_correct(img, ccfg);
    trace.l_lo = res.l_lo;
    trace.l_hi = res.l_hi;
    trace.l_degenerate = res.l_degenerate;
    return std::move(res.image);
}

std::pair<RgbImage, EnhancementTrace> enhance(const RgbImage& img, const PipelineConfig& cfg) {
    if (img.pixel_count() == 0)
        throw std::invalid_argument("enhance: empty image");

    EnhancementTrace trace;
    trace.pre = compute_metrics(img);

    RgbImage work = contrast_stage(img, cfg, trace);
    if (cfg.bilateral_enabled)
        work = bilateral_filter(work, cfg.bilateral_sigma_spatial, cfg.bilateral_sigma_range,
                                cfg.bilateral_radius);
    work = color_stage(work, cfg, trace);

    trace.post = compute_metrics(work);
    return {std::move(work), trace};
}

}  // namespace saghs
