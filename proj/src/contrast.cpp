#include "saghs/contrast.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "saghs/errors.hpp"

namespace saghs {

namespace {

constexpr double kGray = 0.5 * 255.0;  // gray-world target, K = 0.5
constexpr double kRangeEps = 1e-3;     // keeps o_min < i_min and o_max > i_max after clamps
constexpr double kFallbackExpansion = 0.1;

double channel_mean(const RgbImage& img, int c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        sum += img.data[i * 3 + c];
    return sum / static_cast<double>(img.pixel_count());
}

double pick_in_interval(double lo, double hi, CoeffStrategy s) {
    switch (s) {
        case CoeffStrategy::Lower: return lo;
        case CoeffStrategy::Upper: return hi;
        default: return 0.5 * (lo + hi);
    }
}

}  // namespace

const char* coeff_strategy_name(CoeffStrategy s) {
    switch (s) {
        case CoeffStrategy::Lower: return "lower";
        case CoeffStrategy::Upper: return "upper";
        default: return "midpoint";
    }
}

CoeffStrategy parse_coeff_strategy(const std::string& name) {
    if (name == "midpoint") return CoeffStrategy::Midpoint;
    if (name == "lower") return CoeffStrategy::Lower;
    if (name == "upper") return CoeffStrategy::Upper;
    throw std::invalid_argument("unknown coefficient strategy: " + name);
}

GrayWorldGains gray_world_gains(const RgbImage& img) {
    if (img.pixel_count() == 0)
        throw std::invalid_argument("gray_world_gains: empty image");
    const double mean_g = channel_mean(img, 1);
    const double mean_b = channel_mean(img, 2);
    if (mean_g <= 0.0)
        throw DegenerateChannelError("gray_world_gains: G channel mean is zero");
    if (mean_b <= 0.0)
        throw DegenerateChannelError("gray_world_gains: B channel mean is zero");
    return {kGray / mean_g, kGray / mean_b};
}

RgbImage apply_gain(const RgbImage& img, double g_gain, double b_gain) {
    if (g_gain <= 0.0 || b_gain <= 0.0)
        throw std::invalid_argument("apply_gain: gains must be positive");
    RgbImage out = img;
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        out.data[i * 3 + 1] = std::clamp(out.data[i * 3 + 1] * g_gain, 0.0, 255.0);
        out.data[i * 3 + 2] = std::clamp(out.data[i * 3 + 2] * b_gain, 0.0, 255.0);
    }
    return out;
}

StretchParams solve_stretch_params(const ChannelStats& stats, double i_min, double i_max,
                                   double kappa, double t, CoeffStrategy strategy) {
    if (!(i_min < i_max))
        throw DegenerateChannelError("solve_stretch_params: degenerate input range");
    if (!(kappa > 0.0) || !(t > 0.0 && t <= 1.0))
        throw std::invalid_argument("solve_stretch_params: kappa must be > 0 and t in (0, 1]");

    StretchParams p;
    p.channel = stats.channel;
    p.i_min = i_min;
    p.i_max = i_max;
    p.kappa = kappa;
    p.t = t;

    const double a = stats.mode_value;
    const double sigma = stats.sigma;
    const bool usable_mode = sigma > 0.0;

    // Minimum side: o_min = a - beta*sigma must land in (0, i_min), so
    // beta ranges over ((a - i_min)/sigma, a/sigma). Empty iff i_min <= 0.
    double o_min;
    if (usable_mode && i_min > 0.0) {
        const double beta = pick_in_interval((a - i_min) / sigma, a / sigma, strategy);
        o_min = a - beta * sigma;
    } else {
        o_min = i_min - kFallbackExpansion * (i_max - i_min);
        p.fallback = true;
    }
    o_min = std::clamp(o_min, 0.0, std::max(0.0, i_min - kRangeEps));

    // Maximum side: o_max = (a + mu*sigma)/(kappa*t) must land in (i_max, 255],
    // so mu ranges over ((kt*i_max - a)/sigma, (kt*255 - a)/sigma]. Empty iff
    // i_max >= 255.
    const double kt = kappa * t;
    double o_max;
    if (usable_mode && i_max < 255.0) {
        const double mu = pick_in_interval((kt * i_max - a) / sigma, (kt * 255.0 - a) / sigma,
                                           strategy);
        o_max = (a + mu * sigma) / kt;
    } else {
        o_max = i_max + kFallbackExpansion * (i_max - i_min);
        p.fallback = true;
    }
    o_max = std::clamp(o_max, std::min(255.0, i_max + kRangeEps), 255.0);

    p.o_min = o_min;
    p.o_max = o_max;
    // Back-solve the coefficients from the final range so the algebraic
    // inverses hold for clamped and fallback results too.
    if (usable_mode) {
        p.beta = (a - o_min) / sigma;
        p.mu = (kt * o_max - a) / sigma;
    }
    return p;
}

double stretch_value(double v, const StretchParams& p) {
    return (v - p.i_min) * ((p.o_max - p.o_min) / (p.i_max - p.i_min)) + p.o_min;
}

std::vector<double> stretch_channel(std::span<const double> pixels, const StretchParams& p) {
    if (!(p.i_min < p.i_max) || !(p.o_min < p.o_max))
        throw DegenerateChannelError("stretch_channel: degenerate params");
    std::vector<double> out(pixels.size());
    const double slope = (p.o_max - p.o_min) / (p.i_max - p.i_min);
    for (std::size_t i = 0; i < pixels.size(); ++i)
        out[i] = std::clamp((pixels[i] - p.i_min) * slope + p.o_min, 0.0, 255.0);
    return out;
}

RgbImage bilateral_filter(const RgbImage& img, double sigma_spatial, double sigma_range,
                          int radius) {
    if (!(sigma_spatial > 0.0) || !(sigma_range > 0.0) || radius < 1)
        throw std::invalid_argument("bilateral_filter: sigmas must be > 0 and radius >= 1");

    const int w = img.width, h = img.height;
    const int k = 2 * radius + 1;

    std::vector<double> spatial(static_cast<std::size_t>(k) * k);
    const double inv2ss = 1.0 / (2.0 * sigma_spatial * sigma_spatial);
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            spatial[(dy + radius) * k + (dx + radius)] =
                std::exp(-(dx * dx + dy * dy) * inv2ss);

    // Range kernel via a linearly interpolated table over |dv| in [0, 255];
    // max interpolation error is ~5e-7 of the exact Gaussian, well under the
    // quantization of the final 8-bit output.
    constexpr int kLutSize = 8192;
    std::vector<double> lut(kLutSize + 2);
    const double inv2sr = 1.0 / (2.0 * sigma_range * sigma_range);
    const double lut_scale = kLutSize / 255.0;
    for (int i = 0; i <= kLutSize + 1; ++i) {
        const double dv = i / lut_scale;
        lut[i] = std::exp(-dv * dv * inv2sr);
    }

    RgbImage out(w, h);
    std::vector<double> plane(static_cast<std::size_t>(w) * h);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < plane.size(); ++i)
            plane[i] = img.data[i * 3 + c];
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double center = plane[static_cast<std::size_t>(y) * w + x];
                double weight_sum = 0.0, value_sum = 0.0;
                for (int dy = -radius; dy <= radius; ++dy) {
                    const int yy = std::clamp(y + dy, 0, h - 1);
                    const double* row = plane.data() + static_cast<std::size_t>(yy) * w;
                    const double* srow = spatial.data() + static_cast<std::size_t>(dy + radius) * k;
                    for (int dx = -radius; dx <= radius; ++dx) {
                        const int xx = std::clamp(x + dx, 0, w - 1);
                        const double v = row[xx];
                        const double dv = std::min(std::abs(v - center), 255.0) * lut_scale;
                        const int bin = static_cast<int>(dv);
                        const double frac = dv - bin;
                        const double wgt = srow[dx + radius] *
                                           (lut[bin] + frac * (lut[bin + 1] - lut[bin]));
                        weight_sum += wgt;
                        value_sum += wgt * v;
                    }
                }
                out.data[(static_cast<std::size_t>(y) * w + x) * 3 + c] = value_sum / weight_sum;
            }
        }
    }
    return out;
}

}  // namespace saghs
