#include "saghs/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace saghs {

namespace {

// sRGB primaries with the D65 white point (IEC 61966-2-1).
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};
constexpr double kXyzToRgb[3][3] = {
    {3.2404542, -1.5371385, -0.4985314},
    {-0.9692660, 1.8760108, 0.0415560},
    {0.0556434, -0.2040259, 1.0572252},
};
constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.00000;
constexpr double kWhiteZ = 1.08883;

constexpr double kLabEps = 216.0 / 24389.0;   // (6/29)^3
constexpr double kLabKappa = 24389.0 / 27.0;  // (29/3)^3

double srgb_to_linear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) {
    return t > kLabEps ? std::cbrt(t) : (kLabKappa * t + 16.0) / 116.0;
}

double lab_f_inv(double t) {
    const double t3 = t * t * t;
    return t3 > kLabEps ? t3 : (116.0 * t - 16.0) / kLabKappa;
}

}  // namespace

LabImage rgb_to_lab(const RgbImage& img) {
    LabImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const double r = srgb_to_linear(img.data[i * 3 + 0] / 255.0);
        const double g = srgb_to_linear(img.data[i * 3 + 1] / 255.0);
        const double b = srgb_to_linear(img.data[i * 3 + 2] / 255.0);

        const double x = kRgbToXyz[0][0] * r + kRgbToXyz[0][1] * g + kRgbToXyz[0][2] * b;
        const double y = kRgbToXyz[1][0] * r + kRgbToXyz[1][1] * g + kRgbToXyz[1][2] * b;
        const double z = kRgbToXyz[2][0] * r + kRgbToXyz[2][1] * g + kRgbToXyz[2][2] * b;

        const double fx = lab_f(x / kWhiteX);
        const double fy = lab_f(y / kWhiteY);
        const double fz = lab_f(z / kWhiteZ);

        out.data[i * 3 + 0] = std::clamp(116.0 * fy - 16.0, 0.0, 100.0);
        out.data[i * 3 + 1] = std::clamp(500.0 * (fx - fy), -128.0, 127.0);
        out.data[i * 3 + 2] = std::clamp(200.0 * (fy - fz), -128.0, 127.0);
    }
    return out;
}

RgbImage lab_to_rgb(const LabImage& img) {
    RgbImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const double l = img.data[i * 3 + 0];
        const double a = img.data[i * 3 + 1];
        const double b = img.data[i * 3 + 2];

        const double fy = (l + 16.0) / 116.0;
        const double fx = fy + a / 500.0;
        const double fz = fy - b / 200.0;

        const double x = kWhiteX * lab_f_inv(fx);
        const double y = kWhiteY * (l > kLabKappa * kLabEps ? fy * fy * fy : l / kLabKappa);
        const double z = kWhiteZ * lab_f_inv(fz);

        const double rl = kXyzToRgb[0][0] * x + kXyzToRgb[0][1] * y + kXyzToRgb[0][2] * z;
        const double gl = kXyzToRgb[1][0] * x + kXyzToRgb[1][1] * y + kXyzToRgb[1][2] * z;
        const double bl = kXyzToRgb[2][0] * x + kXyzToRgb[2][1] * y + kXyzToRgb[2][2] * z;

        out.data[i * 3 + 0] = std::clamp(linear_to_srgb(std::max(rl, 0.0)) * 255.0, 0.0, 255.0);
        out.data[i * 3 + 1] = std::clamp(linear_to_srgb(std::max(gl, 0.0)) * 255.0, 0.0, 255.0);
        out.data[i * 3 + 2] = std::clamp(linear_to_srgb(std::max(bl, 0.0)) * 255.0, 0.0, 255.0);
    }
    return out;
}

LStretchResult stretch_l(const LabImage& lab, double clip_lo, double clip_hi) {
    if (lab.pixel_count() == 0)
        throw std::invalid_argument("stretch_l: empty image");
    if (!(clip_lo >= 0.0 && clip_lo < clip_hi && clip_hi <= 1.0))
        throw std::invalid_argument("stretch_l: need 0 <= clip_lo < clip_hi <= 1");

    const std::size_t n = lab.pixel_count();
    std::vector<double> l_sorted(n);
    for (std::size_t i = 0; i < n; ++i)
        l_sorted[i] = lab.data[i * 3];
    std::sort(l_sorted.begin(), l_sorted.end());

    auto percentile = [&](double q) {
        const std::size_t idx = std::min(
            n - 1, static_cast<std::size_t>(std::floor(q * static_cast<double>(n))));
        return l_sorted[idx];
    };

    LStretchResult res;
    res.image = lab;
    res.v_lo = percentile(clip_lo);
    res.v_hi = percentile(clip_hi);
    if (!(res.v_hi > res.v_lo)) {
        res.degenerate = true;
        return res;
    }

    const double scale = 100.0 / (res.v_hi - res.v_lo);
    for (std::size_t i = 0; i < n; ++i) {
        double& l = res.image.data[i * 3];
        l = std::clamp((l - res.v_lo) * scale, 0.0, 100.0);
    }
    return res;
}

double s_curve_value(double x, double phi) {
    return x * std::pow(phi, 1.0 - std::abs(x / 128.0));
}

LabImage s_curve_ab(const LabImage& lab, double phi) {
    if (!(phi >= 1.2 && phi <= 2.0))
        throw std::invalid_argument("s_curve_ab: phi must be in [1.2, 2.0]");
    LabImage out = lab;
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        out.data[i * 3 + 1] = std::clamp(s_curve_value(out.data[i * 3 + 1], phi), -128.0, 127.0);
        out.data[i * 3 + 2] = std::clamp(s_curve_value(out.data[i * 3 + 2], phi), -128.0, 127.0);
    }
    return out;
}

ColorCorrectResult color_correct(const RgbImage& img, const ColorCorrectConfig& cfg) {
    const LabImage lab = rgb_to_lab(img);
    LStretchResult stretched = stretch_l(lab, cfg.l_clip_lo, cfg.l_clip_hi);
    const LabImage curved = s_curve_ab(stretched.image, cfg.phi);

    ColorCorrectResult res;
    res.image = lab_to_rgb(curved);
    res.l_lo = stretched.v_lo;
    res.l_hi = stretched.v_hi;
    res.l_degenerate = stretched.degenerate;
    return res;
}

}  // namespace saghs
