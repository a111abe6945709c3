#include "saghs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "saghs/histogram.hpp"

namespace saghs {

namespace {

constexpr double kHarrisK = 0.04;
constexpr int kMaxCorners = 200;
constexpr int kDetectMargin = 8;       // corners cannot be localized closer to the edge
constexpr double kMatchRadius = 2.0;   // px

std::vector<double> luminance(const RgbImage& img) {
    std::vector<double> gray(img.pixel_count());
    for (std::size_t i = 0; i < gray.size(); ++i)
        gray[i] = 0.299 * img.data[i * 3] + 0.587 * img.data[i * 3 + 1] +
                  0.114 * img.data[i * 3 + 2];
    return gray;
}

// 5x5 Gaussian (sigma = 1) smoothing with border replication.
std::vector<double> gauss5(const std::vector<double>& src, int w, int h) {
    static const double k1d[5] = {0.054488684549642945, 0.24420134200323332,
                                  0.4026199468942474, 0.24420134200323332,
                                  0.054488684549642945};
    std::vector<double> tmp(src.size()), out(src.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int d = -2; d <= 2; ++d)
                s += k1d[d + 2] * src[static_cast<std::size_t>(y) * w + std::clamp(x + d, 0, w - 1)];
            tmp[static_cast<std::size_t>(y) * w + x] = s;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int d = -2; d <= 2; ++d)
                s += k1d[d + 2] * tmp[static_cast<std::size_t>(std::clamp(y + d, 0, h - 1)) * w + x];
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    return out;
}

}  // namespace

MetricsReport compute_metrics(const RgbImage& img) {
    if (img.pixel_count() == 0)
        throw std::invalid_argument("compute_metrics: empty image");

    MetricsReport rep;
    const double n = static_cast<double>(img.pixel_count());
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < img.pixel_count(); ++i)
            sum += img.data[i * 3 + c];
        const double mean = sum / n;
        double var = 0.0;
        for (std::size_t i = 0; i < img.pixel_count(); ++i) {
            const double d = img.data[i * 3 + c] - mean;
            var += d * d;
        }
        rep.mean[c] = mean;
        rep.rms_contrast[c] = std::sqrt(var / n);
        rep.entropy[c] = entropy(channel_stats(img, static_cast<Channel>(c)).hist);
    }
    rep.channel_imbalance = std::max({std::abs(rep.mean[0] - rep.mean[1]),
                                      std::abs(rep.mean[0] - rep.mean[2]),
                                      std::abs(rep.mean[1] - rep.mean[2])});
    return rep;
}

std::vector<CornerPoint> harris_corners(const RgbImage& img) {
    const int w = img.width, h = img.height;
    std::vector<CornerPoint> corners;
    if (w < 2 * kDetectMargin || h < 2 * kDetectMargin) return corners;

    const std::vector<double> gray = luminance(img);
    auto px = [&](int x, int y) {
        return gray[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
    };

    // Sobel gradients and structure tensor products.
    std::vector<double> ixx(gray.size()), iyy(gray.size()), ixy(gray.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
            const double gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            ixx[i] = gx * gx;
            iyy[i] = gy * gy;
            ixy[i] = gx * gy;
        }
    ixx = gauss5(ixx, w, h);
    iyy = gauss5(iyy, w, h);
    ixy = gauss5(ixy, w, h);

    std::vector<double> response(gray.size(), 0.0);
    double max_response = 0.0;
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const double det = ixx[i] * iyy[i] - ixy[i] * ixy[i];
        const double tr = ixx[i] + iyy[i];
        response[i] = det - kHarrisK * tr * tr;
        max_response = std::max(max_response, response[i]);
    }
    if (max_response <= 0.0) return corners;
    const double threshold = 1e-6 * max_response;

    // 3x3 non-max suppression; raster-order tie break keeps it deterministic.
    for (int y = kDetectMargin; y < h - kDetectMargin; ++y)
        for (int x = kDetectMargin; x < w - kDetectMargin; ++x) {
            const double r = response[static_cast<std::size_t>(y) * w + x];
            if (r < threshold) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const double rn = response[static_cast<std::size_t>(y + dy) * w + (x + dx)];
                    if (rn > r || (rn == r && (dy < 0 || (dy == 0 && dx < 0)))) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max)
                corners.push_back({static_cast<double>(x), static_cast<double>(y), r});
        }

    std::sort(corners.begin(), corners.end(), [](const CornerPoint& a, const CornerPoint& b) {
        if (a.response != b.response) return a.response > b.response;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    if (corners.size() > kMaxCorners) corners.resize(kMaxCorners);
    return corners;
}

RgbImage rotate_bilinear(const RgbImage& img, double degrees) {
    const int w = img.width, h = img.height;
    const double theta = degrees * std::numbers::pi / 180.0;
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;

    RgbImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            // Inverse map: rotate the destination point back by -theta.
            const double dx = x - cx, dy = y - cy;
            const double sx = dx * ct + dy * st + cx;
            const double sy = -dx * st + dy * ct + cy;
            if (sx < 0.0 || sy < 0.0 || sx > w - 1 || sy > h - 1) continue;
            const int x0 = std::min(static_cast<int>(sx), w - 2 >= 0 ? w - 2 : 0);
            const int y0 = std::min(static_cast<int>(sy), h - 2 >= 0 ? h - 2 : 0);
            const double fx = sx - x0, fy = sy - y0;
            for (int c = 0; c < 3; ++c) {
                const double v00 = img.at(x0, y0, c);
                const double v10 = img.at(std::min(x0 + 1, w - 1), y0, c);
                const double v01 = img.at(x0, std::min(y0 + 1, h - 1), c);
                const double v11 = img.at(std::min(x0 + 1, w - 1), std::min(y0 + 1, h - 1), c);
                out.at(x, y, c) = (v00 * (1 - fx) + v10 * fx) * (1 - fy) +
                                  (v01 * (1 - fx) + v11 * fx) * fy;
            }
        }
    return out;
}

RepeatabilityResult corner_repeatability(const RgbImage& img, double rotation_deg) {
    if (!(rotation_deg > 0.0 && rotation_deg <= 45.0))
        throw std::invalid_argument("corner_repeatability: rotation must be in (0, 45] degrees");

    const auto original = harris_corners(img);
    const RgbImage rotated = rotate_bilinear(img, rotation_deg);
    const auto found = harris_corners(rotated);

    const double theta = rotation_deg * std::numbers::pi / 180.0;
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;

    RepeatabilityResult res;
    for (const auto& p : original) {
        // Forward map of the corner into the rotated frame.
        const double dx = p.x - cx, dy = p.y - cy;
        const double rx = dx * ct - dy * st + cx;
        const double ry = dx * st + dy * ct + cy;
        if (rx < kDetectMargin || ry < kDetectMargin ||
            rx > img.width - 1 - kDetectMargin || ry > img.height - 1 - kDetectMargin)
            continue;  // left the detectable region
        ++res.corners_evaluated;
        for (const auto& q : found) {
            const double ddx = q.x - rx, ddy = q.y - ry;
            if (ddx * ddx + ddy * ddy <= kMatchRadius * kMatchRadius) {
                ++res.corners_matched;
                break;
            }
        }
    }
    res.sufficient = res.corners_evaluated >= 10;
    res.fraction = res.corners_evaluated > 0
                       ? static_cast<double>(res.corners_matched) / res.corners_evaluated
                       : 0.0;
    return res;
}

RepeatabilityComparison corner_repeatability(const RgbImage& original, const RgbImage& enhanced,
                                             double rotation_deg) {
    if (original.width != enhanced.width || original.height != enhanced.height)
        throw std::invalid_argument("corner_repeatability: image dimensions differ");
    return {corner_repeatability(original, rotation_deg),
            corner_repeatability(enhanced, rotation_deg)};
}

}  // namespace saghs
