#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace saghs {

enum class Channel { R = 0, G = 1, B = 2 };

inline const char* channel_name(Channel c) {
    switch (c) {
        case Channel::R: return "R";
        case Channel::G: return "G";
        default: return "B";
    }
}

/// Interleaved RGB image. Channel values are real-valued on the [0, 255]
/// scale; quantization to bytes happens only in save_image.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // row-major, r g b per pixel

    RgbImage() = default;
    RgbImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    double& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
};

/// L in [0, 100], a and b in [-128, 127], interleaved row-major.
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // row-major, L a b per pixel

    LabImage() = default;
    LabImage(int w, int h)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0.0) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    double& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
};

/// Decode a PNG or JPEG file. 8-bit samples map to their integer values
/// exactly; an alpha channel is dropped with a warning on stderr.
/// Throws IoError (unreadable) or FormatError (unsupported/malformed).
RgbImage load_image(const std::string& path);

/// Encode as 8-bit RGB PNG. Values are rounded half-away-from-zero and
/// clamped to [0, 255]. Throws IoError when the path is unwritable.
void save_image(const RgbImage& img, const std::string& path);

}  // namespace saghs
