#include "saghs/image.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <memory>

#include <jpeglib.h>
#include <png.h>

#include "saghs/errors.hpp"

namespace saghs {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

RgbImage from_bytes(int w, int h, const std::vector<unsigned char>& rgb) {
    RgbImage img(w, h);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<double>(rgb[i]);
    return img;
}

// Default libpng handlers print to stderr before bailing out; stay quiet and
// just unwind.
void png_quiet_error(png_structp png, png_const_charp) { png_longjmp(png, 1); }
void png_quiet_warning(png_structp, png_const_charp) {}

RgbImage load_png(std::FILE* f, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_quiet_error,
                                             png_quiet_warning);
    if (!png) throw FormatError(path + ": png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw FormatError(path + ": png init failed");
    }

    std::vector<unsigned char> pixels;
    std::vector<png_bytep> rows;
    int w = 0, h = 0;
    bool had_alpha = false;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path + ": malformed PNG");
    }

    png_init_io(png, f);
    png_read_info(png, info);

    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    if (w < 1 || h < 1) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path + ": zero-dimension image");
    }

    int color_type = png_get_color_type(png, info);
    had_alpha = (color_type & PNG_COLOR_MASK_ALPHA) != 0 ||
                png_get_valid(png, info, PNG_INFO_tRNS);

    // Normalize everything to 8-bit RGB.
    png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    pixels.resize(static_cast<std::size_t>(w) * h * 3);
    rows.resize(h);
    for (int y = 0; y < h; ++y)
        rows[y] = pixels.data() + static_cast<std::size_t>(y) * w * 3;

    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (had_alpha)
        std::cerr << "warning: " << path << ": alpha channel dropped\n";

    return from_bytes(w, h, pixels);
}

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(mgr->jump, 1);
}

RgbImage load_jpeg(std::FILE* f, const std::string& path) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;

    std::vector<unsigned char> pixels;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw FormatError(path + ": malformed JPEG");
    }

    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, f);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    const int w = static_cast<int>(cinfo.output_width);
    const int h = static_cast<int>(cinfo.output_height);
    if (w < 1 || h < 1) {
        jpeg_destroy_decompress(&cinfo);
        throw FormatError(path + ": zero-dimension image");
    }

    pixels.resize(static_cast<std::size_t>(w) * h * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        unsigned char* row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);

    return from_bytes(w, h, pixels);
}

}  // namespace

RgbImage load_image(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError(path + ": cannot open for reading");

    unsigned char magic[8] = {};
    std::size_t n = std::fread(magic, 1, sizeof magic, f.get());
    std::rewind(f.get());

    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (n >= 8 && std::memcmp(magic, png_sig, 8) == 0)
        return load_png(f.get(), path);
    if (n >= 2 && magic[0] == 0xff && magic[1] == 0xd8)
        return load_jpeg(f.get(), path);
    throw FormatError(path + ": not a PNG or JPEG file");
}

void save_image(const RgbImage& img, const std::string& path) {
    if (img.width < 1 || img.height < 1)
        throw FormatError(path + ": refusing to write zero-dimension image");

    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError(path + ": cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_quiet_error,
                                              png_quiet_warning);
    if (!png) throw IoError(path + ": png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError(path + ": png init failed");
    }

    std::vector<unsigned char> bytes(img.data.size());
    std::vector<png_bytep> rows(img.height);

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError(path + ": png write failed");
    }

    // Round half-away-from-zero, then clamp to the byte range.
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        long long v = std::llround(img.data[i]);
        bytes[i] = static_cast<unsigned char>(std::clamp<long long>(v, 0, 255));
    }
    for (int y = 0; y < img.height; ++y)
        rows[y] = bytes.data() + static_cast<std::size_t>(y) * img.width * 3;

    png_init_io(png, f.get());
    png_set_compression_level(png, 6);  // fixed level keeps outputs byte-stable
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace saghs
