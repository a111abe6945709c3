#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "saghs/colorspace.hpp"
#include "saghs/image.hpp"

using namespace saghs;

namespace {

RgbImage single_pixel(double r, double g, double b) {
    RgbImage img(1, 1);
    img.data = {r, g, b};
    return img;
}

LabImage lab_from_l(const std::vector<double>& l_values) {
    LabImage lab(static_cast<int>(l_values.size()), 1);
    for (std::size_t i = 0; i < l_values.size(); ++i) {
        lab.data[i * 3 + 0] = l_values[i];
        lab.data[i * 3 + 1] = 5.0;
        lab.data[i * 3 + 2] = -7.0;
    }
    return lab;
}

}  // namespace

TEST_CASE("white and black anchor the Lab scale") {
    const LabImage white = rgb_to_lab(single_pixel(255, 255, 255));
    CHECK(white.data[0] == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(std::abs(white.data[1]) < 0.01);
    CHECK(std::abs(white.data[2]) < 0.01);

    const LabImage black = rgb_to_lab(single_pixel(0, 0, 0));
    CHECK(black.data[0] == doctest::Approx(0.0));
    CHECK(black.data[1] == doctest::Approx(0.0));
    CHECK(black.data[2] == doctest::Approx(0.0));
}

TEST_CASE("pure red against the standard reference values") {
    const LabImage red = rgb_to_lab(single_pixel(255, 0, 0));
    CHECK(std::abs(red.data[0] - 53.24) < 0.05);
    CHECK(std::abs(red.data[1] - 80.09) < 0.05);
    CHECK(std::abs(red.data[2] - 67.20) < 0.05);
}

TEST_CASE("lab to rgb inverts the white and black anchors") {
    LabImage lab(1, 1);
    lab.data = {100.0, 0.0, 0.0};
    const RgbImage white = lab_to_rgb(lab);
    for (double v : white.data) CHECK(std::abs(v - 255.0) < 0.01);

    lab.data = {0.0, 0.0, 0.0};
    const RgbImage black = lab_to_rgb(lab);
    for (double v : black.data) CHECK(std::abs(v) < 0.01);
}

TEST_CASE("round trip over random in-gamut pixels") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(0.0, 255.0);
    RgbImage img(1000, 1);
    for (auto& v : img.data) v = u(rng);
    const RgbImage back = lab_to_rgb(rgb_to_lab(img));
    double worst = 0.0;
    for (std::size_t i = 0; i < img.data.size(); ++i)
        worst = std::max(worst, std::abs(back.data[i] - img.data[i]));
    CHECK(worst < 0.01);
}

TEST_CASE("L stretch is the identity when the percentiles span the full range") {
    std::vector<double> l;
    l.insert(l.end(), 3, 0.0);
    for (int i = 1; i < 97; ++i) l.push_back(100.0 * i / 97.0);
    l.insert(l.end(), 3, 100.0);
    const LStretchResult res = stretch_l(lab_from_l(l));
    REQUIRE_FALSE(res.degenerate);
    CHECK(res.v_lo == 0.0);
    CHECK(res.v_hi == 100.0);
    for (std::size_t i = 0; i < l.size(); ++i)
        CHECK(res.image.data[i * 3] == doctest::Approx(l[i]).epsilon(1e-12));
}

TEST_CASE("L stretch expands a compressed band to the percentile anchors") {
    std::vector<double> l(500);
    for (std::size_t i = 0; i < l.size(); ++i)
        l[i] = 20.0 + 60.0 * static_cast<double>(i) / (l.size() - 1);
    const LStretchResult res = stretch_l(lab_from_l(l));
    REQUIRE_FALSE(res.degenerate);

    // The values that sat at the percentile anchors now sit at 0 and 100.
    std::vector<double> out(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) out[i] = res.image.data[i * 3];
    std::sort(out.begin(), out.end());
    const std::size_t lo_idx = static_cast<std::size_t>(0.01 * l.size());
    const std::size_t hi_idx = static_cast<std::size_t>(0.99 * l.size());
    CHECK(out[lo_idx] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(out[hi_idx] == doctest::Approx(100.0).epsilon(1e-9));

    // a and b pass through untouched.
    CHECK(res.image.data[1] == 5.0);
    CHECK(res.image.data[2] == -7.0);
}

TEST_CASE("constant L is left unchanged and flagged") {
    const LStretchResult res = stretch_l(lab_from_l(std::vector<double>(64, 50.0)));
    CHECK(res.degenerate);
    for (std::size_t i = 0; i < 64; ++i)
        CHECK(res.image.data[i * 3] == 50.0);
}

TEST_CASE("s-curve fixed points and reference value") {
    CHECK(s_curve_value(0.0, 1.3) == 0.0);
    CHECK(s_curve_value(128.0, 1.3) == doctest::Approx(128.0).epsilon(1e-12));
    CHECK(s_curve_value(-128.0, 1.3) == doctest::Approx(-128.0).epsilon(1e-12));
    CHECK(s_curve_value(64.0, 1.3) == doctest::Approx(72.97).epsilon(1e-4));
}

TEST_CASE("s-curve is odd and expansive on the integer grid") {
    for (double phi : {1.2, 1.3, 2.0}) {
        for (int x = -128; x <= 128; ++x) {
            const double fwd = s_curve_value(x, phi);
            const double bwd = s_curve_value(-x, phi);
            CHECK(fwd == doctest::Approx(-bwd).epsilon(1e-12));
            CHECK(std::abs(fwd) >= std::abs(static_cast<double>(x)));
        }
    }
}

TEST_CASE("s-curve is monotone non-decreasing at the supported bases") {
    for (double phi : {1.2, 1.3, 2.0}) {
        double prev = s_curve_value(-128.0, phi);
        for (double x = -128.0 + 1e-3; x <= 128.0; x += 1e-3) {
            const double cur = s_curve_value(x, phi);
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("s-curve application clamps into the a/b range and keeps L") {
    LabImage lab(2, 1);
    lab.data = {60.0, 128.0, -30.0, 10.0, 64.0, 127.9};
    const LabImage out = s_curve_ab(lab, 1.3);
    CHECK(out.data[0] == 60.0);
    CHECK(out.data[1] == 127.0);  // 128 pre-clamp
    CHECK(out.data[3] == 10.0);
    CHECK(out.data[4] == doctest::Approx(72.97).epsilon(1e-4));
    CHECK(out.data[5] <= 127.0);
}
