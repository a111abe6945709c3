#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "saghs/contrast.hpp"
#include "saghs/errors.hpp"
#include "saghs/histogram.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace saghs;

namespace {

RgbImage constant_image(int w, int h, double r, double g, double b) {
    RgbImage img(w, h);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        img.data[i * 3 + 0] = r;
        img.data[i * 3 + 1] = g;
        img.data[i * 3 + 2] = b;
    }
    return img;
}

ChannelStats stats_with_mode(double mode, Channel ch = Channel::R) {
    // Enough spread that the stats are non-degenerate.
    std::vector<double> values(40, mode);
    values.push_back(mode / 2);
    values.push_back(std::min(mode + 30.0, 255.0));
    std::sort(values.begin(), values.end());
    ChannelStats s = channel_stats(values, ch);
    REQUIRE(s.mode_value == mode);
    return s;
}

}  // namespace

TEST_CASE("gray world gains against hand arithmetic") {
    CHECK(gray_world_gains(constant_image(4, 4, 10, 127.5, 100)).g == doctest::Approx(1.0));
    CHECK(gray_world_gains(constant_image(4, 4, 10, 64, 100)).g ==
          doctest::Approx(1.9921875).epsilon(1e-12));
    CHECK(gray_world_gains(constant_image(4, 4, 10, 100, 255)).b ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(gray_world_gains(constant_image(4, 4, 10, 0, 100)),
                    DegenerateChannelError);
}

TEST_CASE("apply gain scales, clamps, and leaves red alone") {
    RgbImage img = constant_image(2, 2, 77, 200, 100);
    const RgbImage same = apply_gain(img, 1.0, 1.0);
    CHECK(same.data == img.data);

    const RgbImage out = apply_gain(img, 1.5, 1.275);
    CHECK(out.at(0, 0, 0) == 77.0);
    CHECK(out.at(0, 0, 1) == 255.0);  // 300 clamped
    CHECK(out.at(0, 0, 2) == doctest::Approx(127.5).epsilon(1e-12));
}

TEST_CASE("gray world correction centers the channel means") {
    std::mt19937 rng(21);
    int skipped = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const RgbImage img = testing::make_noise(24, 24, 30.0, 110.0, rng());
        const GrayWorldGains gains = gray_world_gains(img);
        const RgbImage out = apply_gain(img, gains.g, gains.b);

        std::size_t clamped = 0;
        for (std::size_t i = 0; i < img.pixel_count(); ++i) {
            if (img.data[i * 3 + 1] * gains.g > 255.0) ++clamped;
            if (img.data[i * 3 + 2] * gains.b > 255.0) ++clamped;
        }
        if (clamped > img.pixel_count() / 100) {  // property skipped when clamping dominates
            ++skipped;
            continue;
        }
        double mg = 0, mb = 0;
        for (std::size_t i = 0; i < out.pixel_count(); ++i) {
            mg += out.data[i * 3 + 1];
            mb += out.data[i * 3 + 2];
        }
        mg /= static_cast<double>(out.pixel_count());
        mb /= static_cast<double>(out.pixel_count());
        CHECK(std::abs(mg - 127.5) <= 0.5);
        CHECK(std::abs(mb - 127.5) <= 0.5);
    }
    CHECK(skipped < 40);
}

TEST_CASE("coefficient solving reproduces the interval midpoints") {
    // mode 100 -> sigma 65.5; beta from (0.916, 1.527) gives o_min = i_min / 2.
    const ChannelStats stats = stats_with_mode(100.0);
    const StretchParams p = solve_stretch_params(stats, 40.0, 180.0, 1.0, 0.95);

    const double beta_lo = (100.0 - 40.0) / 65.5;
    const double beta_hi = 100.0 / 65.5;
    CHECK(beta_lo == doctest::Approx(0.916).epsilon(1e-3));
    CHECK(beta_hi == doctest::Approx(1.527).epsilon(1e-3));
    CHECK(p.beta == doctest::Approx(0.5 * (beta_lo + beta_hi)).epsilon(1e-12));
    CHECK(p.o_min == doctest::Approx(20.0).epsilon(1e-12));

    const double mu_lo = 0.95 * 180.0 / 65.5 - 100.0 / 65.5;
    const double mu_hi = 0.95 * 255.0 / 65.5 - 100.0 / 65.5;
    CHECK(mu_lo == doctest::Approx(1.084).epsilon(1e-3));
    CHECK(mu_hi == doctest::Approx(2.172).epsilon(1e-3));
    CHECK(p.mu == doctest::Approx(0.5 * (mu_lo + mu_hi)).epsilon(1e-12));
    CHECK(p.o_max == doctest::Approx(217.5).epsilon(1e-9));
    CHECK_FALSE(p.fallback);

    // Algebraic inverse of the maximum-side relation.
    CHECK((1.0 * 0.95 * p.o_max - 100.0) / 65.5 == doctest::Approx(p.mu).epsilon(1e-12));
}

TEST_CASE("coefficient strategies stay inside the desired-range contract") {
    const ChannelStats stats = stats_with_mode(90.0);
    for (CoeffStrategy s : {CoeffStrategy::Midpoint, CoeffStrategy::Lower,
                            CoeffStrategy::Upper}) {
        const StretchParams p = solve_stretch_params(stats, 35.0, 200.0, 1.0, 0.9, s);
        CHECK(p.o_min < 35.0);
        CHECK(p.o_max > 200.0);
        CHECK(p.o_min >= 0.0);
        CHECK(p.o_max <= 255.0);
        CHECK(p.o_min == doctest::Approx(90.0 - p.beta * stats.sigma).epsilon(1e-9));
        CHECK((0.9 * p.o_max - 90.0) / stats.sigma == doctest::Approx(p.mu).epsilon(1e-9));
    }
}

TEST_CASE("empty feasibility intervals fall back to modest expansion") {
    const ChannelStats stats = stats_with_mode(60.0);

    // i_min = 0 leaves no room below; expansion keeps o_min at 0.
    StretchParams p = solve_stretch_params(stats, 0.0, 0.0 + 100.0, 1.0, 0.9);
    CHECK(p.fallback);
    CHECK(p.o_min == 0.0);
    CHECK(p.o_max > 100.0);

    // i_max = 255 leaves no room above; expansion clamps to 255.
    p = solve_stretch_params(stats, 50.0, 255.0, 1.0, 0.9);
    CHECK(p.fallback);
    CHECK(p.o_max == 255.0);
    CHECK(p.o_min < 50.0);
}

TEST_CASE("degenerate range is rejected") {
    const ChannelStats stats = stats_with_mode(60.0);
    CHECK_THROWS_AS(solve_stretch_params(stats, 80.0, 80.0, 1.0, 0.9),
                    DegenerateChannelError);
}

TEST_CASE("stretch maps the reference point and the endpoints") {
    StretchParams p;
    p.i_min = 50;
    p.i_max = 200;
    p.o_min = 0;
    p.o_max = 255;
    const std::vector<double> out = stretch_channel(std::vector<double>{100.0, 50.0, 200.0}, p);
    CHECK(out[0] == doctest::Approx(85.0).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.0));
    CHECK(out[2] == doctest::Approx(255.0));
}

TEST_CASE("stretch with equal ranges is the identity inside the interval") {
    StretchParams p;
    p.i_min = 30;
    p.i_max = 220;
    p.o_min = 30;
    p.o_max = 220;
    std::vector<double> pixels{30, 77.25, 140.5, 220};
    const std::vector<double> out = stretch_channel(pixels, p);
    for (std::size_t i = 0; i < pixels.size(); ++i)
        CHECK(out[i] == doctest::Approx(pixels[i]).epsilon(1e-12));
}

TEST_CASE("stretch is strictly increasing and rank preserving pre-clamp") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.0, 255.0);
    for (int trial = 0; trial < 100; ++trial) {
        StretchParams p;
        p.i_min = u(rng) * 0.5;
        p.i_max = p.i_min + 1.0 + u(rng) * 0.4;
        p.o_min = u(rng) * 0.5;
        p.o_max = p.o_min + 1.0 + u(rng) * 0.4;
        double prev_in = -1.0, prev_out = -1e300;
        for (int k = 0; k < 50; ++k) {
            const double v = p.i_min + (p.i_max - p.i_min) * k / 49.0;
            if (v <= prev_in) continue;
            const double o = stretch_value(v, p);
            CHECK(o > prev_out);
            prev_in = v;
            prev_out = o;
        }
    }
}

TEST_CASE("bilateral filter fixes constant images") {
    const RgbImage img = constant_image(9, 7, 12.5, 99.0, 201.25);
    const RgbImage out = bilateral_filter(img, 3.0, 10.0, 3);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12));
}

TEST_CASE("bilateral filter preserves an impulse against a flat field") {
    RgbImage img(7, 7, 0.0);
    img.at(3, 3, 0) = 255.0;
    img.at(3, 3, 1) = 255.0;
    img.at(3, 3, 2) = 255.0;
    const RgbImage out = bilateral_filter(img, 1.0, 5.0, 1);
    CHECK(std::abs(out.at(3, 3, 0) - 255.0) <= 1.0);
    CHECK(out.at(2, 3, 0) < 1.0);
    CHECK(out.at(3, 2, 1) < 1.0);
    CHECK(out.at(2, 2, 2) < 1.0);
}

TEST_CASE("bilateral filter matches the exact formula on small images") {
    const RgbImage img = testing::make_noise(8, 6, 0.0, 255.0, 17);
    const RgbImage ours = bilateral_filter(img, 2.0, 12.0, 2);
    const RgbImage exact = testing::oracle_bilateral(img, 2.0, 12.0, 2);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        CHECK(ours.data[i] == doctest::Approx(exact.data[i]).epsilon(1e-6));
}

TEST_CASE("huge range sigma degenerates to a plain Gaussian blur") {
    const RgbImage img = testing::make_noise(5, 5, 0.0, 255.0, 19);
    const RgbImage ours = bilateral_filter(img, 1.5, 1e12, 2);
    const RgbImage blur = testing::oracle_gaussian_blur(img, 1.5, 2);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        CHECK(std::abs(ours.data[i] - blur.data[i]) < 1e-6);
}

TEST_CASE("bilateral output is a convex combination of the window") {
    const RgbImage img = testing::make_noise(16, 12, 0.0, 255.0, 23);
    const int radius = 2;
    const RgbImage out = bilateral_filter(img, 2.0, 15.0, radius);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) {
                double lo = 1e300, hi = -1e300;
                for (int dy = -radius; dy <= radius; ++dy)
                    for (int dx = -radius; dx <= radius; ++dx) {
                        const int yy = std::clamp(y + dy, 0, img.height - 1);
                        const int xx = std::clamp(x + dx, 0, img.width - 1);
                        lo = std::min(lo, img.at(xx, yy, c));
                        hi = std::max(hi, img.at(xx, yy, c));
                    }
                CHECK(out.at(x, y, c) >= lo - 1e-9);
                CHECK(out.at(x, y, c) <= hi + 1e-9);
            }
}
