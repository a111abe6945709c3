#pragma once

#include <span>
#include <string>
#include <vector>

#include "saghs/histogram.hpp"
#include "saghs/image.hpp"

namespace saghs {

struct GrayWorldGains {
    double g = 1.0;
    double b = 1.0;
};

/// Gains that move the G and B channel means to the gray value 0.5 * 255.
/// The red channel is never corrected (its gain is fixed at 1).
/// Throws DegenerateChannelError when a channel mean is zero.
GrayWorldGains gray_world_gains(const RgbImage& img);

/// Multiply G and B by their gains, clamping to [0, 255]. R is untouched.
RgbImage apply_gain(const RgbImage& img, double g_gain, double b_gain);

/// How to pick the dynamic coefficients inside their feasibility intervals.
enum class CoeffStrategy { Midpoint, Lower, Upper };

const char* coeff_strategy_name(CoeffStrategy s);
CoeffStrategy parse_coeff_strategy(const std::string& name);

struct StretchParams {
    Channel channel = Channel::R;
    double i_min = 0.0, i_max = 0.0;  // clipped input range
    double o_min = 0.0, o_max = 0.0;  // desired output range
    double beta = 0.0;                // minimum-side dynamic coefficient
    double mu = 0.0;                  // maximum-side dynamic coefficient
    double kappa = 1.0;               // correction factor
    double t = 1.0;                   // channel transmission
    bool fallback = false;            // a feasibility interval was empty
};

/// Solve the desired output range from the channel's Rayleigh statistics:
///   o_min = a - beta * sigma       with o_min constrained to (0, i_min)
///   o_max = (a + mu * sigma) / (kappa * t)  constrained to (i_max, 255]
/// beta and mu are picked inside their feasibility intervals per the
/// strategy, then back-solved from the final (clamped) range so that
/// o_min = a - beta*sigma and (kappa*t*o_max - a)/sigma = mu hold exactly.
/// An empty interval falls back to a 10% range expansion on that side.
StretchParams solve_stretch_params(const ChannelStats& stats, double i_min, double i_max,
                                   double kappa, double t,
                                   CoeffStrategy strategy = CoeffStrategy::Midpoint);

/// The affine stretch map, before clamping.
double stretch_value(double v, const StretchParams& p);

/// Affine remap of [i_min, i_max] onto [o_min, o_max], clamped to [0, 255].
std::vector<double> stretch_channel(std::span<const double> pixels, const StretchParams& p);

/// Standard bilateral filter with border replication. Each output value is a
/// convex combination of its (2*radius+1)^2 window.
RgbImage bilateral_filter(const RgbImage& img, double sigma_spatial, double sigma_range,
                          int radius);

}  // namespace saghs
