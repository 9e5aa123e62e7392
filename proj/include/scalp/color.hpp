#pragma once

#include <algorithm>
#include <cmath>

#include "scalp/types.hpp"

namespace scalp {

namespace detail {

// sRGB transfer function, 8-bit channel to linear [0,1].
inline double srgb_linearize(std::uint8_t c) {
    const double v = c / 255.0;
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
    constexpr double eps = 216.0 / 24389.0;
    constexpr double kappa = 24389.0 / 27.0;
    return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
}

// sRGB -> XYZ matrix, D65.
constexpr double kXr = 0.4124564, kXg = 0.3575761, kXb = 0.1804375;
constexpr double kYr = 0.2126729, kYg = 0.7151522, kYb = 0.0721750;
constexpr double kZr = 0.0193339, kZg = 0.1191920, kZb = 0.9503041;

// Reference white is the matrix image of (1,1,1), so neutral inputs map to the
// neutral Lab axis and (255,255,255) lands on L = 100 exactly.
constexpr double kXn = kXr + kXg + kXb;
constexpr double kYn = kYr + kYg + kYb;
constexpr double kZn = kZr + kZg + kZb;

} // namespace detail

inline LabPixel srgb_to_lab(Rgb8 rgb) {
    using namespace detail;
    const double r = srgb_linearize(rgb.r);
    const double g = srgb_linearize(rgb.g);
    const double b = srgb_linearize(rgb.b);

    const double x = kXr * r + kXg * g + kXb * b;
    const double y = kYr * r + kYg * g + kYb * b;
    const double z = kZr * r + kZg * g + kZb * b;

    const double fx = lab_f(x / kXn);
    const double fy = lab_f(y / kYn);
    const double fz = lab_f(z / kZn);

    LabPixel out;
    out.l = std::max(0.0, 116.0 * fy - 16.0);
    out.a = 500.0 * (fx - fy);
    out.b = 200.0 * (fy - fz);
    return out;
}

/// Pixel-wise sRGB -> CIELab conversion of a whole image.
inline LabImage srgb_to_lab(const RgbImage& rgb) {
    LabImage lab(rgb.width, rgb.height);
    for (std::size_t i = 0; i < rgb.pixels.size(); ++i)
        lab.pixels[i] = srgb_to_lab(rgb.pixels[i]);
    return lab;
}

} // namespace scalp
