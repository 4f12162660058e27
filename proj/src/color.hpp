#pragma once

#include <array>
#include <cstdint>

namespace eyespot {

/// Hue is stored as a fraction of a full turn in [0, 1); h = 0 when s = 0.
struct Hsv {
    double h = 0.0;
    double s = 0.0;
    double v = 0.0;
};

/// CIELAB with D65 white; l in [0, 100], a/b unbounded opponent axes.
struct Lab {
    double l = 0.0;
    double a = 0.0;
    double b = 0.0;
};

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Exact inverse of rgb_to_hsv on 8-bit triples.
std::array<std::uint8_t, 3> hsv_to_rgb(const Hsv& c);

/// sRGB gamma expansion -> linear RGB -> XYZ (D65) -> CIELAB. The white point
/// is taken from the matrix rows so achromatic inputs give a = b = 0 exactly.
Lab rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

} // namespace eyespot
