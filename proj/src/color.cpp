#include "color.hpp"

#include <algorithm>
#include <cmath>

namespace eyespot {

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const int hi = std::max({r, g, b});
    const int lo = std::min({r, g, b});
    const int chroma = hi - lo;

    Hsv out;
    out.v = hi / 255.0;
    if (hi == 0 || chroma == 0) return out;  // black or achromatic: h = 0, s = 0

    out.s = static_cast<double>(chroma) / hi;
    double h6;
    if (hi == r)
        h6 = static_cast<double>(g - b) / chroma;
    else if (hi == g)
        h6 = static_cast<double>(b - r) / chroma + 2.0;
    else
        h6 = static_cast<double>(r - g) / chroma + 4.0;
    if (h6 < 0.0) h6 += 6.0;
    out.h = h6 / 6.0;
    if (out.h >= 1.0) out.h = 0.0;
    return out;
}

std::array<std::uint8_t, 3> hsv_to_rgb(const Hsv& c) {
    const auto q8 = [](double x) {
        return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
    };
    if (c.s <= 0.0) {
        const std::uint8_t v = q8(c.v);
        return {v, v, v};
    }
    double h6 = c.h * 6.0;
    if (h6 >= 6.0) h6 -= 6.0;
    const int sector = std::clamp(static_cast<int>(std::floor(h6)), 0, 5);
    const double f = h6 - sector;
    const double p = c.v * (1.0 - c.s);
    const double q = c.v * (1.0 - c.s * f);
    const double t = c.v * (1.0 - c.s * (1.0 - f));

    double r, g, b;
    switch (sector) {
        case 0: r = c.v; g = t;   b = p;   break;
        case 1: r = q;   g = c.v; b = p;   break;
        case 2: r = p;   g = c.v; b = t;   break;
        case 3: r = p;   g = q;   b = c.v; break;
        case 4: r = t;   g = p;   b = c.v; break;
        default: r = c.v; g = p;  b = q;   break;
    }
    return {q8(r), q8(g), q8(b)};
}

namespace {

// sRGB -> XYZ (D65), IEC 61966-2-1 primaries.
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

// White point = matrix row sums, so the gray axis maps onto a = b = 0.
constexpr double kWhite[3] = {
    kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2],
    kRgbToXyz[1][0] + kRgbToXyz[1][1] + kRgbToXyz[1][2],
    kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2],
};

constexpr double kLabEps = 216.0 / 24389.0;
constexpr double kLabKappa = 24389.0 / 27.0;

double srgb_expand(std::uint8_t u8) {
    const double u = u8 / 255.0;
    return u <= 0.04045 ? u / 12.92 : std::pow((u + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    return t > kLabEps ? std::cbrt(t) : (kLabKappa * t + 16.0) / 116.0;
}

} // namespace

Lab rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double lin[3] = {srgb_expand(r), srgb_expand(g), srgb_expand(b)};
    double xyz[3];
    for (int i = 0; i < 3; ++i)
        xyz[i] = kRgbToXyz[i][0] * lin[0] + kRgbToXyz[i][1] * lin[1] +
                 kRgbToXyz[i][2] * lin[2];

    const double fx = lab_f(xyz[0] / kWhite[0]);
    const double fy = lab_f(xyz[1] / kWhite[1]);
    const double fz = lab_f(xyz[2] / kWhite[2]);

    Lab out;
    out.l = 116.0 * fy - 16.0;
    out.a = 500.0 * (fx - fy);
    out.b = 200.0 * (fy - fz);
    return out;
}

} // namespace eyespot
