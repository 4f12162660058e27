#pragma once

#include <optional>
#include <vector>

#include "image.hpp"

namespace eyespot {

/// Exactly one of sigma / bandwidth must be supplied.
struct GaborParams {
    double wavelength = 4.0;       // pixels, > 0
    double orientation = 0.0;      // radians
    double phase = 0.0;            // radians
    double aspect = 0.5;           // gamma, > 0
    std::optional<double> sigma;   // pixels, > 0
    std::optional<double> bandwidth; // octaves, > 0

    double resolved_sigma() const;
};

struct GaborKernel {
    int size = 0; // odd, pixels per side
    std::vector<double> taps; // row-major, size*size
    GaborParams params;

    double at(int x, int y) const { return taps[static_cast<std::size_t>(y) * size + x]; }
};

double sigma_from_bandwidth(double wavelength, double bandwidth);

/// size <= 0 picks the smallest odd integer >= 6*sigma + 1. When `normalize`
/// is set the taps are shifted to zero mean and scaled to unit L2 norm.
GaborKernel make_kernel(const GaborParams& p, int size = 0, bool normalize = false);

/// True convolution (kernel flipped) with zero padding; output has the input
/// dimensions and unclamped real values.
ImageGray convolve(const ImageGray& img, const GaborKernel& k);

/// Cartesian product, wavelength-major, then orientation, then phase.
std::vector<GaborKernel> make_bank(const std::vector<double>& wavelengths,
                                   const std::vector<double>& orientations,
                                   const std::vector<double>& phases, double aspect,
                                   double bandwidth, bool normalize = false);

} // namespace eyespot
