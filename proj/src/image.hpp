#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "geometry.hpp"

namespace eyespot {

/// Row-major interleaved 8-bit sRGB raster.
struct ImageRgb {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // width * height * 3

    ImageRgb() = default;
    ImageRgb(int w, int h);

    std::uint8_t* pixel(int x, int y) {
        return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
    const std::uint8_t* pixel(int x, int y) const {
        return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
};

/// Row-major single-channel raster. Decoded images hold samples in [0, 1];
/// filter responses reuse the container with unclamped values.
struct ImageGray {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // width * height

    ImageGray() = default;
    ImageGray(int w, int h);

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Maps p -> scale * R(rotation) * p + (dx, dy). scale must stay positive.
struct SimilarityTransform {
    double rotation = 0.0;  // radians
    double scale = 1.0;
    double dx = 0.0;
    double dy = 0.0;

    Point apply(Point p) const;
    SimilarityTransform inverse() const;

    /// Rotation/scale about a pivot followed by a translation.
    static SimilarityTransform about(Point pivot, double rotation, double scale,
                                     double dx, double dy);
};

/// Rec. 601 luma scaled to [0, 1].
ImageGray to_gray(const ImageRgb& img);

ImageRgb crop(const ImageRgb& img, const Rect& r);
ImageGray crop(const ImageGray& img, const Rect& r);

/// Resamples through the inverse map with bilinear interpolation; samples
/// falling outside the source read as 0.
ImageGray warp_similarity(const ImageGray& img, const SimilarityTransform& t,
                          int out_w, int out_h);

ImageGray flip_horizontal(const ImageGray& img);
ImageRgb flip_horizontal(const ImageRgb& img);

/// Least-squares similarity (rotation + uniform scale + translation, no
/// reflection) mapping src[i] onto dst[i].
SimilarityTransform estimate_similarity(std::span<const Point> src,
                                        std::span<const Point> dst);

} // namespace eyespot
