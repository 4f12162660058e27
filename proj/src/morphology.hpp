#pragma once

#include <cstdint>
#include <vector>

#include "geometry.hpp"

namespace eyespot {

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits; // row-major, 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h);

    std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
    bool inside(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

/// Odd-sized kernel with its origin at the center; the origin bit must be set.
struct StructElement {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    static StructElement box(int w, int h);
    StructElement reflected() const;

    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
};

struct Component {
    int label = 0;
    int area = 0;
    Rect bbox;
    Point centroid;
};

// Out-of-image pixels count as background for both operators.
BinaryMask erode(const BinaryMask& mask, const StructElement& se);
BinaryMask dilate(const BinaryMask& mask, const StructElement& se);
BinaryMask open(const BinaryMask& mask, const StructElement& se);
BinaryMask close(const BinaryMask& mask, const StructElement& se);

/// Labels dense from 1, ordered by the raster position of each component's
/// first pixel. `labels_out`, when given, receives a per-pixel label raster
/// (0 = background) of mask size.
std::vector<Component> connected_components(const BinaryMask& mask, int connectivity,
                                            std::vector<int>* labels_out = nullptr);

struct AspectRange {
    double min = 0.0;
    double max = 0.0;
};

/// Keeps components with min_area <= area <= max_area and aspect (bbox w/h)
/// inside the range, preserving order.
std::vector<Component> filter_components(const std::vector<Component>& comps, int min_area,
                                         int max_area, AspectRange aspect);

/// 0/255 bytes for PGM dumps.
std::vector<std::uint8_t> mask_bytes(const BinaryMask& mask);

} // namespace eyespot
