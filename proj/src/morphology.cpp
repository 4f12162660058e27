#include "morphology.hpp"

#include <algorithm>

#include "error.hpp"

namespace eyespot {

BinaryMask::BinaryMask(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0) {
        fail(ErrorCode::dimension, "mask dimensions must be positive");
    }
    bits.assign(static_cast<std::size_t>(w) * h, 0);
}

StructElement StructElement::box(int w, int h) {
    if (w <= 0 || h <= 0 || w % 2 == 0 || h % 2 == 0) {
        fail(ErrorCode::invalid_argument, "structuring element sides must be odd and positive");
    }
    StructElement se;
    se.width = w;
    se.height = h;
    se.bits.assign(static_cast<std::size_t>(w) * h, 1);
    return se;
}

StructElement StructElement::reflected() const {
    StructElement out = *this;
    std::reverse(out.bits.begin(), out.bits.end());
    return out;
}

namespace {

void check_se(const StructElement& se) {
    if (se.width <= 0 || se.height <= 0 || se.width % 2 == 0 || se.height % 2 == 0 ||
        se.bits.size() != static_cast<std::size_t>(se.width) * se.height) {
        fail(ErrorCode::invalid_argument, "malformed structuring element");
    }
    if (!se.at(se.width / 2, se.height / 2)) {
        fail(ErrorCode::invalid_argument, "structuring element origin must be set");
    }
}

} // namespace

BinaryMask erode(const BinaryMask& mask, const StructElement& se) {
    check_se(se);
    const int ax = se.width / 2;
    const int ay = se.height / 2;
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool fits = true;
            for (int j = 0; j < se.height && fits; ++j) {
                for (int i = 0; i < se.width; ++i) {
                    if (!se.at(i, j)) continue;
                    const int px = x + i - ax;
                    const int py = y + j - ay;
                    if (!mask.inside(px, py) || !mask.at(px, py)) {
                        fits = false;
                        break;
                    }
                }
            }
            out.at(x, y) = fits ? 1 : 0;
        }
    }
    return out;
}

BinaryMask dilate(const BinaryMask& mask, const StructElement& se) {
    check_se(se);
    const int ax = se.width / 2;
    const int ay = se.height / 2;
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool hit = false;
            for (int j = 0; j < se.height && !hit; ++j) {
                for (int i = 0; i < se.width; ++i) {
                    if (!se.at(i, j)) continue;
                    // Reflected SE: the probe looks back along each offset.
                    const int px = x - (i - ax);
                    const int py = y - (j - ay);
                    if (mask.inside(px, py) && mask.at(px, py)) {
                        hit = true;
                        break;
                    }
                }
            }
            out.at(x, y) = hit ? 1 : 0;
        }
    }
    return out;
}

BinaryMask open(const BinaryMask& mask, const StructElement& se) {
    return dilate(erode(mask, se), se);
}

BinaryMask close(const BinaryMask& mask, const StructElement& se) {
    return erode(dilate(mask, se), se);
}

std::vector<Component> connected_components(const BinaryMask& mask, int connectivity,
                                            std::vector<int>* labels_out) {
    if (connectivity != 4 && connectivity != 8) {
        fail(ErrorCode::invalid_argument, "connectivity must be 4 or 8");
    }
    static constexpr int kDx8[] = {-1, 0, 1, -1, 1, -1, 0, 1};
    static constexpr int kDy8[] = {-1, -1, -1, 0, 0, 1, 1, 1};
    static constexpr int kDx4[] = {0, -1, 1, 0};
    static constexpr int kDy4[] = {-1, 0, 0, 1};
    const int* dx = connectivity == 8 ? kDx8 : kDx4;
    const int* dy = connectivity == 8 ? kDy8 : kDy4;
    const int nn = connectivity;

    std::vector<int> labels(static_cast<std::size_t>(mask.width) * mask.height, 0);
    std::vector<Component> comps;
    std::vector<std::pair<int, int>> stack;
    int next = 1;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * mask.width + x;
            if (!mask.bits[idx] || labels[idx]) continue;
            Component c;
            c.label = next++;
            int min_x = x, max_x = x, min_y = y, max_y = y;
            double sum_x = 0.0, sum_y = 0.0;
            labels[idx] = c.label;
            stack.clear();
            stack.emplace_back(x, y);
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                ++c.area;
                sum_x += cx;
                sum_y += cy;
                min_x = std::min(min_x, cx);
                max_x = std::max(max_x, cx);
                min_y = std::min(min_y, cy);
                max_y = std::max(max_y, cy);
                for (int k = 0; k < nn; ++k) {
                    const int px = cx + dx[k];
                    const int py = cy + dy[k];
                    if (!mask.inside(px, py)) continue;
                    const std::size_t pidx = static_cast<std::size_t>(py) * mask.width + px;
                    if (mask.bits[pidx] && !labels[pidx]) {
                        labels[pidx] = c.label;
                        stack.emplace_back(px, py);
                    }
                }
            }
            c.bbox = Rect{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
            c.centroid = Point{sum_x / c.area, sum_y / c.area};
            comps.push_back(c);
        }
    }
    if (labels_out) {
        *labels_out = std::move(labels);
    }
    return comps;
}

std::vector<Component> filter_components(const std::vector<Component>& comps, int min_area,
                                         int max_area, AspectRange aspect) {
    if (min_area > max_area || aspect.min <= 0.0 || aspect.max <= 0.0 || aspect.min > aspect.max) {
        fail(ErrorCode::invalid_argument, "inverted component filter bounds");
    }
    std::vector<Component> out;
    for (const Component& c : comps) {
        if (c.area < min_area || c.area > max_area) continue;
        const double ratio = static_cast<double>(c.bbox.w) / c.bbox.h;
        if (ratio < aspect.min || ratio > aspect.max) continue;
        out.push_back(c);
    }
    return out;
}

std::vector<std::uint8_t> mask_bytes(const BinaryMask& mask) {
    std::vector<std::uint8_t> out(mask.bits.size());
    std::transform(mask.bits.begin(), mask.bits.end(), out.begin(),
                   [](std::uint8_t b) { return b ? std::uint8_t{255} : std::uint8_t{0}; });
    return out;
}

} // namespace eyespot
