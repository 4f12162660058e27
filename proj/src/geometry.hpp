#pragma once

#include <algorithm>

namespace eyespot {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Integer pixel rectangle; (x, y) is the top-left pixel, w/h are in pixels.
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    long long area() const { return static_cast<long long>(w) * h; }

    bool contains(double px, double py) const {
        return px >= x && px <= x + w - 1 && py >= y && py <= y + h - 1;
    }

    Point center() const {
        return {x + (w - 1) / 2.0, y + (h - 1) / 2.0};
    }

    bool operator==(const Rect&) const = default;
};

inline double iou(const Rect& a, const Rect& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.x + a.w, b.x + b.w);
    const int y1 = std::min(a.y + a.h, b.y + b.h);
    const long long iw = std::max(0, x1 - x0);
    const long long ih = std::max(0, y1 - y0);
    const long long inter = iw * ih;
    if (inter == 0) return 0.0;
    const long long uni = a.area() + b.area() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace eyespot
