#include "image.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "error.hpp"

namespace eyespot {

namespace {

void check_dims(int w, int h, const char* what) {
    if (w < 1 || h < 1)
        fail(ErrorCode::dimension, std::string(what) + ": dimensions must be positive");
}

void check_rect(const Rect& r, int w, int h) {
    if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.x + r.w > w || r.y + r.h > h)
        fail(ErrorCode::invalid_argument, "crop: rectangle not inside the image");
}

} // namespace

ImageRgb::ImageRgb(int w, int h) : width(w), height(h) {
    check_dims(w, h, "ImageRgb");
    data.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

ImageGray::ImageGray(int w, int h) : width(w), height(h) {
    check_dims(w, h, "ImageGray");
    data.assign(static_cast<std::size_t>(w) * h, 0.0);
}

Point SimilarityTransform::apply(Point p) const {
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    return {scale * (c * p.x - s * p.y) + dx,
            scale * (s * p.x + c * p.y) + dy};
}

SimilarityTransform SimilarityTransform::inverse() const {
    if (!(scale > 0.0))
        fail(ErrorCode::invalid_argument, "SimilarityTransform: scale must be positive");
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    SimilarityTransform inv;
    inv.rotation = -rotation;
    inv.scale = 1.0 / scale;
    inv.dx = -(c * dx + s * dy) / scale;
    inv.dy = -(-s * dx + c * dy) / scale;
    return inv;
}

SimilarityTransform SimilarityTransform::about(Point pivot, double rotation, double scale,
                                               double dx, double dy) {
    SimilarityTransform t;
    t.rotation = rotation;
    t.scale = scale;
    // pivot maps to pivot + (dx, dy)
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    t.dx = pivot.x - scale * (c * pivot.x - s * pivot.y) + dx;
    t.dy = pivot.y - scale * (s * pivot.x + c * pivot.y) + dy;
    return t;
}

ImageGray to_gray(const ImageRgb& img) {
    ImageGray out(img.width, img.height);
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* p = img.data.data() + 3 * i;
        const double y = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
        out.data[i] = std::clamp(y, 0.0, 1.0);
    }
    return out;
}

ImageRgb crop(const ImageRgb& img, const Rect& r) {
    check_rect(r, img.width, img.height);
    ImageRgb out(r.w, r.h);
    for (int y = 0; y < r.h; ++y) {
        const std::uint8_t* src = img.pixel(r.x, r.y + y);
        std::copy(src, src + static_cast<std::size_t>(r.w) * 3, out.pixel(0, y));
    }
    return out;
}

ImageGray crop(const ImageGray& img, const Rect& r) {
    check_rect(r, img.width, img.height);
    ImageGray out(r.w, r.h);
    for (int y = 0; y < r.h; ++y) {
        const double* src = &img.data[static_cast<std::size_t>(r.y + y) * img.width + r.x];
        std::copy(src, src + r.w, &out.data[static_cast<std::size_t>(y) * r.w]);
    }
    return out;
}

ImageGray warp_similarity(const ImageGray& img, const SimilarityTransform& t,
                          int out_w, int out_h) {
    check_dims(out_w, out_h, "warp_similarity");
    if (!(t.scale > 0.0))
        fail(ErrorCode::invalid_argument, "warp_similarity: scale must be positive");

    const SimilarityTransform inv = t.inverse();
    const double c = std::cos(inv.rotation);
    const double s = std::sin(inv.rotation);
    ImageGray out(out_w, out_h);

    for (int oy = 0; oy < out_h; ++oy) {
        for (int ox = 0; ox < out_w; ++ox) {
            const double sx = inv.scale * (c * ox - s * oy) + inv.dx;
            const double sy = inv.scale * (s * ox + c * oy) + inv.dy;
            const double fx = std::floor(sx);
            const double fy = std::floor(sy);
            const int x0 = static_cast<int>(fx);
            const int y0 = static_cast<int>(fy);
            const double ax = sx - fx;
            const double ay = sy - fy;

            auto sample = [&](int x, int y) -> double {
                if (x < 0 || y < 0 || x >= img.width || y >= img.height) return 0.0;
                return img.at(x, y);
            };

            const double v00 = sample(x0, y0);
            const double v10 = sample(x0 + 1, y0);
            const double v01 = sample(x0, y0 + 1);
            const double v11 = sample(x0 + 1, y0 + 1);
            const double top = v00 + ax * (v10 - v00);
            const double bot = v01 + ax * (v11 - v01);
            out.at(ox, oy) = top + ay * (bot - top);
        }
    }
    return out;
}

ImageGray flip_horizontal(const ImageGray& img) {
    ImageGray out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(x, y) = img.at(img.width - 1 - x, y);
    return out;
}

ImageRgb flip_horizontal(const ImageRgb& img) {
    ImageRgb out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* src = img.pixel(img.width - 1 - x, y);
            std::uint8_t* dst = out.pixel(x, y);
            dst[0] = src[0];
            dst[1] = src[1];
            dst[2] = src[2];
        }
    }
    return out;
}

SimilarityTransform estimate_similarity(std::span<const Point> src,
                                        std::span<const Point> dst) {
    if (src.size() != dst.size())
        fail(ErrorCode::invalid_argument, "estimate_similarity: point counts differ");
    if (src.size() < 2)
        fail(ErrorCode::invalid_argument, "estimate_similarity: need at least 2 points");

    // Complex least squares: find a, b minimizing sum |a*z_i + b - w_i|^2.
    using C = std::complex<double>;
    C zm{0, 0}, wm{0, 0};
    for (std::size_t i = 0; i < src.size(); ++i) {
        zm += C(src[i].x, src[i].y);
        wm += C(dst[i].x, dst[i].y);
    }
    zm /= static_cast<double>(src.size());
    wm /= static_cast<double>(src.size());

    C num{0, 0};
    double den = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const C zc = C(src[i].x, src[i].y) - zm;
        const C wc = C(dst[i].x, dst[i].y) - wm;
        num += wc * std::conj(zc);
        den += std::norm(zc);
    }
    if (den == 0.0)
        fail(ErrorCode::invalid_argument, "estimate_similarity: source points are coincident");

    const C a = num / den;
    if (std::abs(a) <= 0.0)
        fail(ErrorCode::invalid_argument, "estimate_similarity: degenerate transform");
    const C b = wm - a * zm;

    SimilarityTransform t;
    t.rotation = std::arg(a);
    t.scale = std::abs(a);
    t.dx = b.real();
    t.dy = b.imag();
    return t;
}

} // namespace eyespot
