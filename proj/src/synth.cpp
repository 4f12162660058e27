#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "color.hpp"
#include "error.hpp"
#include "image_io.hpp"

namespace eyespot {

namespace {

// Skin hue is drawn from a sub-band with quantization-safe margins so that
// 8-bit round trips never leave the strict (hue_lo, hue_hi) detector band.
constexpr double kSkinHueLo = 0.025;
constexpr double kSkinHueHi = 0.085;

void put_px(ImageRgb& img, int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    std::uint8_t* p = img.pixel(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
}

void put_gray(ImageRgb& img, int x, int y, int v) {
    const auto g = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    put_px(img, x, y, g, g, g);
}

void put_hsv(ImageRgb& img, int x, int y, double h, double s, double v) {
    const auto rgb = hsv_to_rgb(Hsv{h, std::clamp(s, 0.0, 1.0), std::clamp(v, 0.0, 1.0)});
    put_px(img, x, y, rgb[0], rgb[1], rgb[2]);
}

int jitter(Rng& rng, int amount) {
    return static_cast<int>(rng.uniform(-amount, amount));
}

void fill_background(ImageRgb& img, Rng& rng) {
    const double base = rng.uniform(0.25, 0.6);
    const double slope = rng.uniform(-0.2, 0.2);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double v = base + slope * (static_cast<double>(y) / img.height) +
                             rng.uniform(-0.03, 0.03);
            put_gray(img, x, y, static_cast<int>(std::clamp(v, 0.0, 1.0) * 255.0));
        }
    }
}

void draw_bar(ImageRgb& img, const Rect& r, int tone, Rng& rng) {
    for (int y = std::max(0, r.y); y < std::min(img.height, r.y + r.h); ++y) {
        for (int x = std::max(0, r.x); x < std::min(img.width, r.x + r.w); ++x) {
            put_gray(img, x, y, tone + jitter(rng, 8));
        }
    }
}

// Three-tone eye: sclera patch, dark circular iris, darker pupil. The patch
// is rectangular so a 3x3 opening preserves its bounding box exactly, and
// the sclera tone keeps the component mean lightness below the skin's.
void draw_eye(ImageRgb& img, int cx, int cy, int rx, int ry, Rng& rng) {
    const double r_iris = 0.8 * ry;
    const double r_pupil = 0.4 * ry;
    for (int y = cy - ry; y <= cy + ry; ++y) {
        for (int x = cx - rx; x <= cx + rx; ++x) {
            const double dist = std::hypot(static_cast<double>(x - cx),
                                           static_cast<double>(y - cy));
            int tone = 130;
            if (dist <= r_pupil) {
                tone = 30;
            } else if (dist <= r_iris) {
                tone = 65;
            }
            put_gray(img, x, y, tone + jitter(rng, 8));
        }
    }
}

} // namespace

SynthFace make_face(const Config& cfg, Rng& rng) {
    const int W = cfg.synth_width;
    const int H = cfg.synth_height;
    SynthFace out;
    out.image = ImageRgb(W, H);
    fill_background(out.image, rng);

    const int face_w = static_cast<int>(rng.uniform(0.55, 0.72) * W);
    const int face_h = static_cast<int>(rng.uniform(0.62, 0.78) * H);
    const int face_x = static_cast<int>(rng.uniform(0.02, 0.96) * (W - face_w));
    const int face_y = static_cast<int>(rng.uniform(0.02, 0.96) * (H - face_h));
    out.face_rect = Rect{face_x, face_y, face_w, face_h};

    const double hue = rng.uniform(kSkinHueLo, kSkinHueHi);
    const double sat = rng.uniform(0.45, 0.6);
    const double val = rng.uniform(0.72, 0.84);
    for (int y = face_y; y < face_y + face_h; ++y) {
        for (int x = face_x; x < face_x + face_w; ++x) {
            const double h = std::clamp(hue + rng.uniform(-0.004, 0.004), kSkinHueLo, kSkinHueHi);
            put_hsv(out.image, x, y, h, sat + rng.uniform(-0.05, 0.05),
                    val + rng.uniform(-0.04, 0.04));
        }
    }

    // Eyes sit in the upper ~35% of the face, symmetric with a little jitter.
    const int eye_rx = std::max(5, static_cast<int>(rng.uniform(0.085, 0.105) * face_w));
    const int eye_ry = std::max(4, static_cast<int>(eye_rx * rng.uniform(0.58, 0.70)));
    const int eye_cy = face_y + static_cast<int>(rng.uniform(0.32, 0.38) * face_h);
    const int left_cx = face_x + static_cast<int>(rng.uniform(0.26, 0.32) * face_w);
    const int right_cx = face_x + static_cast<int>(rng.uniform(0.68, 0.74) * face_w);
    for (const int cx : {left_cx, right_cx}) {
        draw_eye(out.image, cx, eye_cy, eye_rx, eye_ry, rng);
        out.eye_boxes.push_back(Rect{cx - eye_rx, eye_cy - eye_ry, 2 * eye_rx + 1,
                                     2 * eye_ry + 1});
        out.eye_centers.push_back(Point{static_cast<double>(cx), static_cast<double>(eye_cy)});
    }

    // Eyebrows: thin dark bars above each eye; they survive the candidate
    // filters and exercise the classifier's rejection path.
    const int brow_h = 3 + static_cast<int>(rng.uniform(0.0, 2.0));
    const int brow_gap = 3 + static_cast<int>(rng.uniform(0.0, 3.0));
    for (const int cx : {left_cx, right_cx}) {
        const int brow_w = static_cast<int>(2.4 * eye_rx);
        draw_bar(out.image,
                 Rect{cx - brow_w / 2, eye_cy - eye_ry - brow_gap - brow_h, brow_w, brow_h}, 60,
                 rng);
    }

    // Mouth: a dark bar in the lower face, filtered out by the position gate.
    const int mouth_w = static_cast<int>(0.34 * face_w);
    const int mouth_h = 4 + static_cast<int>(rng.uniform(0.0, 2.0));
    const int mouth_x = face_x + (face_w - mouth_w) / 2;
    const int mouth_y = face_y + static_cast<int>(0.74 * face_h);
    draw_bar(out.image, Rect{mouth_x, mouth_y, mouth_w, mouth_h}, 55, rng);

    return out;
}

ImageRgb make_scenery(const Config& cfg, Rng& rng) {
    ImageRgb img(cfg.synth_width, cfg.synth_height);
    fill_background(img, rng);
    const int shapes = 6 + static_cast<int>(rng.uniform(0.0, 5.0));
    for (int s = 0; s < shapes; ++s) {
        const double kind = rng.next_unit();
        const int x = static_cast<int>(rng.uniform(0.0, img.width - 8.0));
        const int y = static_cast<int>(rng.uniform(0.0, img.height - 8.0));
        if (kind < 0.4) {
            // Brow-like dark bar.
            const int w = 8 + static_cast<int>(rng.uniform(0.0, 22.0));
            const int h = 2 + static_cast<int>(rng.uniform(0.0, 4.0));
            draw_bar(img, Rect{x, y, w, h}, 40 + static_cast<int>(rng.uniform(0.0, 50.0)), rng);
        } else if (kind < 0.7) {
            // Solid dark disc.
            const int r = 2 + static_cast<int>(rng.uniform(0.0, 6.0));
            const int tone = 30 + static_cast<int>(rng.uniform(0.0, 60.0));
            for (int yy = y - r; yy <= y + r; ++yy) {
                for (int xx = x - r; xx <= x + r; ++xx) {
                    if (xx < 0 || xx >= img.width || yy < 0 || yy >= img.height) continue;
                    if ((xx - x) * (xx - x) + (yy - y) * (yy - y) <= r * r) {
                        put_gray(img, xx, yy, tone + jitter(rng, 8));
                    }
                }
            }
        } else if (kind < 0.85) {
            // Ring.
            const int r = 3 + static_cast<int>(rng.uniform(0.0, 6.0));
            const int tone = 40 + static_cast<int>(rng.uniform(0.0, 60.0));
            for (int yy = y - r; yy <= y + r; ++yy) {
                for (int xx = x - r; xx <= x + r; ++xx) {
                    if (xx < 0 || xx >= img.width || yy < 0 || yy >= img.height) continue;
                    const int d2 = (xx - x) * (xx - x) + (yy - y) * (yy - y);
                    if (d2 <= r * r && d2 >= (r - 2) * (r - 2)) {
                        put_gray(img, xx, yy, tone + jitter(rng, 8));
                    }
                }
            }
        } else {
            // Non-skin colored patch (hue well outside the skin band).
            const double h = rng.uniform(0.3, 0.9);
            const int w = 6 + static_cast<int>(rng.uniform(0.0, 14.0));
            const int hh = 6 + static_cast<int>(rng.uniform(0.0, 14.0));
            for (int yy = y; yy < std::min(img.height, y + hh); ++yy) {
                for (int xx = x; xx < std::min(img.width, x + w); ++xx) {
                    put_hsv(img, xx, yy, h, rng.uniform(0.4, 0.8), rng.uniform(0.3, 0.7));
                }
            }
        }
    }
    return img;
}

SynthCorpus synth_corpus(const Config& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        fail(ErrorCode::io, "cannot create directory " + out_dir + ": " + ec.message());
    }

    SynthCorpus corpus;
    char name[32];
    for (int i = 0; i < cfg.synth_faces; ++i) {
        Rng rng(derive_seed(cfg.seed, 0xFACE, static_cast<std::uint64_t>(i)));
        const SynthFace face = make_face(cfg, rng);
        std::snprintf(name, sizeof(name), "face_%03d.png", i);
        save_png(face.image, (fs::path(out_dir) / name).string());
        ManifestEntry e;
        e.path = name;
        e.role = "eye";
        e.boxes = face.eye_boxes;
        corpus.entries.push_back(std::move(e));
    }
    for (int i = 0; i < cfg.synth_scenery; ++i) {
        Rng rng(derive_seed(cfg.seed, 0x5CE4, static_cast<std::uint64_t>(i)));
        const ImageRgb img = make_scenery(cfg, rng);
        std::snprintf(name, sizeof(name), "scenery_%03d.png", i);
        save_png(img, (fs::path(out_dir) / name).string());
        ManifestEntry e;
        e.path = name;
        e.role = "scenery";
        corpus.entries.push_back(std::move(e));
    }
    corpus.manifest_path = (fs::path(out_dir) / "manifest.jsonl").string();
    save_manifest(corpus.entries, corpus.manifest_path);
    return corpus;
}

} // namespace eyespot
