#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "color.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "detector.hpp"
#include "error.hpp"
#include "image.hpp"
#include "mlp.hpp"
#include "morphology.hpp"

using namespace eyespot;

namespace {

constexpr std::uint8_t kSkin[3] = {204, 133, 102}; // hue ~0.0507, inside the band
constexpr std::uint8_t kDark[3] = {40, 40, 40};    // achromatic, hue 0, L ~ 16

void fill_rect(ImageRgb& img, const Rect& r, std::uint8_t cr, std::uint8_t cg, std::uint8_t cb) {
    for (int y = r.y; y < r.y + r.h; ++y) {
        for (int x = r.x; x < r.x + r.w; ++x) {
            std::uint8_t* p = img.pixel(x, y);
            p[0] = cr;
            p[1] = cg;
            p[2] = cb;
        }
    }
}

ImageRgb skin_canvas(int w, int h) {
    ImageRgb img(w, h);
    fill_rect(img, Rect{0, 0, w, h}, kSkin[0], kSkin[1], kSkin[2]);
    return img;
}

MlpParams flat_model(int n_in, double b2) {
    MlpParams m;
    m.n_in = n_in;
    m.n_hidden = 3;
    m.w1.assign(static_cast<std::size_t>(m.n_hidden) * n_in, 0.0);
    m.b1.assign(m.n_hidden, 0.0);
    m.w2.assign(m.n_hidden, 0.0);
    m.b2 = b2;
    return m;
}

bool near(double a, double b, double tol = 5e-15) { return std::abs(a - b) <= tol; }

} // namespace

TEST_CASE("skin mask is strict on both hue edges") {
    Config cfg; // hue band (0.01, 0.1)

    // (200,106,100) lands exactly on the lower edge: h6 = 6/100, h = 0.01.
    CHECK(rgb_to_hsv(200, 106, 100).h == 0.01);

    ImageRgb img(4, 1);
    auto set = [&](int x, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        std::uint8_t* p = img.pixel(x, 0);
        p[0] = r;
        p[1] = g;
        p[2] = b;
    };
    set(0, 210, 170, 150); // h = 1/18, inside
    set(1, 128, 128, 128); // achromatic, h = 0
    set(2, 200, 106, 100); // exactly hue_lo
    set(3, 200, 107, 100); // just above hue_lo

    const BinaryMask m = skin_mask(img, cfg);
    CHECK(m.at(0, 0) == 1);
    CHECK(m.at(1, 0) == 0);
    CHECK(m.at(2, 0) == 0);
    CHECK(m.at(3, 0) == 1);

    // No integer triple reaches hue 0.1 exactly, so pin the upper edge by
    // moving it onto an achievable hue.
    Config edge = cfg;
    edge.hue_hi = rgb_to_hsv(160, 136, 100).h;
    ImageRgb img2(2, 1);
    {
        std::uint8_t* p = img2.pixel(0, 0);
        p[0] = 160; p[1] = 136; p[2] = 100; // exactly hue_hi
        p = img2.pixel(1, 0);
        p[0] = 160; p[1] = 135; p[2] = 100; // one step below
    }
    const BinaryMask m2 = skin_mask(img2, edge);
    CHECK(m2.at(0, 0) == 0);
    CHECK(m2.at(1, 0) == 1);
}

TEST_CASE("face region is the largest cleaned skin component") {
    Config cfg;

    BinaryMask empty(40, 30);
    CHECK(!face_region(empty, cfg).has_value());

    BinaryMask two(40, 30);
    for (int y = 2; y < 10; ++y)
        for (int x = 2; x < 12; ++x) two.at(x, y) = 1;
    for (int y = 15; y < 19; ++y)
        for (int x = 20; x < 26; ++x) two.at(x, y) = 1;
    const auto face = face_region(two, cfg);
    REQUIRE(face.has_value());
    CHECK(*face == Rect{2, 2, 10, 8});
}

TEST_CASE("face region cleanup fills pinholes and drops speckles") {
    Config cfg;
    BinaryMask m(40, 30);
    for (int y = 2; y < 10; ++y)
        for (int x = 2; x < 12; ++x) m.at(x, y) = 1;
    m.at(5, 5) = 0;  // pinhole, closed away
    m.at(30, 25) = 1; // speckle, opened away
    const auto face = face_region(m, cfg);
    REQUIRE(face.has_value());
    CHECK(*face == Rect{2, 2, 10, 8});
}

TEST_CASE("face region enforces the minimum area fraction") {
    Config cfg;
    cfg.face_min_area_frac = 0.05; // 60 of 1200 pixels
    BinaryMask m(40, 30);
    for (int y = 5; y < 8; ++y)
        for (int x = 5; x < 8; ++x) m.at(x, y) = 1; // area 9
    CHECK(!face_region(m, cfg).has_value());
    cfg.face_min_area_frac = 0.005; // 6 pixels
    const auto face = face_region(m, cfg);
    REQUIRE(face.has_value());
    CHECK(*face == Rect{5, 5, 3, 3});
}

TEST_CASE("eye candidates are dark non-skin patches in the upper face") {
    Config cfg;
    ImageRgb img = skin_canvas(120, 100);
    fill_rect(img, Rect{20, 20, 7, 5}, kDark[0], kDark[1], kDark[2]);
    fill_rect(img, Rect{44, 20, 7, 5}, kDark[0], kDark[1], kDark[2]);
    const Rect face{0, 0, 120, 100};
    const std::vector<Rect> cands = eye_candidates(img, face, cfg);
    REQUIRE(cands.size() == 2);
    CHECK(cands[0] == Rect{20, 20, 7, 5});
    CHECK(cands[1] == Rect{44, 20, 7, 5});
}

TEST_CASE("candidate boxes come back in image coordinates") {
    Config cfg;
    ImageRgb img(120, 100);
    fill_rect(img, Rect{0, 0, 120, 100}, 128, 128, 128);
    fill_rect(img, Rect{10, 10, 100, 80}, kSkin[0], kSkin[1], kSkin[2]);
    fill_rect(img, Rect{30, 30, 7, 5}, kDark[0], kDark[1], kDark[2]);
    const std::vector<Rect> cands = eye_candidates(img, Rect{10, 10, 100, 80}, cfg);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0] == Rect{30, 30, 7, 5});
}

TEST_CASE("the position gate drops low components") {
    Config cfg; // upper_fraction 0.6 of a 100-tall face: center row must be < 60
    ImageRgb img = skin_canvas(120, 100);
    fill_rect(img, Rect{30, 70, 7, 5}, kDark[0], kDark[1], kDark[2]);
    CHECK(eye_candidates(img, Rect{0, 0, 120, 100}, cfg).empty());
}

TEST_CASE("the lightness gate drops components brighter than the face") {
    Config cfg;
    ImageRgb img = skin_canvas(120, 100);
    fill_rect(img, Rect{20, 20, 7, 5}, 255, 255, 255);
    CHECK(eye_candidates(img, Rect{0, 0, 120, 100}, cfg).empty());
}

TEST_CASE("the aspect gate drops elongated components") {
    Config cfg; // aspect bound 10
    ImageRgb img = skin_canvas(120, 100);
    fill_rect(img, Rect{20, 20, 36, 3}, kDark[0], kDark[1], kDark[2]);
    CHECK(eye_candidates(img, Rect{0, 0, 120, 100}, cfg).empty());
}

TEST_CASE("the area gates drop oversized and undersized components") {
    Config cfg; // face 120x100: area window [6, 600]
    ImageRgb big = skin_canvas(120, 100);
    fill_rect(big, Rect{10, 8, 40, 30}, kDark[0], kDark[1], kDark[2]); // area 1200
    CHECK(eye_candidates(big, Rect{0, 0, 120, 100}, cfg).empty());

    ImageRgb small = skin_canvas(120, 100);
    fill_rect(small, Rect{20, 20, 4, 4}, kDark[0], kDark[1], kDark[2]); // area 16
    CHECK(eye_candidates(small, Rect{0, 0, 120, 100}, cfg).size() == 1);
    cfg.cand_min_area_frac = 0.002; // raises the floor to 24
    CHECK(eye_candidates(small, Rect{0, 0, 120, 100}, cfg).empty());
}

TEST_CASE("eye candidates reject degenerate face boxes") {
    Config cfg;
    ImageRgb img = skin_canvas(40, 30);
    CHECK_THROWS_AS(eye_candidates(img, Rect{0, 0, 1, 5}, cfg), Error);
    CHECK_THROWS_AS(eye_candidates(img, Rect{0, 0, 41, 30}, cfg), Error);
    CHECK_THROWS_AS(eye_candidates(img, Rect{-1, 0, 10, 10}, cfg), Error);
}

TEST_CASE("a flat model at the threshold yields scores but no winners") {
    Config cfg;
    const CanonicalLayout layout = layout_from_config(cfg);
    const Preprocessor pre(cfg);
    const MlpParams model = flat_model(cfg.window_w * cfg.window_h, 0.0);

    ImageRgb img = skin_canvas(120, 100);
    fill_rect(img, Rect{20, 20, 7, 5}, kDark[0], kDark[1], kDark[2]);
    const ImageGray gray = to_gray(img);
    const std::vector<Rect> cands{{20, 20, 7, 5}, {44, 20, 7, 5}};

    std::vector<ScoredCandidate> scored;
    const auto winners = classify_candidates(model, gray, cands, layout, pre,
                                             Rect{0, 0, 120, 100}, cfg, &scored);
    CHECK(winners.empty()); // 0.5 is not strictly above the 0.5 threshold
    REQUIRE(scored.size() == 2);
    CHECK(scored[0].score == 0.5);
    CHECK(scored[1].score == 0.5);
    CHECK(scored[0].box == cands[0]);
    CHECK(scored[1].box == cands[1]);
}

TEST_CASE("winners respect the horizontal separation constraint") {
    Config cfg; // min separation 0.2 * face width
    const CanonicalLayout layout = layout_from_config(cfg);
    const Preprocessor pre(cfg);
    const MlpParams model = flat_model(cfg.window_w * cfg.window_h, 5.0);
    const Rect face{0, 0, 120, 100}; // min_sep = 24
    const ImageGray gray = to_gray(skin_canvas(120, 100));

    // Centers 23 and 33: closer than 24, so the tie resolves to the first.
    const std::vector<Rect> close{{20, 20, 7, 5}, {30, 20, 7, 5}};
    const auto one = classify_candidates(model, gray, close, layout, pre, face, cfg);
    REQUIRE(one.size() == 1);
    CHECK(one[0].box == Rect{20, 20, 7, 5});
    CHECK(near(one[0].score, 0.9933071490757153));
    CHECK(one[0].face == face);

    // Centers 23 and 47: exactly 24 apart, which is allowed.
    const std::vector<Rect> apart{{20, 20, 7, 5}, {44, 20, 7, 5}};
    const auto two = classify_candidates(model, gray, apart, layout, pre, face, cfg);
    REQUIRE(two.size() == 2);
    CHECK(two[0].box == Rect{20, 20, 7, 5});
    CHECK(two[1].box == Rect{44, 20, 7, 5});
}

TEST_CASE("the winner count is capped") {
    Config cfg;
    const CanonicalLayout layout = layout_from_config(cfg);
    const Preprocessor pre(cfg);
    const MlpParams model = flat_model(cfg.window_w * cfg.window_h, 5.0);
    const Rect face{0, 0, 120, 100};
    const ImageGray gray = to_gray(skin_canvas(120, 100));

    const std::vector<Rect> three{{20, 20, 7, 5}, {44, 20, 7, 5}, {68, 20, 7, 5}};
    CHECK(classify_candidates(model, gray, three, layout, pre, face, cfg).size() == 2);
    cfg.winners = 1;
    CHECK(classify_candidates(model, gray, three, layout, pre, face, cfg).size() == 1);
    cfg.winners = 3;
    CHECK(classify_candidates(model, gray, three, layout, pre, face, cfg).size() == 3);
}

TEST_CASE("classifying no candidates yields nothing") {
    Config cfg;
    const CanonicalLayout layout = layout_from_config(cfg);
    const Preprocessor pre(cfg);
    const MlpParams model = flat_model(cfg.window_w * cfg.window_h, 5.0);
    const ImageGray gray = to_gray(skin_canvas(60, 50));

    std::vector<ScoredCandidate> scored{{Rect{1, 1, 2, 2}, 9.0}}; // must be cleared
    const auto winners = classify_candidates(model, gray, {}, layout, pre,
                                             Rect{0, 0, 60, 50}, cfg, &scored);
    CHECK(winners.empty());
    CHECK(scored.empty());
}

TEST_CASE("detect finds planted eyes on a synthetic face") {
    Config cfg;
    const CanonicalLayout layout = layout_from_config(cfg);
    const Preprocessor pre(cfg);
    const MlpParams model = flat_model(cfg.window_w * cfg.window_h, 5.0);

    // Face as an interior rectangle: a full-canvas face would lose its border
    // ring to the morphological cleanup.
    ImageRgb img(120, 100);
    fill_rect(img, Rect{0, 0, 120, 100}, 128, 128, 128);
    fill_rect(img, Rect{10, 10, 100, 80}, kSkin[0], kSkin[1], kSkin[2]);
    fill_rect(img, Rect{30, 30, 7, 5}, kDark[0], kDark[1], kDark[2]);
    fill_rect(img, Rect{54, 30, 7, 5}, kDark[0], kDark[1], kDark[2]);

    const DetectResult res = detect(img, model, layout, pre, cfg);
    REQUIRE(res.face.has_value());
    CHECK(*res.face == Rect{10, 10, 100, 80});
    REQUIRE(res.detections.size() == 2);
    CHECK(res.detections[0].box == Rect{30, 30, 7, 5});
    CHECK(res.detections[1].box == Rect{54, 30, 7, 5});
    CHECK(res.detections[0].face == *res.face);
    CHECK(res.scored.size() == 2);
}

TEST_CASE("detect without skin reports no face and no detections") {
    Config cfg;
    const CanonicalLayout layout = layout_from_config(cfg);
    const Preprocessor pre(cfg);
    const MlpParams model = flat_model(cfg.window_w * cfg.window_h, 5.0);

    ImageRgb gray_img(60, 50);
    fill_rect(gray_img, Rect{0, 0, 60, 50}, 128, 128, 128);
    const DetectResult res = detect(gray_img, model, layout, pre, cfg);
    CHECK(!res.face.has_value());
    CHECK(res.detections.empty());
    CHECK(res.scored.empty());
}

TEST_CASE("detect with a rejecting model still reports scored candidates") {
    Config cfg;
    const CanonicalLayout layout = layout_from_config(cfg);
    const Preprocessor pre(cfg);
    const MlpParams model = flat_model(cfg.window_w * cfg.window_h, 0.0);

    ImageRgb img(120, 100);
    fill_rect(img, Rect{0, 0, 120, 100}, 128, 128, 128);
    fill_rect(img, Rect{10, 10, 100, 80}, kSkin[0], kSkin[1], kSkin[2]);
    fill_rect(img, Rect{30, 30, 7, 5}, kDark[0], kDark[1], kDark[2]);
    const DetectResult res = detect(img, model, layout, pre, cfg);
    REQUIRE(res.face.has_value());
    CHECK(res.detections.empty());
    REQUIRE(res.scored.size() == 1);
    CHECK(res.scored[0].score == 0.5);
}
