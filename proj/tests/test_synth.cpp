#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "color.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "detector.hpp"
#include "error.hpp"
#include "image.hpp"
#include "image_io.hpp"
#include "metrics.hpp"
#include "mlp.hpp"
#include "rng.hpp"
#include "synth.hpp"
#include "toolkit.hpp"

using namespace eyespot;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("eyespot_synth_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

bool in_skin_band(double h) { return 0.01 < h && h < 0.1; }

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::io;
}

MlpParams flat_model(int n_in, double b2) {
    MlpParams m;
    m.n_in = n_in;
    m.n_hidden = 2;
    m.w1.assign(static_cast<std::size_t>(m.n_hidden) * n_in, 0.0);
    m.b1.assign(m.n_hidden, 0.0);
    m.w2.assign(m.n_hidden, 0.0);
    m.b2 = b2;
    return m;
}

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

/// Gray canvas, interior skin face, two dark eye patches at known boxes.
ImageRgb two_eye_face() {
    ImageRgb img(120, 100);
    fill_rect(img, Rect{0, 0, 120, 100}, 128, 128, 128);
    fill_rect(img, Rect{10, 10, 100, 80}, 204, 133, 102);
    fill_rect(img, Rect{30, 30, 7, 5}, 40, 40, 40);
    fill_rect(img, Rect{54, 30, 7, 5}, 40, 40, 40);
    return img;
}

} // namespace

TEST_CASE("synthetic faces keep every pixel achromatic or strictly skin-hued") {
    Config cfg;
    Rng rng(derive_seed(7, 0xFACE, 0));
    const SynthFace face = make_face(cfg, rng);

    CHECK(face.image.width == cfg.synth_width);
    CHECK(face.image.height == cfg.synth_height);
    CHECK(face.face_rect.x >= 0);
    CHECK(face.face_rect.y >= 0);
    CHECK(face.face_rect.x + face.face_rect.w <= cfg.synth_width);
    CHECK(face.face_rect.y + face.face_rect.h <= cfg.synth_height);

    for (int y = 0; y < face.image.height; ++y) {
        for (int x = 0; x < face.image.width; ++x) {
            const std::uint8_t* p = face.image.pixel(x, y);
            const double h = rgb_to_hsv(p[0], p[1], p[2]).h;
            const bool skin = in_skin_band(h);
            const bool achromatic = h == 0.0;
            CHECK((skin || achromatic));
            if (!face.face_rect.contains(x, y)) {
                CHECK(achromatic); // background and bar spill never look like skin
            }
        }
    }
}

TEST_CASE("synthetic eye boxes sit inside the face with centered truth points") {
    Config cfg;
    Rng rng(derive_seed(11, 0xFACE, 3));
    const SynthFace face = make_face(cfg, rng);

    REQUIRE(face.eye_boxes.size() == 2);
    REQUIRE(face.eye_centers.size() == 2);
    CHECK(face.eye_boxes[0].x < face.eye_boxes[1].x);
    for (std::size_t i = 0; i < 2; ++i) {
        const Rect& b = face.eye_boxes[i];
        CHECK(b.x >= face.face_rect.x);
        CHECK(b.y >= face.face_rect.y);
        CHECK(b.x + b.w <= face.face_rect.x + face.face_rect.w);
        CHECK(b.y + b.h <= face.face_rect.y + face.face_rect.h);
        CHECK(b.w % 2 == 1); // odd extent keeps the center on a pixel
        CHECK(b.h % 2 == 1);
        CHECK(b.center().x == face.eye_centers[i].x);
        CHECK(b.center().y == face.eye_centers[i].y);

        // The pupil keeps the patch visibly darker than skin.
        int darkest = 255;
        for (int y = b.y; y < b.y + b.h; ++y)
            for (int x = b.x; x < b.x + b.w; ++x)
                darkest = std::min(darkest, static_cast<int>(face.image.pixel(x, y)[0]));
        CHECK(darkest < 100);
    }
}

TEST_CASE("synthetic faces are deterministic in the seed") {
    Config cfg;
    Rng a(derive_seed(9, 0xFACE, 5));
    Rng b(derive_seed(9, 0xFACE, 5));
    Rng c(derive_seed(9, 0xFACE, 6));
    const SynthFace fa = make_face(cfg, a);
    const SynthFace fb = make_face(cfg, b);
    const SynthFace fc = make_face(cfg, c);
    CHECK(fa.image.data == fb.image.data);
    CHECK(fa.face_rect == fb.face_rect);
    CHECK(fa.eye_boxes == fb.eye_boxes);
    CHECK(fa.image.data != fc.image.data);
}

TEST_CASE("scenery never triggers the skin detector") {
    Config cfg;
    for (int i = 0; i < 3; ++i) {
        Rng rng(derive_seed(21, 0x5CE4, static_cast<std::uint64_t>(i)));
        const ImageRgb img = make_scenery(cfg, rng);
        CHECK(img.width == cfg.synth_width);
        const BinaryMask mask = skin_mask(img, cfg);
        int set = 0;
        for (int y = 0; y < mask.height; ++y)
            for (int x = 0; x < mask.width; ++x) set += mask.at(x, y);
        CHECK(set == 0);
    }
}

TEST_CASE("the skin pipeline recovers planted eye boxes exactly") {
    Config cfg;
    cfg.seed = 42;
    Rng rng(derive_seed(cfg.seed, 0xFACE, 0));
    const SynthFace face = make_face(cfg, rng);

    const auto region = face_region(skin_mask(face.image, cfg), cfg);
    REQUIRE(region.has_value());
    CHECK(iou(*region, face.face_rect) > 0.9);

    const std::vector<Rect> cands = eye_candidates(face.image, *region, cfg);
    for (const Rect& truth : face.eye_boxes) {
        CHECK(std::count(cands.begin(), cands.end(), truth) == 1);
    }
}

TEST_CASE("a synthesized corpus round-trips through its manifest") {
    const auto dir = temp_dir("corpus");
    Config cfg;
    cfg.synth_faces = 3;
    cfg.synth_scenery = 2;
    cfg.seed = 7;

    const SynthCorpus corpus = synth_corpus(cfg, dir.string());
    CHECK(corpus.manifest_path == (dir / "manifest.jsonl").string());
    REQUIRE(corpus.entries.size() == 5);
    for (int i = 0; i < 3; ++i) {
        CHECK(corpus.entries[i].path == "face_00" + std::to_string(i) + ".png");
        CHECK(corpus.entries[i].role == "eye");
        CHECK(corpus.entries[i].boxes.size() == 2);
    }
    for (int i = 3; i < 5; ++i) {
        CHECK(corpus.entries[i].role == "scenery");
        CHECK(corpus.entries[i].boxes.empty());
        CHECK(corpus.entries[i].points.empty());
    }

    const auto loaded = load_manifest(corpus.manifest_path);
    REQUIRE(loaded.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(loaded[i].path == corpus.entries[i].path);
        CHECK(loaded[i].role == corpus.entries[i].role);
        CHECK(loaded[i].boxes == corpus.entries[i].boxes);
    }

    // Images on disk reproduce the per-index generator streams.
    Rng rng(derive_seed(7, 0xFACE, 0));
    const SynthFace face0 = make_face(cfg, rng);
    const ImageRgb from_disk = load_image((dir / "face_000.png").string());
    CHECK(from_disk.data == face0.image.data);
}

TEST_CASE("corpus synthesis is byte-identical across reruns") {
    const auto dir_a = temp_dir("rerun_a");
    const auto dir_b = temp_dir("rerun_b");
    Config cfg;
    cfg.synth_faces = 2;
    cfg.synth_scenery = 1;
    cfg.seed = 31;
    synth_corpus(cfg, dir_a.string());
    synth_corpus(cfg, dir_b.string());
    for (const char* name :
         {"face_000.png", "face_001.png", "scenery_000.png", "manifest.jsonl"}) {
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    }
}

TEST_CASE("config resolution prefers the explicit path over the environment") {
    const auto dir = temp_dir("cfg");
    const auto file_a = dir / "a.cfg";
    const auto file_b = dir / "b.cfg";
    std::ofstream(file_a) << "[train]\nepochs = 7\n";
    std::ofstream(file_b) << "[train]\nepochs = 9\n";

    CHECK(resolve_config("", {}).epochs == Config{}.epochs);
    CHECK(resolve_config(file_a.string(), {}).epochs == 7);

    setenv("EYESPOT_CONFIG", file_a.string().c_str(), 1);
    CHECK(resolve_config("", {}).epochs == 7);
    CHECK(resolve_config(file_b.string(), {}).epochs == 9);
    CHECK(resolve_config("", {"train.epochs=11"}).epochs == 11);

    setenv("EYESPOT_CONFIG", (dir / "missing.cfg").string().c_str(), 1);
    CHECK(code_of([&] { resolve_config("", {}); }) == ErrorCode::io);
    unsetenv("EYESPOT_CONFIG");

    CHECK_THROWS_AS(resolve_config("", {"train.bogus=1"}), Error);
    // Overrides are validated as a whole: this width exceeds half the canvas.
    CHECK_THROWS_AS(resolve_config("", {"window.width=100"}), Error);
}

TEST_CASE("dataset files are built from manifest eye entries") {
    const auto dir = temp_dir("make_ds");
    Config cfg;
    cfg.synth_faces = 2;
    cfg.synth_scenery = 1;
    cfg.seed = 5;
    cfg.augment_count = 3;
    const SynthCorpus corpus = synth_corpus(cfg, dir.string());

    const auto out = (dir / "cache.eyeds").string();
    const DatasetSummary summary = make_dataset_file(corpus.manifest_path, cfg, out);
    CHECK(summary.total == 12); // 2 faces x 2 eyes x 3 augmentations
    CHECK(summary.positives == 12);

    const std::vector<Sample> samples = load_dataset(out);
    REQUIRE(samples.size() == 12);
    for (const Sample& s : samples) {
        CHECK(s.label == 1);
        CHECK(s.vec.size() == static_cast<std::size_t>(cfg.window_w * cfg.window_h));
    }

    CHECK(code_of([&] { make_dataset_file((dir / "nope.jsonl").string(), cfg, out); }) ==
          ErrorCode::io);
    const auto empty = dir / "empty.jsonl";
    std::ofstream(empty).flush();
    CHECK(code_of([&] { make_dataset_file(empty.string(), cfg, out); }) == ErrorCode::format);

    // A manifest without eye entries yields no samples.
    const auto bare = dir / "bare.jsonl";
    {
        ManifestEntry e;
        e.path = "scenery_000.png";
        e.role = "scenery";
        save_manifest({e}, bare.string());
    }
    CHECK(code_of([&] { make_dataset_file(bare.string(), cfg, out); }) == ErrorCode::format);
}

TEST_CASE("training from files writes a loadable model") {
    const auto dir = temp_dir("train");
    Config cfg;
    cfg.synth_faces = 2;
    cfg.synth_scenery = 1;
    cfg.seed = 5;
    cfg.augment_count = 3;
    cfg.n_hidden = 4;
    cfg.epochs = 2;
    cfg.mining_rounds = 1;
    cfg.initial_negatives = 6;
    cfg.mining_max_new = 4;
    cfg.mining_stride = 8;
    const SynthCorpus corpus = synth_corpus(cfg, dir.string());
    const auto cache = (dir / "cache.eyeds").string();
    make_dataset_file(corpus.manifest_path, cfg, cache);

    std::vector<std::string> lines;
    const auto model_path = (dir / "model.eyemlp").string();
    const TrainSummary summary =
        train_file(cache, corpus.manifest_path, cfg, model_path,
                   [&](const std::string& line) { lines.push_back(line); });

    int productive = 0;
    for (int mined : summary.mined_per_round)
        if (mined > 0) ++productive;
    CHECK(summary.passes == 1 + productive);
    CHECK(static_cast<int>(summary.mined_per_round.size()) <= cfg.mining_rounds);

    int epoch_lines = 0;
    int round_lines = 0;
    for (const std::string& line : lines) {
        if (line.rfind("pass ", 0) == 0) ++epoch_lines;
        if (line.rfind("round ", 0) == 0) ++round_lines;
    }
    CHECK(epoch_lines == summary.passes * cfg.epochs);
    CHECK(round_lines == static_cast<int>(summary.mined_per_round.size()));

    const MlpParams model = load_model(model_path);
    CHECK(model.n_in == cfg.window_w * cfg.window_h);
    CHECK(model.n_hidden == 4);
}

TEST_CASE("detect_file reads an image and reports detections") {
    const auto dir = temp_dir("detect");
    Config cfg;
    const ImageRgb img = two_eye_face();
    const auto png = (dir / "face.png").string();
    save_png(img, png);

    const MlpParams model = flat_model(cfg.window_w * cfg.window_h, 5.0);
    const DetectResult res = detect_file(png, model, cfg);
    REQUIRE(res.face.has_value());
    REQUIRE(res.detections.size() == 2);
    CHECK(res.detections[0].box == Rect{30, 30, 7, 5});
    CHECK(res.detections[1].box == Rect{54, 30, 7, 5});

    CHECK(code_of([&] { detect_file((dir / "nope.png").string(), model, cfg); }) ==
          ErrorCode::io);
}

TEST_CASE("detection records serialize one JSON line per image") {
    DetectResult res;
    res.face = Rect{10, 10, 100, 80};
    res.detections.push_back(Detection{Rect{30, 30, 7, 5}, 0.97, *res.face});
    const auto j = nlohmann::json::parse(detection_json_line("imgs/face.png", res));
    CHECK(j["path"] == "imgs/face.png");
    CHECK(j["face"] == nlohmann::json({10, 10, 100, 80}));
    REQUIRE(j["eyes"].size() == 1);
    CHECK(j["eyes"][0]["box"] == nlohmann::json({30, 30, 7, 5}));
    CHECK(j["eyes"][0]["score"].get<double>() == doctest::Approx(0.97));

    const auto empty = nlohmann::json::parse(detection_json_line("none.png", DetectResult{}));
    CHECK(empty["face"].is_null());
    CHECK(empty["eyes"].empty());
}

TEST_CASE("annotation draws the face and eye outlines") {
    const auto dir = temp_dir("annot");
    Config cfg;
    const ImageRgb img = two_eye_face();
    const MlpParams model = flat_model(cfg.window_w * cfg.window_h, 5.0);
    const CanonicalLayout layout = layout_from_config(cfg);
    const Preprocessor pre(cfg);
    const DetectResult res = detect(img, model, layout, pre, cfg);
    REQUIRE(res.face.has_value());

    const auto out = (dir / "annot.png").string();
    annotate_png(img, res, out);
    const ImageRgb back = load_image(out);
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    const std::uint8_t* face_px = back.pixel(res.face->x, res.face->y);
    CHECK(face_px[0] == 0);
    CHECK(face_px[1] == 200);
    CHECK(face_px[2] == 0);
    const std::uint8_t* eye_px = back.pixel(30, 30);
    CHECK(eye_px[0] == 220);
    CHECK(eye_px[1] == 0);
    CHECK(eye_px[2] == 0);
}

TEST_CASE("manifest evaluation scores detections against truth boxes") {
    const auto dir = temp_dir("eval");
    Config cfg;
    save_png(two_eye_face(), (dir / "face.png").string());
    ImageRgb gray(60, 50);
    fill_rect(gray, Rect{0, 0, 60, 50}, 128, 128, 128);
    save_png(gray, (dir / "gray.png").string());

    std::vector<ManifestEntry> entries(2);
    entries[0].path = "face.png";
    entries[0].role = "eye";
    entries[0].boxes = {Rect{30, 30, 7, 5}, Rect{54, 30, 7, 5}};
    entries[1].path = "gray.png";
    entries[1].role = "scenery";
    const auto manifest = (dir / "manifest.jsonl").string();
    save_manifest(entries, manifest);

    const int n_in = cfg.window_w * cfg.window_h;
    const EvalOutcome good = eval_manifest(manifest, flat_model(n_in, 5.0), cfg);
    CHECK(good.report.counts.tp == 2);
    CHECK(good.report.counts.fn == 0);
    CHECK(good.report.counts.fp == 0);
    CHECK(good.report.images == 1);
    REQUIRE(good.successes.size() == 1);
    CHECK(good.successes[0]);
    CHECK(*good.report.sensitivity == doctest::Approx(1.0));

    // A flat rejecting model: both truths unmatched and both candidate
    // windows rejected over truth, so each eye is counted twice as FN.
    const EvalOutcome bad = eval_manifest(manifest, flat_model(n_in, 0.0), cfg);
    CHECK(bad.report.counts.tp == 0);
    CHECK(bad.report.counts.fn == 4);
    CHECK(!bad.report.specificity.has_value());
    CHECK(!bad.successes[0]);
}

TEST_CASE("manifest evaluation rejects unusable manifests") {
    const auto dir = temp_dir("eval_err");
    Config cfg;
    const MlpParams model = flat_model(cfg.window_w * cfg.window_h, 5.0);

    CHECK(code_of([&] { eval_manifest((dir / "nope.jsonl").string(), model, cfg); }) ==
          ErrorCode::io);

    const auto empty = dir / "empty.jsonl";
    std::ofstream(empty).flush();
    CHECK(code_of([&] { eval_manifest(empty.string(), model, cfg); }) == ErrorCode::format);

    // Eye entries without boxes cannot be scored.
    save_png(two_eye_face(), (dir / "face.png").string());
    std::vector<ManifestEntry> entries(1);
    entries[0].path = "face.png";
    entries[0].role = "eye";
    entries[0].points = {Point{30.0, 32.0}, Point{36.0, 32.0}};
    const auto boxless = (dir / "boxless.jsonl").string();
    save_manifest(entries, boxless);
    CHECK(code_of([&] { eval_manifest(boxless, model, cfg); }) == ErrorCode::format);

    // Scenery-only manifests have no images to succeed on.
    ImageRgb gray(60, 50);
    fill_rect(gray, Rect{0, 0, 60, 50}, 128, 128, 128);
    save_png(gray, (dir / "gray.png").string());
    entries[0] = ManifestEntry{};
    entries[0].path = "gray.png";
    entries[0].role = "scenery";
    const auto bare = (dir / "bare.jsonl").string();
    save_manifest(entries, bare);
    CHECK(code_of([&] { eval_manifest(bare, model, cfg); }) == ErrorCode::format);
}

TEST_CASE("gabor preview renders one PNG per bank kernel") {
    const auto dir = temp_dir("preview");
    Config cfg; // bank defaults: 2 wavelengths x 4 orientations x 1 phase
    const std::vector<std::string> paths = gabor_preview(cfg, dir.string());
    REQUIRE(paths.size() == 8);
    CHECK(std::filesystem::path(paths[0]).filename() == "kernel_w4_o0_p0.png");
    CHECK(std::filesystem::path(paths[7]).filename() == "kernel_w8_o135_p0.png");
    for (const std::string& p : paths) {
        CHECK(std::filesystem::exists(p));
    }
    const ImageRgb k0 = load_image(paths[0]);
    CHECK(k0.width == 15); // auto kernel size for wavelength 4, bandwidth 1
    CHECK(k0.width == k0.height);
    const ImageRgb k4 = load_image(paths[4]);
    CHECK(k4.width == 29); // wavelength 8 doubles the support
}
