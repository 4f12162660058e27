#include "dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "binio.hpp"
#include "error.hpp"
#include "image_io.hpp"

namespace eyespot {

namespace {

constexpr double kNormEps = 1e-8;

std::array<Point, 2> canonical_slots(int window_w, int window_h, double margin) {
    if (window_w < 2 || window_h < 1 || !(margin > 0.0 && margin < 0.5)) {
        fail(ErrorCode::invalid_argument, "bad window geometry for the canonical layout");
    }
    const double y = (window_h - 1) / 2.0;
    return {Point{margin * (window_w - 1), y}, Point{(1.0 - margin) * (window_w - 1), y}};
}

} // namespace

std::vector<Point> mean_feature_points(const std::vector<std::vector<Point>>& sets) {
    if (sets.empty() || sets.front().empty()) {
        fail(ErrorCode::invalid_argument, "need at least one labeled face with points");
    }
    const std::size_t n = sets.front().size();
    std::vector<Point> mean(n, Point{0.0, 0.0});
    for (const auto& set : sets) {
        if (set.size() != n) {
            fail(ErrorCode::invalid_argument, "inconsistent feature point counts");
        }
        for (std::size_t i = 0; i < n; ++i) {
            mean[i].x += set[i].x;
            mean[i].y += set[i].y;
        }
    }
    for (Point& p : mean) {
        p.x /= static_cast<double>(sets.size());
        p.y /= static_cast<double>(sets.size());
    }
    return mean;
}

CanonicalLayout compute_layout(const std::vector<std::vector<Point>>& sets, int window_w,
                               int window_h, double margin) {
    const std::vector<Point> ff = mean_feature_points(sets);
    if (ff.size() != 2) {
        fail(ErrorCode::invalid_argument, "canonical layout mapping needs exactly 2 points");
    }
    const auto slots = canonical_slots(window_w, window_h, margin);
    const std::vector<Point> target(slots.begin(), slots.end());
    const SimilarityTransform t = estimate_similarity(ff, target);
    CanonicalLayout layout;
    layout.window_w = window_w;
    layout.window_h = window_h;
    layout.points.reserve(ff.size());
    for (const Point& p : ff) {
        layout.points.push_back(t.apply(p));
    }
    return layout;
}

CanonicalLayout layout_from_config(const Config& cfg) {
    const auto slots = canonical_slots(cfg.window_w, cfg.window_h, cfg.layout_margin);
    CanonicalLayout layout;
    layout.window_w = cfg.window_w;
    layout.window_h = cfg.window_h;
    layout.points.assign(slots.begin(), slots.end());
    return layout;
}

std::array<Point, 2> points_from_box(const Rect& box) {
    if (box.w < 1 || box.h < 1) {
        fail(ErrorCode::invalid_argument, "degenerate eye box");
    }
    const double y = box.y + (box.h - 1) / 2.0;
    return {Point{static_cast<double>(box.x), y}, Point{static_cast<double>(box.x + box.w - 1), y}};
}

ImageGray align_crop(const ImageGray& img, std::span<const Point> feature_points,
                     const CanonicalLayout& layout) {
    if (layout.points.size() < 2 || layout.window_w < 1 || layout.window_h < 1) {
        fail(ErrorCode::invalid_argument, "malformed canonical layout");
    }
    if (feature_points.size() != layout.points.size()) {
        fail(ErrorCode::invalid_argument, "feature point count does not match the layout");
    }
    const SimilarityTransform t = estimate_similarity(feature_points, layout.points);
    return warp_similarity(img, t, layout.window_w, layout.window_h);
}

std::vector<AugmentedWindow> augment(const ImageGray& window, const AugmentConfig& cfg) {
    if (cfg.count < 1) {
        fail(ErrorCode::invalid_argument, "augment count must be at least 1");
    }
    if (!(cfg.scale_min > 0.0) || cfg.scale_min > cfg.scale_max || cfg.max_rotation < 0.0 ||
        cfg.max_translation < 0.0) {
        fail(ErrorCode::invalid_argument, "augment ranges must be positive and ordered");
    }
    Rng rng(cfg.seed);
    const Point center{(window.width - 1) / 2.0, (window.height - 1) / 2.0};
    std::vector<AugmentedWindow> out;
    out.reserve(static_cast<std::size_t>(cfg.count));
    for (int i = 0; i < cfg.count; ++i) {
        TransformRecord rec;
        rec.rotation = rng.uniform(-cfg.max_rotation, cfg.max_rotation);
        rec.scale = rng.uniform(cfg.scale_min, cfg.scale_max);
        rec.dx = rng.uniform(-cfg.max_translation, cfg.max_translation);
        rec.dy = rng.uniform(-cfg.max_translation, cfg.max_translation);
        rec.mirrored = cfg.mirror && rng.next_bool();
        const SimilarityTransform t =
            SimilarityTransform::about(center, rec.rotation, rec.scale, rec.dx, rec.dy);
        ImageGray raster = warp_similarity(window, t, window.width, window.height);
        if (rec.mirrored) {
            raster = flip_horizontal(raster);
        }
        out.push_back(AugmentedWindow{std::move(raster), rec});
    }
    return out;
}

Preprocessor::Preprocessor(const Config& cfg)
    : window_w_(cfg.window_w), window_h_(cfg.window_h),
      use_gabor_(cfg.preprocess_mode == "gabor") {
    if (cfg.preprocess_mode != "gabor" && cfg.preprocess_mode != "raw") {
        fail(ErrorCode::invalid_argument, "preprocess mode must be raw or gabor");
    }
    if (use_gabor_) {
        GaborParams p;
        p.wavelength = cfg.preprocess_wavelength;
        p.orientation = cfg.preprocess_orientation_deg * std::numbers::pi / 180.0;
        p.phase = cfg.preprocess_phase_deg * std::numbers::pi / 180.0;
        p.aspect = cfg.preprocess_aspect;
        p.bandwidth = cfg.preprocess_bandwidth;
        kernel_ = make_kernel(p);
    }
}

std::vector<double> Preprocessor::run(const ImageGray& window) const {
    if (window.width != window_w_ || window.height != window_h_) {
        fail(ErrorCode::dimension, "window does not match the configured dimensions");
    }
    std::vector<double> vals;
    if (use_gabor_) {
        const ImageGray resp = convolve(window, kernel_);
        vals.resize(resp.data.size());
        for (std::size_t i = 0; i < vals.size(); ++i) {
            vals[i] = std::abs(resp.data[i]);
        }
    } else {
        vals = window.data;
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(vals.size());
    const double denom = std::sqrt(var) + kNormEps;
    for (double& v : vals) {
        v = (v - mean) / denom;
    }
    return vals;
}

std::vector<Sample> init_random_negatives(int n, const CanonicalLayout& layout,
                                          const Preprocessor& pre, std::uint64_t seed) {
    if (n < 1) {
        fail(ErrorCode::invalid_argument, "negative count must be at least 1");
    }
    Rng rng(seed);
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ImageGray window(layout.window_w, layout.window_h);
        for (double& v : window.data) {
            v = rng.next_unit();
        }
        Sample s;
        s.vec = pre.run(window);
        s.label = 0;
        s.source = "noise:" + std::to_string(i);
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

template <typename Fn>
void for_each_window(const ImageGray& scenery, const CanonicalLayout& layout, int stride,
                     Fn&& fn) {
    if (stride < 1) {
        fail(ErrorCode::invalid_argument, "stride must be at least 1");
    }
    if (scenery.width < layout.window_w || scenery.height < layout.window_h) {
        fail(ErrorCode::dimension, "scenery smaller than the classification window");
    }
    for (int y = 0; y + layout.window_h <= scenery.height; y += stride) {
        for (int x = 0; x + layout.window_w <= scenery.width; x += stride) {
            fn(x, y, crop(scenery, Rect{x, y, layout.window_w, layout.window_h}));
        }
    }
}

} // namespace

MiningResult mine_negatives(const MlpParams& model, const ImageGray& scenery,
                            const CanonicalLayout& layout, const Preprocessor& pre,
                            double threshold, int stride, int max_new, Rng& rng,
                            const std::string& source_id) {
    if (max_new < 1) {
        fail(ErrorCode::invalid_argument, "max_new must be at least 1");
    }
    MiningResult result;
    std::vector<std::pair<int, int>> hits;
    for_each_window(scenery, layout, stride, [&](int x, int y, const ImageGray& win) {
        ++result.scanned;
        if (forward(model, pre.run(win)) > threshold) {
            hits.emplace_back(x, y);
        }
    });
    result.hits = static_cast<int>(hits.size());
    const std::size_t want = std::min<std::size_t>(hits.size(), static_cast<std::size_t>(max_new));
    const std::vector<std::size_t> chosen = rng.sample_indices(hits.size(), want);
    result.picked.reserve(chosen.size());
    for (std::size_t idx : chosen) {
        const auto [x, y] = hits[idx];
        Sample s;
        s.vec = pre.run(crop(scenery, Rect{x, y, layout.window_w, layout.window_h}));
        s.label = 0;
        s.source = source_id + ":" + std::to_string(x) + "," + std::to_string(y);
        result.picked.push_back(std::move(s));
    }
    return result;
}

int count_window_hits(const MlpParams& model, const ImageGray& scenery,
                      const CanonicalLayout& layout, const Preprocessor& pre, double threshold,
                      int stride) {
    int hits = 0;
    for_each_window(scenery, layout, stride, [&](int, int, const ImageGray& win) {
        if (forward(model, pre.run(win)) > threshold) {
            ++hits;
        }
    });
    return hits;
}

BootstrapResult bootstrap_train(const std::vector<Sample>& base_samples,
                                std::span<const ImageGray> scenery,
                                const CanonicalLayout& layout, const Preprocessor& pre,
                                const TrainConfig& train_cfg, const MiningConfig& mining_cfg,
                                int n_hidden, std::uint64_t seed,
                                const BootstrapObserver& observer) {
    const bool has_positive = std::any_of(base_samples.begin(), base_samples.end(),
                                          [](const Sample& s) { return s.label == 1; });
    if (!has_positive || scenery.empty()) {
        fail(ErrorCode::invalid_argument, "bootstrap needs positive samples and scenery");
    }
    const int n_in = layout.window_w * layout.window_h;

    std::vector<TrainSample> samples;
    samples.reserve(base_samples.size() + static_cast<std::size_t>(mining_cfg.initial_negatives));
    auto push = [&](const Sample& s) {
        samples.push_back(TrainSample{s.vec, static_cast<double>(s.label)});
    };
    for (const Sample& s : base_samples) push(s);
    for (const Sample& s :
         init_random_negatives(mining_cfg.initial_negatives, layout, pre,
                               derive_seed(seed, 0xA11, 0))) {
        push(s);
    }

    BootstrapResult result;
    result.model = init_mlp(n_in, n_hidden, derive_seed(seed, 0x1217, 0));

    TrainConfig tc = train_cfg;
    tc.seed = derive_seed(seed, 0x7244, 0);
    TrainResult tr = train(result.model, samples, tc);
    result.model = std::move(tr.model);
    result.loss_histories.push_back(std::move(tr.loss_history));
    if (observer) observer(0, result.model, 0);

    for (int round = 1; round <= mining_cfg.rounds; ++round) {
        Rng pick(derive_seed(seed, 0x313E, static_cast<std::uint64_t>(round)));
        int mined = 0;
        for (std::size_t i = 0; i < scenery.size(); ++i) {
            MiningResult mr =
                mine_negatives(result.model, scenery[i], layout, pre, mining_cfg.threshold,
                               mining_cfg.stride, mining_cfg.max_new, pick,
                               "scenery:" + std::to_string(i));
            mined += static_cast<int>(mr.picked.size());
            for (const Sample& s : mr.picked) push(s);
        }
        result.mined_per_round.push_back(mined);
        if (mined == 0) {
            break;
        }
        tc.seed = derive_seed(seed, 0x7244, static_cast<std::uint64_t>(round));
        tr = train(result.model, samples, tc);
        result.model = std::move(tr.model);
        result.loss_histories.push_back(std::move(tr.loss_history));
        if (observer) observer(round, result.model, mined);
    }
    return result;
}

namespace {

std::string resolve_path(const std::string& manifest_path, const std::string& entry_path) {
    const std::filesystem::path p(entry_path);
    if (p.is_absolute()) {
        return entry_path;
    }
    return (std::filesystem::path(manifest_path).parent_path() / p).string();
}

} // namespace

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::io, "cannot open manifest " + path);
    }
    std::vector<ManifestEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::format, where + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("path") || !j["path"].is_string() ||
            !j.contains("role") || !j["role"].is_string()) {
            fail(ErrorCode::format, where + ": entry needs string 'path' and 'role'");
        }
        ManifestEntry e;
        e.path = j["path"].get<std::string>();
        e.role = j["role"].get<std::string>();
        if (e.role != "eye" && e.role != "scenery") {
            fail(ErrorCode::format, where + ": role must be 'eye' or 'scenery'");
        }
        if (j.contains("points")) {
            if (!j["points"].is_array()) {
                fail(ErrorCode::format, where + ": 'points' must be an array");
            }
            for (const auto& p : j["points"]) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                    fail(ErrorCode::format, where + ": each point must be [x, y]");
                }
                e.points.push_back(Point{p[0].get<double>(), p[1].get<double>()});
            }
        }
        if (j.contains("boxes")) {
            if (!j["boxes"].is_array()) {
                fail(ErrorCode::format, where + ": 'boxes' must be an array");
            }
            for (const auto& b : j["boxes"]) {
                if (!b.is_array() || b.size() != 4) {
                    fail(ErrorCode::format, where + ": each box must be [x, y, w, h]");
                }
                e.boxes.push_back(Rect{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(),
                                       b[3].get<int>()});
            }
        }
        if (e.role == "scenery" && (!e.points.empty() || !e.boxes.empty())) {
            fail(ErrorCode::format, where + ": scenery entries must carry no eye annotations");
        }
        if (e.role == "eye" && e.points.size() % 2 != 0) {
            fail(ErrorCode::format, where + ": points must come in corner pairs");
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

void save_manifest(const std::vector<ManifestEntry>& entries, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::io, "cannot open " + path);
    }
    for (const ManifestEntry& e : entries) {
        nlohmann::json j;
        j["path"] = e.path;
        j["role"] = e.role;
        if (!e.points.empty()) {
            nlohmann::json pts = nlohmann::json::array();
            for (const Point& p : e.points) {
                pts.push_back({p.x, p.y});
            }
            j["points"] = std::move(pts);
        }
        if (!e.boxes.empty()) {
            nlohmann::json boxes = nlohmann::json::array();
            for (const Rect& r : e.boxes) {
                boxes.push_back({r.x, r.y, r.w, r.h});
            }
            j["boxes"] = std::move(boxes);
        }
        out << j.dump() << '\n';
    }
    if (!out) {
        fail(ErrorCode::io, "write failed for " + path);
    }
}

std::vector<Sample> build_positives(const std::vector<ManifestEntry>& entries,
                                    const std::string& manifest_path, const Config& cfg) {
    const CanonicalLayout layout = layout_from_config(cfg);
    const Preprocessor pre(cfg);
    AugmentConfig acfg;
    acfg.count = cfg.augment_count;
    acfg.max_rotation = cfg.augment_max_rotation_deg * std::numbers::pi / 180.0;
    acfg.scale_min = cfg.augment_scale_min;
    acfg.scale_max = cfg.augment_scale_max;
    acfg.max_translation = cfg.augment_max_translation;
    acfg.mirror = cfg.augment_mirror;

    std::vector<Sample> out;
    for (std::size_t entry_idx = 0; entry_idx < entries.size(); ++entry_idx) {
        const ManifestEntry& e = entries[entry_idx];
        if (e.role != "eye") continue;
        std::vector<std::array<Point, 2>> eyes;
        if (!e.points.empty()) {
            for (std::size_t i = 0; i + 1 < e.points.size(); i += 2) {
                eyes.push_back({e.points[i], e.points[i + 1]});
            }
        } else {
            for (const Rect& b : e.boxes) {
                eyes.push_back(points_from_box(b));
            }
        }
        if (eyes.empty()) {
            fail(ErrorCode::format, manifest_path + ": eye entry '" + e.path +
                                        "' carries neither points nor boxes");
        }
        const ImageGray gray = to_gray(load_image(resolve_path(manifest_path, e.path)));
        for (std::size_t eye_idx = 0; eye_idx < eyes.size(); ++eye_idx) {
            const ImageGray window = align_crop(gray, eyes[eye_idx], layout);
            acfg.seed = derive_seed(cfg.seed, entry_idx, eye_idx);
            for (std::size_t aug_idx = 0; const AugmentedWindow& aw : augment(window, acfg)) {
                Sample s;
                s.vec = pre.run(aw.raster);
                s.label = 1;
                s.source = e.path + ":eye" + std::to_string(eye_idx) + ":aug" +
                           std::to_string(aug_idx++);
                s.transform = aw.record;
                out.push_back(std::move(s));
            }
        }
    }
    return out;
}

std::vector<ImageGray> load_scenery(const std::vector<ManifestEntry>& entries,
                                    const std::string& manifest_path) {
    std::vector<ImageGray> out;
    for (const ManifestEntry& e : entries) {
        if (e.role != "scenery") continue;
        out.push_back(to_gray(load_image(resolve_path(manifest_path, e.path))));
    }
    return out;
}

namespace {

constexpr char kDatasetMagic[7] = {'E', 'Y', 'E', 'D', 'S', '1', '\n'};
constexpr std::uint64_t kMaxDatasetDoubles = 1ull << 27;

} // namespace

void save_dataset(const std::vector<Sample>& samples, const std::string& path) {
    if (samples.empty()) {
        fail(ErrorCode::invalid_argument, "refusing to write an empty dataset");
    }
    const std::size_t veclen = samples.front().vec.size();
    for (const Sample& s : samples) {
        if (s.vec.size() != veclen) {
            fail(ErrorCode::dimension, "dataset vectors have inconsistent lengths");
        }
        if (s.label != 0 && s.label != 1) {
            fail(ErrorCode::invalid_argument, "labels must be 0 or 1");
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::io, "cannot open " + path);
    }
    out.write(kDatasetMagic, sizeof(kDatasetMagic));
    put_u32(out, static_cast<std::uint32_t>(samples.size()));
    put_u32(out, static_cast<std::uint32_t>(veclen));
    for (const Sample& s : samples) {
        const char label = static_cast<char>(s.label);
        out.write(&label, 1);
        for (double v : s.vec) put_f64(out, v);
    }
    if (!out) {
        fail(ErrorCode::io, "write failed for " + path);
    }
}

std::vector<Sample> load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::io, "cannot open " + path);
    }
    char magic[7];
    if (!in.read(magic, sizeof(magic))) {
        fail(ErrorCode::truncated, "truncated dataset " + path);
    }
    if (!std::equal(std::begin(magic), std::end(magic), std::begin(kDatasetMagic))) {
        fail(ErrorCode::format, "bad dataset magic in " + path);
    }
    const std::uint32_t count = get_u32(in, path);
    const std::uint32_t veclen = get_u32(in, path);
    if (count < 1 || veclen < 1) {
        fail(ErrorCode::dimension, "dataset counts must be positive in " + path);
    }
    if (static_cast<std::uint64_t>(count) * veclen > kMaxDatasetDoubles) {
        fail(ErrorCode::dimension, "dataset dimensions overflow in " + path);
    }
    std::vector<Sample> samples;
    samples.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        char label = 0;
        if (!in.read(&label, 1)) {
            fail(ErrorCode::truncated, "truncated dataset " + path);
        }
        if (label != 0 && label != 1) {
            fail(ErrorCode::format, "bad label byte in " + path);
        }
        Sample s;
        s.label = label;
        s.source = "cache:" + std::to_string(i);
        s.vec.resize(veclen);
        for (double& v : s.vec) v = get_f64(in, path);
        samples.push_back(std::move(s));
    }
    return samples;
}

} // namespace eyespot
