#include "toolkit.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "error.hpp"
#include "gabor.hpp"
#include "image_io.hpp"

namespace eyespot {

Config resolve_config(const std::string& path, const std::vector<std::string>& overrides) {
    Config cfg;
    if (!path.empty()) {
        cfg = load_config(path);
    } else if (const char* env = std::getenv("EYESPOT_CONFIG"); env && *env) {
        cfg = load_config(env);
    }
    for (const std::string& assignment : overrides) {
        apply_override(cfg, assignment);
    }
    validate(cfg);
    return cfg;
}

DatasetSummary make_dataset_file(const std::string& manifest_path, const Config& cfg,
                                 const std::string& out_path) {
    const std::vector<ManifestEntry> entries = load_manifest(manifest_path);
    if (entries.empty()) {
        fail(ErrorCode::format, "manifest " + manifest_path + " is empty");
    }
    const std::vector<Sample> samples = build_positives(entries, manifest_path, cfg);
    if (samples.empty()) {
        fail(ErrorCode::format, "manifest " + manifest_path + " produced no samples");
    }
    save_dataset(samples, out_path);
    DatasetSummary summary;
    summary.total = static_cast<int>(samples.size());
    summary.positives = static_cast<int>(
        std::count_if(samples.begin(), samples.end(), [](const Sample& s) { return s.label == 1; }));
    return summary;
}

TrainSummary train_file(const std::string& dataset_path, const std::string& manifest_path,
                        const Config& cfg, const std::string& model_out, const LogFn& log) {
    const std::vector<Sample> base = load_dataset(dataset_path);
    const std::vector<ManifestEntry> entries = load_manifest(manifest_path);
    const std::vector<ImageGray> scenery = load_scenery(entries, manifest_path);

    const CanonicalLayout layout = layout_from_config(cfg);
    const Preprocessor pre(cfg);
    const int n_in = cfg.window_w * cfg.window_h;
    for (const Sample& s : base) {
        if (s.vec.size() != static_cast<std::size_t>(n_in)) {
            fail(ErrorCode::dimension, "dataset vectors do not match the configured window");
        }
    }

    TrainConfig tc;
    tc.learning_rate = cfg.learning_rate;
    tc.epochs = cfg.epochs;
    tc.loss = cfg.loss == "mse" ? Loss::mse : Loss::cross_entropy;
    tc.shuffle = cfg.shuffle;

    MiningConfig mc;
    mc.rounds = cfg.mining_rounds;
    mc.threshold = cfg.mining_threshold;
    mc.stride = cfg.mining_stride;
    mc.max_new = cfg.mining_max_new;
    mc.initial_negatives = cfg.initial_negatives;

    const BootstrapResult result =
        bootstrap_train(base, scenery, layout, pre, tc, mc, cfg.n_hidden, cfg.seed);
    if (log) {
        for (std::size_t p = 0; p < result.loss_histories.size(); ++p) {
            for (std::size_t e = 0; e < result.loss_histories[p].size(); ++e) {
                std::ostringstream os;
                os << "pass " << p << " epoch " << e << " loss "
                   << result.loss_histories[p][e];
                log(os.str());
            }
        }
        for (std::size_t r = 0; r < result.mined_per_round.size(); ++r) {
            log("round " + std::to_string(r + 1) + " mined " +
                std::to_string(result.mined_per_round[r]));
        }
    }
    save_model(result.model, model_out);
    TrainSummary summary;
    summary.mined_per_round = result.mined_per_round;
    summary.passes = static_cast<int>(result.loss_histories.size());
    return summary;
}

DetectResult detect_file(const std::string& image_path, const MlpParams& model,
                         const Config& cfg) {
    const ImageRgb img = load_image(image_path);
    const CanonicalLayout layout = layout_from_config(cfg);
    const Preprocessor pre(cfg);
    return detect(img, model, layout, pre, cfg);
}

std::string detection_json_line(const std::string& path, const DetectResult& result) {
    nlohmann::json j;
    j["path"] = path;
    if (result.face) {
        j["face"] = {result.face->x, result.face->y, result.face->w, result.face->h};
    } else {
        j["face"] = nullptr;
    }
    nlohmann::json eyes = nlohmann::json::array();
    for (const Detection& d : result.detections) {
        eyes.push_back({{"box", {d.box.x, d.box.y, d.box.w, d.box.h}}, {"score", d.score}});
    }
    j["eyes"] = std::move(eyes);
    return j.dump();
}

namespace {

void draw_rect(ImageRgb& img, const Rect& r, std::uint8_t cr, std::uint8_t cg, std::uint8_t cb) {
    auto put = [&](int x, int y) {
        if (x < 0 || x >= img.width || y < 0 || y >= img.height) return;
        std::uint8_t* p = img.pixel(x, y);
        p[0] = cr;
        p[1] = cg;
        p[2] = cb;
    };
    for (int x = r.x; x < r.x + r.w; ++x) {
        put(x, r.y);
        put(x, r.y + r.h - 1);
    }
    for (int y = r.y; y < r.y + r.h; ++y) {
        put(r.x, y);
        put(r.x + r.w - 1, y);
    }
}

} // namespace

void annotate_png(const ImageRgb& img, const DetectResult& result, const std::string& out_path) {
    ImageRgb canvas = img;
    if (result.face) {
        draw_rect(canvas, *result.face, 0, 200, 0);
    }
    for (const Detection& d : result.detections) {
        draw_rect(canvas, d.box, 220, 0, 0);
    }
    save_png(canvas, out_path);
}

EvalOutcome eval_manifest(const std::string& manifest_path, const MlpParams& model,
                          const Config& cfg) {
    const std::vector<ManifestEntry> entries = load_manifest(manifest_path);
    if (entries.empty()) {
        fail(ErrorCode::format, "manifest " + manifest_path + " is empty");
    }
    const CanonicalLayout layout = layout_from_config(cfg);
    const Preprocessor pre(cfg);
    const MatchCriterion crit =
        cfg.match_criterion == "center" ? MatchCriterion::center : MatchCriterion::iou;

    EvalOutcome outcome;
    ConfusionCounts counts;
    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    for (const ManifestEntry& e : entries) {
        const std::filesystem::path p(e.path);
        const std::string full = p.is_absolute() ? e.path : (base / p).string();
        const ImageRgb img = load_image(full);
        const DetectResult result = detect(img, model, layout, pre, cfg);

        std::vector<Rect> rejected;
        for (const ScoredCandidate& sc : result.scored) {
            if (sc.score <= cfg.threshold) {
                rejected.push_back(sc.box);
            }
        }
        std::vector<Rect> truths = e.boxes;
        if (e.role == "eye") {
            if (truths.empty()) {
                fail(ErrorCode::format,
                     "eval needs truth boxes for eye entry '" + e.path + "'");
            }
        }
        std::vector<ScoredBox> dets;
        dets.reserve(result.detections.size());
        for (const Detection& d : result.detections) {
            dets.push_back(ScoredBox{d.box, d.score});
        }
        const MatchResult mr = match_detections(dets, truths, cfg.iou_tau, crit);
        counts += mr.counts;
        counts += score_rejected(rejected, truths, cfg.iou_tau, crit);
        if (e.role == "eye") {
            outcome.successes.push_back(mr.all_truths_matched);
        }
    }
    if (outcome.successes.empty()) {
        fail(ErrorCode::format, "manifest " + manifest_path + " has no truth-annotated images");
    }
    outcome.report = make_report(counts, outcome.successes);
    return outcome;
}

std::vector<std::string> gabor_preview(const Config& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        fail(ErrorCode::io, "cannot create directory " + out_dir + ": " + ec.message());
    }
    std::vector<double> orientations;
    for (double deg : cfg.bank_orientations_deg) {
        orientations.push_back(deg * std::numbers::pi / 180.0);
    }
    std::vector<double> phases;
    for (double deg : cfg.bank_phases_deg) {
        phases.push_back(deg * std::numbers::pi / 180.0);
    }
    const std::vector<GaborKernel> bank = make_bank(cfg.bank_wavelengths, orientations, phases,
                                                    cfg.bank_aspect, cfg.bank_bandwidth);
    std::vector<std::string> paths;
    std::size_t index = 0;
    for (const GaborKernel& k : bank) {
        const std::size_t wi = index / (orientations.size() * phases.size());
        const std::size_t oi = (index / phases.size()) % orientations.size();
        const std::size_t fi = index % phases.size();
        ++index;
        char name[96];
        std::snprintf(name, sizeof(name), "kernel_w%g_o%g_p%g.png", cfg.bank_wavelengths[wi],
                      cfg.bank_orientations_deg[oi], cfg.bank_phases_deg[fi]);
        const auto [lo_it, hi_it] = std::minmax_element(k.taps.begin(), k.taps.end());
        const double lo = *lo_it;
        const double hi = *hi_it;
        std::vector<std::uint8_t> bytes(k.taps.size());
        for (std::size_t i = 0; i < k.taps.size(); ++i) {
            const double scaled = hi > lo ? (k.taps[i] - lo) / (hi - lo) : 0.5;
            bytes[i] = static_cast<std::uint8_t>(std::lround(scaled * 255.0));
        }
        const std::string path = (fs::path(out_dir) / name).string();
        save_png_gray(bytes, k.size, k.size, path);
        paths.push_back(path);
    }
    return paths;
}

} // namespace eyespot
