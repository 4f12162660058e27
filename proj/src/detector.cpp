#include "detector.hpp"

#include <algorithm>
#include <cmath>

#include "color.hpp"
#include "error.hpp"

namespace eyespot {

BinaryMask skin_mask(const ImageRgb& img, const Config& cfg) {
    BinaryMask mask(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* p = img.pixel(x, y);
            const double h = rgb_to_hsv(p[0], p[1], p[2]).h;
            mask.at(x, y) = (cfg.hue_lo < h && h < cfg.hue_hi) ? 1 : 0;
        }
    }
    return mask;
}

std::optional<Rect> face_region(const BinaryMask& mask, const Config& cfg) {
    const StructElement se = StructElement::box(cfg.se_size, cfg.se_size);
    const BinaryMask cleaned = open(close(mask, se), se);
    const std::vector<Component> comps = connected_components(cleaned, 8);
    if (comps.empty()) {
        return std::nullopt;
    }
    const Component& best =
        *std::max_element(comps.begin(), comps.end(),
                          [](const Component& a, const Component& b) { return a.area < b.area; });
    const double min_area = cfg.face_min_area_frac * mask.width * mask.height;
    if (best.area < min_area) {
        return std::nullopt;
    }
    return best.bbox;
}

std::vector<Rect> eye_candidates(const ImageRgb& img, const Rect& face, const Config& cfg) {
    if (face.w < 2 || face.h < 2 || face.x < 0 || face.y < 0 || face.x + face.w > img.width ||
        face.y + face.h > img.height) {
        fail(ErrorCode::invalid_argument, "degenerate face bbox");
    }

    // Non-skin holes inside the face.
    BinaryMask non_skin(face.w, face.h);
    for (int y = 0; y < face.h; ++y) {
        for (int x = 0; x < face.w; ++x) {
            const std::uint8_t* p = img.pixel(face.x + x, face.y + y);
            const double h = rgb_to_hsv(p[0], p[1], p[2]).h;
            non_skin.at(x, y) = (cfg.hue_lo < h && h < cfg.hue_hi) ? 0 : 1;
        }
    }
    const StructElement se = StructElement::box(cfg.se_size, cfg.se_size);
    const BinaryMask cleaned = open(non_skin, se);

    std::vector<int> labels;
    const std::vector<Component> comps = connected_components(cleaned, 8, &labels);

    const double face_area = static_cast<double>(face.w) * face.h;
    const int min_area = std::max(1, static_cast<int>(std::ceil(cfg.cand_min_area_frac * face_area)));
    const int max_area = static_cast<int>(std::floor(cfg.cand_max_area_frac * face_area));
    const std::vector<Component> sized =
        filter_components(comps, min_area, max_area,
                          AspectRange{cfg.cand_aspect_min, cfg.cand_aspect_max});

    // Face-local mean lightness; eyes must be darker than the skin around them.
    std::vector<double> lightness(static_cast<std::size_t>(face.w) * face.h);
    double face_l_sum = 0.0;
    for (int y = 0; y < face.h; ++y) {
        for (int x = 0; x < face.w; ++x) {
            const std::uint8_t* p = img.pixel(face.x + x, face.y + y);
            const double l = rgb_to_lab(p[0], p[1], p[2]).l;
            lightness[static_cast<std::size_t>(y) * face.w + x] = l;
            face_l_sum += l;
        }
    }
    const double face_l_mean = face_l_sum / face_area;

    std::vector<Rect> out;
    for (const Component& c : sized) {
        const double center_y = c.bbox.y + (c.bbox.h - 1) / 2.0;
        if (center_y >= cfg.upper_fraction * face.h) continue;
        double l_sum = 0.0;
        for (int y = c.bbox.y; y < c.bbox.y + c.bbox.h; ++y) {
            for (int x = c.bbox.x; x < c.bbox.x + c.bbox.w; ++x) {
                if (labels[static_cast<std::size_t>(y) * face.w + x] == c.label) {
                    l_sum += lightness[static_cast<std::size_t>(y) * face.w + x];
                }
            }
        }
        if (l_sum / c.area >= face_l_mean) continue;
        out.push_back(Rect{face.x + c.bbox.x, face.y + c.bbox.y, c.bbox.w, c.bbox.h});
    }
    return out;
}

std::vector<Detection> classify_candidates(const MlpParams& model, const ImageGray& gray,
                                           std::span<const Rect> candidates,
                                           const CanonicalLayout& layout, const Preprocessor& pre,
                                           const Rect& face, const Config& cfg,
                                           std::vector<ScoredCandidate>* scored_out) {
    std::vector<ScoredCandidate> scored;
    scored.reserve(candidates.size());
    for (const Rect& box : candidates) {
        const auto pts = points_from_box(box);
        const ImageGray window = align_crop(gray, pts, layout);
        const double score = forward(model, pre.run(window));
        scored.push_back(ScoredCandidate{box, score});
    }
    if (scored_out) {
        *scored_out = scored;
    }

    std::vector<ScoredCandidate> passing;
    for (const ScoredCandidate& sc : scored) {
        if (sc.score > cfg.threshold) {
            passing.push_back(sc);
        }
    }
    std::vector<Detection> winners;
    if (passing.empty()) {
        return winners;
    }
    std::vector<double> scores;
    scores.reserve(passing.size());
    for (const ScoredCandidate& sc : passing) scores.push_back(sc.score);
    const std::vector<int> order = competitive_select(scores, static_cast<int>(passing.size()));
    const double min_sep = cfg.min_separation * face.w;
    for (int idx : order) {
        if (static_cast<int>(winners.size()) >= cfg.winners) break;
        const ScoredCandidate& sc = passing[static_cast<std::size_t>(idx)];
        const double cx = sc.box.center().x;
        const bool clashes = std::any_of(winners.begin(), winners.end(), [&](const Detection& d) {
            return std::abs(d.box.center().x - cx) < min_sep;
        });
        if (clashes) continue;
        winners.push_back(Detection{sc.box, sc.score, face});
    }
    return winners;
}

DetectResult detect(const ImageRgb& img, const MlpParams& model, const CanonicalLayout& layout,
                    const Preprocessor& pre, const Config& cfg) {
    DetectResult result;
    const BinaryMask skin = skin_mask(img, cfg);
    result.face = face_region(skin, cfg);
    if (!result.face) {
        return result;
    }
    const std::vector<Rect> candidates = eye_candidates(img, *result.face, cfg);
    const ImageGray gray = to_gray(img);
    result.detections = classify_candidates(model, gray, candidates, layout, pre, *result.face,
                                            cfg, &result.scored);
    return result;
}

} // namespace eyespot
