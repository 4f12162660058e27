#pragma once

#include <optional>
#include <span>
#include <vector>

#include "config.hpp"
#include "dataset.hpp"
#include "image.hpp"
#include "mlp.hpp"
#include "morphology.hpp"

namespace eyespot {

struct Detection {
    Rect box;
    double score = 0.0;
    Rect face;
};

struct ScoredCandidate {
    Rect box;
    double score = 0.0;
};

struct DetectResult {
    std::optional<Rect> face;
    std::vector<Detection> detections;
    std::vector<ScoredCandidate> scored; // every classified candidate
};

/// Bit set iff hue_lo < h < hue_hi (strict on both edges).
BinaryMask skin_mask(const ImageRgb& img, const Config& cfg);

/// Close-then-open cleanup, then the largest skin component's bbox; none when
/// the largest falls below the configured fraction of the image area.
std::optional<Rect> face_region(const BinaryMask& mask, const Config& cfg);

/// Non-skin components inside the face bbox, filtered by face-relative area
/// and aspect bounds, an upper-fraction position gate, and a Lab lightness
/// gate (candidates darker than the face mean).
std::vector<Rect> eye_candidates(const ImageRgb& img, const Rect& face, const Config& cfg);

/// Scores every candidate window; winners are the highest scores above the
/// threshold subject to the horizontal-separation constraint. When given,
/// `scored_out` receives every candidate with its score.
std::vector<Detection> classify_candidates(const MlpParams& model, const ImageGray& gray,
                                           std::span<const Rect> candidates,
                                           const CanonicalLayout& layout, const Preprocessor& pre,
                                           const Rect& face, const Config& cfg,
                                           std::vector<ScoredCandidate>* scored_out = nullptr);

DetectResult detect(const ImageRgb& img, const MlpParams& model, const CanonicalLayout& layout,
                    const Preprocessor& pre, const Config& cfg);

} // namespace eyespot
