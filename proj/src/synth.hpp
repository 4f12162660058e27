#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "dataset.hpp"
#include "geometry.hpp"
#include "image.hpp"
#include "rng.hpp"

namespace eyespot {

struct SynthFace {
    ImageRgb image;
    Rect face_rect;
    std::vector<Rect> eye_boxes;   // component-tight truth boxes
    std::vector<Point> eye_centers;
};

/// Skin-hue face rectangle on a non-skin background: two three-tone eye
/// patches in the upper half, eyebrow bars above them, and a mouth bar in
/// the lower half. Every skin pixel stays strictly inside the configured
/// hue band.
SynthFace make_face(const Config& cfg, Rng& rng);

/// Eye-free distractor image: gradient background plus dark bars, discs,
/// rings, and non-skin colored patches.
ImageRgb make_scenery(const Config& cfg, Rng& rng);

struct SynthCorpus {
    std::string manifest_path;
    std::vector<ManifestEntry> entries;
};

/// Writes cfg.synth_faces face PNGs and cfg.synth_scenery scenery PNGs plus
/// a truth manifest into out_dir; deterministic in cfg.seed.
SynthCorpus synth_corpus(const Config& cfg, const std::string& out_dir);

} // namespace eyespot
