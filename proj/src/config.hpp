#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace eyespot {

/// Toolkit-wide settings. Text file with [section] headers and key = value
/// lines; overrides use the flattened "section.key=value" form.
struct Config {
    // [window]
    int window_w = 32;
    int window_h = 20;
    double layout_margin = 0.2; // eye-corner inset as a fraction of width

    // [augment]
    int augment_count = 40;
    double augment_max_rotation_deg = 10.0;
    double augment_scale_min = 0.90;
    double augment_scale_max = 1.10;
    double augment_max_translation = 0.5;
    bool augment_mirror = true;

    // [preprocess]
    std::string preprocess_mode = "gabor"; // raw | gabor
    double preprocess_wavelength = 4.0;
    double preprocess_orientation_deg = 0.0;
    double preprocess_phase_deg = 0.0;
    double preprocess_aspect = 0.5;
    double preprocess_bandwidth = 1.0;

    // [bank] (gabor-preview)
    std::vector<double> bank_wavelengths{4.0, 8.0};
    std::vector<double> bank_orientations_deg{0.0, 45.0, 90.0, 135.0};
    std::vector<double> bank_phases_deg{0.0};
    double bank_aspect = 0.5;
    double bank_bandwidth = 1.0;

    // [train]
    int n_hidden = 200;
    double learning_rate = 0.05;
    int epochs = 200;
    std::string loss = "mse"; // mse | cross_entropy
    bool shuffle = true;

    // [mining]
    int mining_rounds = 3;
    double mining_threshold = 0.5;
    int mining_stride = 4;
    int mining_max_new = 40;
    int initial_negatives = 50;

    // [pipeline]
    double hue_lo = 0.01;
    double hue_hi = 0.1;
    int se_size = 3;
    double face_min_area_frac = 0.005;  // of image area
    double cand_min_area_frac = 0.0005; // of face bbox area
    double cand_max_area_frac = 0.05;
    double cand_aspect_min = 0.5;
    double cand_aspect_max = 10.0;
    double upper_fraction = 0.6;
    double threshold = 0.5;
    int winners = 2;
    double min_separation = 0.2; // of face width

    // [eval]
    double iou_tau = 0.25;
    std::string match_criterion = "iou"; // iou | center

    // [synth]
    int synth_faces = 50;
    int synth_scenery = 50;
    int synth_width = 128;
    int synth_height = 96;

    // [run]
    std::uint64_t seed = 1;
};

Config load_config(const std::string& path);

/// Parses config text (used for both files and tests).
Config parse_config(const std::string& text, const std::string& origin);

/// Applies one "section.key=value" assignment; unknown keys are errors.
void apply_override(Config& cfg, const std::string& assignment);

/// Re-checks every module-level invariant; throws on violations.
void validate(const Config& cfg);

} // namespace eyespot
