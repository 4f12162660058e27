#pragma once

#include <functional>
#include <string>
#include <vector>

#include "config.hpp"
#include "dataset.hpp"
#include "detector.hpp"
#include "metrics.hpp"
#include "mlp.hpp"

namespace eyespot {

using LogFn = std::function<void(const std::string&)>;

/// Loads `path` when given, else the EYESPOT_CONFIG file when set, else
/// defaults; then applies "section.key=value" overrides and validates.
Config resolve_config(const std::string& path, const std::vector<std::string>& overrides);

struct DatasetSummary {
    int positives = 0;
    int total = 0;
};

/// Builds the positive sample cache from the manifest's eye entries.
DatasetSummary make_dataset_file(const std::string& manifest_path, const Config& cfg,
                                 const std::string& out_path);

struct TrainSummary {
    std::vector<int> mined_per_round;
    int passes = 0;
};

/// Cache + scenery manifest -> bootstrap-trained EYEMLP1 file. Logs one line
/// per epoch per pass and one per mining round.
TrainSummary train_file(const std::string& dataset_path, const std::string& manifest_path,
                        const Config& cfg, const std::string& model_out, const LogFn& log = {});

DetectResult detect_file(const std::string& image_path, const MlpParams& model,
                         const Config& cfg);

/// One JSON-lines record: {"path", "face", "eyes":[{"box", "score"}]}.
std::string detection_json_line(const std::string& path, const DetectResult& result);

/// Face rectangle in green, eye rectangles in red.
void annotate_png(const ImageRgb& img, const DetectResult& result, const std::string& out_path);

struct EvalOutcome {
    EvalReport report;
    std::vector<bool> successes; // one per truth-annotated image
};

/// Evaluates the model against the manifest's truth boxes. Eye entries need
/// boxes; scenery entries contribute false positives and true negatives only.
EvalOutcome eval_manifest(const std::string& manifest_path, const MlpParams& model,
                          const Config& cfg);

/// One min-max scaled PNG per bank kernel; returns the written paths.
std::vector<std::string> gabor_preview(const Config& cfg, const std::string& out_dir);

} // namespace eyespot
