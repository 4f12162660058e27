#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "gabor.hpp"
#include "geometry.hpp"
#include "image.hpp"
#include "mlp.hpp"
#include "rng.hpp"

namespace eyespot {

/// Fixed feature-point positions inside the classification window.
struct CanonicalLayout {
    int window_w = 0;
    int window_h = 0;
    std::vector<Point> points;
};

struct TransformRecord {
    double rotation = 0.0;
    double scale = 1.0;
    double dx = 0.0;
    double dy = 0.0;
    bool mirrored = false;
};

struct Sample {
    std::vector<double> vec;
    int label = 0; // 1 = eye, 0 = non-eye
    std::string source;
    TransformRecord transform;
};

struct AugmentConfig {
    int count = 40;
    double max_rotation = 10.0 * std::numbers::pi / 180.0;
    double scale_min = 0.90;
    double scale_max = 1.10;
    double max_translation = 0.5;
    bool mirror = true;
    std::uint64_t seed = 0;
};

struct ManifestEntry {
    std::string path;
    std::string role; // "eye" | "scenery"
    std::vector<Point> points; // eye-corner pairs, two per eye
    std::vector<Rect> boxes;   // eye boxes, one per eye
};

/// Per-feature mean positions across labeled faces.
std::vector<Point> mean_feature_points(const std::vector<std::vector<Point>>& sets);

/// Mean positions similarity-mapped onto the window's two canonical slots
/// (eye corners at margin and 1-margin of the width, vertically centered).
CanonicalLayout compute_layout(const std::vector<std::vector<Point>>& sets, int window_w,
                               int window_h, double margin);

/// The canonical two-corner layout implied by the config alone.
CanonicalLayout layout_from_config(const Config& cfg);

/// Eye-box corner points: midpoints of the box's vertical edges.
std::array<Point, 2> points_from_box(const Rect& box);

/// Least-squares similarity from the feature points onto the layout points,
/// then a warp into the window raster.
ImageGray align_crop(const ImageGray& img, std::span<const Point> feature_points,
                     const CanonicalLayout& layout);

struct AugmentedWindow {
    ImageGray raster;
    TransformRecord record;
};

/// Exactly cfg.count windows; per window the draws are rotation, scale, dx,
/// dy, then (only when enabled) the mirror coin.
std::vector<AugmentedWindow> augment(const ImageGray& window, const AugmentConfig& cfg);

/// Window preprocessing: optional single-kernel Gabor magnitude, then
/// zero-mean unit-variance normalization with an epsilon guard.
class Preprocessor {
  public:
    explicit Preprocessor(const Config& cfg);

    std::vector<double> run(const ImageGray& window) const;
    int window_w() const { return window_w_; }
    int window_h() const { return window_h_; }

  private:
    int window_w_;
    int window_h_;
    bool use_gabor_;
    GaborKernel kernel_;
};

std::vector<Sample> init_random_negatives(int n, const CanonicalLayout& layout,
                                          const Preprocessor& pre, std::uint64_t seed);

struct MiningResult {
    std::vector<Sample> picked;
    int hits = 0;    // windows over the threshold before sampling
    int scanned = 0; // windows visited
};

/// Slides the window over eye-free scenery at the given stride and keeps
/// windows the model scores strictly above the threshold; up to max_new of
/// them are sampled uniformly as negatives.
MiningResult mine_negatives(const MlpParams& model, const ImageGray& scenery,
                            const CanonicalLayout& layout, const Preprocessor& pre,
                            double threshold, int stride, int max_new, Rng& rng,
                            const std::string& source_id);

/// Hit count only (false-positive audits on held-out scenery).
int count_window_hits(const MlpParams& model, const ImageGray& scenery,
                      const CanonicalLayout& layout, const Preprocessor& pre, double threshold,
                      int stride);

struct MiningConfig {
    int rounds = 3;
    double threshold = 0.5;
    int stride = 4;
    int max_new = 40;
    int initial_negatives = 50;
};

struct BootstrapResult {
    MlpParams model;
    std::vector<int> mined_per_round;
    std::vector<std::vector<double>> loss_histories; // one per training pass
};

/// Called after each training pass: round is 0 for the initial pass, then
/// 1..rounds; mined counts the negatives appended before that pass.
using BootstrapObserver = std::function<void(int round, const MlpParams& model, int mined)>;

/// Train, mine across scenery, append, retrain from the current weights;
/// stops early on a round that mines nothing. base_samples must contain at
/// least one positive; the initial random negatives are appended here.
BootstrapResult bootstrap_train(const std::vector<Sample>& base_samples,
                                std::span<const ImageGray> scenery,
                                const CanonicalLayout& layout, const Preprocessor& pre,
                                const TrainConfig& train_cfg, const MiningConfig& mining_cfg,
                                int n_hidden, std::uint64_t seed,
                                const BootstrapObserver& observer = {});

std::vector<ManifestEntry> load_manifest(const std::string& path);
void save_manifest(const std::vector<ManifestEntry>& entries, const std::string& path);

/// Positive samples from the manifest's eye entries, in manifest order then
/// augmentation order. Image paths resolve relative to the manifest file.
std::vector<Sample> build_positives(const std::vector<ManifestEntry>& entries,
                                    const std::string& manifest_path, const Config& cfg);

/// Grayscale scenery images from the manifest, in manifest order.
std::vector<ImageGray> load_scenery(const std::vector<ManifestEntry>& entries,
                                    const std::string& manifest_path);

void save_dataset(const std::vector<Sample>& samples, const std::string& path);
std::vector<Sample> load_dataset(const std::string& path);

} // namespace eyespot
