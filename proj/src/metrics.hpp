#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace eyespot {

struct ConfusionCounts {
    long long tp = 0;
    long long tn = 0;
    long long fp = 0;
    long long fn = 0;

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        tn += o.tn;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
};

enum class MatchCriterion {
    iou,    // IoU >= tau
    center, // detection center inside the truth box
};

struct ScoredBox {
    Rect box;
    double score = 0.0;
};

struct MatchResult {
    ConfusionCounts counts;
    bool all_truths_matched = false;
};

/// Greedy one-to-one matching by descending score: matched pairs are TP,
/// unmatched detections FP, unmatched truths FN.
MatchResult match_detections(std::span<const ScoredBox> dets, std::span<const Rect> truths,
                             double tau, MatchCriterion crit);

/// Window-level accounting for candidates the classifier rejected: over a
/// truth region they count FN, elsewhere TN.
ConfusionCounts score_rejected(std::span<const Rect> rejected, std::span<const Rect> truths,
                               double tau, MatchCriterion crit);

// Each ratio is undefined (nullopt) when its denominator is zero.
std::optional<double> sensitivity(const ConfusionCounts& c);
std::optional<double> specificity(const ConfusionCounts& c);
std::optional<double> accuracy(const ConfusionCounts& c);

/// Fraction of images where every ground-truth eye was matched.
double success_rate(const std::vector<bool>& per_image_success);

struct EvalReport {
    ConfusionCounts counts;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> accuracy;
    double success = 0.0;
    int images = 0;
};

EvalReport make_report(const ConfusionCounts& counts, const std::vector<bool>& per_image_success);

std::string report_json(const EvalReport& r);
std::string report_table(const EvalReport& r);

} // namespace eyespot
