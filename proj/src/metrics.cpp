#include "metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace eyespot {

namespace {

bool box_matches(const Rect& det, const Rect& truth, double tau, MatchCriterion crit) {
    if (crit == MatchCriterion::center) {
        const Point c = det.center();
        return c.x >= truth.x && c.x <= truth.x + truth.w - 1 && c.y >= truth.y &&
               c.y <= truth.y + truth.h - 1;
    }
    return iou(det, truth) >= tau;
}

} // namespace

MatchResult match_detections(std::span<const ScoredBox> dets, std::span<const Rect> truths,
                             double tau, MatchCriterion crit) {
    std::vector<int> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return dets[static_cast<std::size_t>(a)].score > dets[static_cast<std::size_t>(b)].score;
    });
    std::vector<bool> truth_taken(truths.size(), false);
    MatchResult result;
    for (int di : order) {
        const ScoredBox& det = dets[static_cast<std::size_t>(di)];
        int best = -1;
        double best_iou = -1.0;
        for (std::size_t ti = 0; ti < truths.size(); ++ti) {
            if (truth_taken[ti] || !box_matches(det.box, truths[ti], tau, crit)) continue;
            const double overlap = iou(det.box, truths[ti]);
            if (overlap > best_iou) {
                best_iou = overlap;
                best = static_cast<int>(ti);
            }
        }
        if (best >= 0) {
            truth_taken[static_cast<std::size_t>(best)] = true;
            ++result.counts.tp;
        } else {
            ++result.counts.fp;
        }
    }
    const long long matched =
        static_cast<long long>(std::count(truth_taken.begin(), truth_taken.end(), true));
    result.counts.fn += static_cast<long long>(truths.size()) - matched;
    result.all_truths_matched = matched == static_cast<long long>(truths.size());
    return result;
}

ConfusionCounts score_rejected(std::span<const Rect> rejected, std::span<const Rect> truths,
                               double tau, MatchCriterion crit) {
    ConfusionCounts counts;
    for (const Rect& r : rejected) {
        const bool on_truth = std::any_of(truths.begin(), truths.end(), [&](const Rect& t) {
            return box_matches(r, t, tau, crit);
        });
        if (on_truth) {
            ++counts.fn;
        } else {
            ++counts.tn;
        }
    }
    return counts;
}

std::optional<double> sensitivity(const ConfusionCounts& c) {
    const long long denom = c.tp + c.fn;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::optional<double> specificity(const ConfusionCounts& c) {
    const long long denom = c.tn + c.fp;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(c.tn) / static_cast<double>(denom);
}

std::optional<double> accuracy(const ConfusionCounts& c) {
    const long long denom = c.tp + c.tn + c.fp + c.fn;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(denom);
}

double success_rate(const std::vector<bool>& per_image_success) {
    if (per_image_success.empty()) {
        fail(ErrorCode::invalid_argument, "success rate needs at least one image result");
    }
    const auto hits = std::count(per_image_success.begin(), per_image_success.end(), true);
    return static_cast<double>(hits) / static_cast<double>(per_image_success.size());
}

EvalReport make_report(const ConfusionCounts& counts, const std::vector<bool>& per_image_success) {
    EvalReport r;
    r.counts = counts;
    r.sensitivity = sensitivity(counts);
    r.specificity = specificity(counts);
    r.accuracy = accuracy(counts);
    r.success = success_rate(per_image_success);
    r.images = static_cast<int>(per_image_success.size());
    return r;
}

std::string report_json(const EvalReport& r) {
    nlohmann::json j;
    j["counts"] = {{"tp", r.counts.tp}, {"tn", r.counts.tn}, {"fp", r.counts.fp},
                   {"fn", r.counts.fn}};
    auto ratio = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    j["sensitivity"] = ratio(r.sensitivity);
    j["specificity"] = ratio(r.specificity);
    j["accuracy"] = ratio(r.accuracy);
    j["success_rate"] = r.success;
    j["images"] = r.images;
    return j.dump();
}

std::string report_table(const EvalReport& r) {
    auto fmt = [](const std::optional<double>& v) -> std::string {
        if (!v) return "n/a";
        std::ostringstream os;
        os.precision(4);
        os << std::fixed << *v;
        return os.str();
    };
    std::ostringstream os;
    os << "images       " << r.images << '\n'
       << "tp/fp/tn/fn  " << r.counts.tp << '/' << r.counts.fp << '/' << r.counts.tn << '/'
       << r.counts.fn << '\n'
       << "sensitivity  " << fmt(r.sensitivity) << '\n'
       << "specificity  " << fmt(r.specificity) << '\n'
       << "accuracy     " << fmt(r.accuracy) << '\n'
       << "success      " << fmt(std::make_optional(r.success)) << '\n';
    return os.str();
}

} // namespace eyespot
