#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "hsfuse/core/errors.hpp"

namespace hsfuse {

struct RocPoint {
    double fpr;
    double tpr;
};

/// ROC curve for binary labels (1 = positive) under "score >= threshold =>
/// predict positive", sweeping thresholds over the distinct scores from +inf
/// down. Starts at (0,0), ends at (1,1); ties produce a single point, so
/// diagonal segments appear where scores coincide. Both classes must occur.
inline std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                       std::span<const uint8_t> labels) {
    detail::require(scores.size() == labels.size(), "roc_curve: size mismatch");
    detail::require(!scores.empty(), "roc_curve: empty input");
    size_t pos = 0;
    for (uint8_t l : labels) {
        detail::require(l == 0 || l == 1, "roc_curve: labels must be 0 or 1");
        pos += l;
    }
    size_t neg = scores.size() - pos;
    detail::require(pos > 0 && neg > 0, "roc_curve: need both classes present");

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    std::vector<RocPoint> out;
    out.push_back({0.0, 0.0});
    size_t tp = 0, fp = 0, i = 0;
    while (i < order.size()) {
        double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            if (labels[order[i]] == 1)
                ++tp;
            else
                ++fp;
            ++i;
        }
        out.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                       static_cast<double>(tp) / static_cast<double>(pos)});
    }
    return out;
}

/// Area under a ROC curve by trapezoidal integration. Equals the probability
/// of ranking a random positive above a random negative (ties counting 1/2).
inline double auc(std::span<const RocPoint> curve) {
    detail::require(curve.size() >= 2, "auc: need at least two curve points");
    double area = 0.0;
    for (size_t i = 1; i < curve.size(); ++i) {
        detail::require(curve[i].fpr >= curve[i - 1].fpr && curve[i].tpr >= curve[i - 1].tpr,
                        "auc: curve must be monotone");
        area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) * 0.5;
    }
    return area;
}

} // namespace hsfuse
