#include "freqmark/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "freqmark/errors.hpp"

namespace freqmark {

namespace {

// Midranks (average rank for ties), 1-based.
std::vector<double> midranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mid;
        i = j;
    }
    return ranks;
}

} // namespace

double auc(std::span<const double> pos_scores, std::span<const double> neg_scores) {
    if (pos_scores.empty() || neg_scores.empty()) {
        throw DegenerateInputError("auc: both score classes must be non-empty");
    }
    std::vector<double> pooled(pos_scores.begin(), pos_scores.end());
    pooled.insert(pooled.end(), neg_scores.begin(), neg_scores.end());
    const std::vector<double> ranks = midranks(pooled);

    const double np = static_cast<double>(pos_scores.size());
    const double nn = static_cast<double>(neg_scores.size());
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < pos_scores.size(); ++i) rank_sum += ranks[i];
    const double u = rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * nn);
}

ClassificationMetrics classification_metrics(std::span<const std::uint8_t> labels,
                                             std::span<const std::uint8_t> predictions) {
    if (labels.size() != predictions.size() || labels.empty()) {
        throw DegenerateInputError("classification_metrics: length mismatch");
    }
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool l = labels[i] != 0;
        const bool p = predictions[i] != 0;
        if (l && p) ++tp;
        else if (!l && p) ++fp;
        else if (!l && !p) ++tn;
        else ++fn;
    }
    if (tp + fn == 0 || fp + tn == 0) {
        throw DegenerateInputError(
            "classification_metrics: ground truth needs both classes");
    }

    ClassificationMetrics m;
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    m.recall = static_cast<double>(tp) / (tp + fn);
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    m.fpr = static_cast<double>(fp) / (fp + tn);
    m.fnr = static_cast<double>(fn) / (tp + fn);
    return m;
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DegenerateInputError("spearman_rho: need >= 2 paired values");
    }
    const std::vector<double> rx = midranks({x.begin(), x.end()});
    const std::vector<double> ry = midranks({y.begin(), y.end()});
    const double n = static_cast<double>(x.size());
    double mean = (n + 1.0) / 2.0;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (rx[i] - mean) * (ry[i] - mean);
        dx += (rx[i] - mean) * (rx[i] - mean);
        dy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (dx == 0.0 || dy == 0.0) {
        throw DegenerateInputError("spearman_rho: constant input");
    }
    return num / std::sqrt(dx * dy);
}

} // namespace freqmark
