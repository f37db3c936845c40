#pragma once

#include <cstdint>
#include <span>

namespace freqmark {

// Mann-Whitney AUC: (#pairs pos > neg + 0.5 * #ties) / (|pos| * |neg|),
// computed via midranks of the pooled sample. Throws DegenerateInputError
// if either class is empty.
double auc(std::span<const double> pos_scores, std::span<const double> neg_scores);

struct ClassificationMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double fpr = 0.0;
    double fnr = 0.0;
};

// Standard confusion-matrix metrics. Requires equal lengths and at least
// one positive and one negative ground-truth label.
ClassificationMetrics classification_metrics(std::span<const std::uint8_t> labels,
                                             std::span<const std::uint8_t> predictions);

// Spearman rank correlation; used for the quality-vs-modification trend.
double spearman_rho(std::span<const double> x, std::span<const double> y);

} // namespace freqmark
