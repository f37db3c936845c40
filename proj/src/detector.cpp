#include "freqmark/detector.hpp"

#include <algorithm>
#include <cmath>

#include "freqmark/errors.hpp"

namespace freqmark {

std::vector<double> median_smooth(const std::vector<double>& values, int length) {
    if (length < 1 || length % 2 == 0) {
        throw Error("median_smooth: length must be odd and >= 1");
    }
    if (length == 1 || values.empty()) return values;
    const int half = length / 2;
    const int n = static_cast<int>(values.size());
    std::vector<double> out(values.size());
    std::vector<double> window;
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        window.assign(values.begin() + lo, values.begin() + hi + 1);
        std::sort(window.begin(), window.end());
        const std::size_t m = window.size();
        out[i] = (m % 2 == 1) ? window[m / 2]
                              : 0.5 * (window[m / 2 - 1] + window[m / 2]);
    }
    return out;
}

namespace {

// Flips runs shorter than min_len into the surrounding label until stable.
// Runs covering the whole sequence are left alone (nothing to merge into).
std::vector<std::uint8_t> merge_short_runs(std::vector<std::uint8_t> labels,
                                           int min_len) {
    const std::size_t n = labels.size();
    bool changed = true;
    while (changed) {
        changed = false;
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n && labels[j] == labels[i]) ++j;
            const std::size_t run = j - i;
            const bool has_neighbor = (i > 0) || (j < n);
            if (run < static_cast<std::size_t>(min_len) && has_neighbor &&
                !(i == 0 && j == n)) {
                // pick the longer neighbor's label; ties go to the left
                std::uint8_t fill;
                if (i == 0) {
                    fill = labels[j];
                } else if (j == n) {
                    fill = labels[i - 1];
                } else {
                    fill = labels[i - 1]; // left and right labels are equal here
                }
                for (std::size_t t = i; t < j; ++t) labels[t] = fill;
                changed = true;
            }
            i = j;
        }
    }
    return labels;
}

} // namespace

DetectionResult detect(const RankSequence& ranks, const StftConfig& cfg) {
    if (ranks.ranks.empty()) throw Error("detect: empty rank sequence");

    const Spectrogram spec = stft(ranks, cfg);
    const std::vector<double> window_scores = score_windows(spec, cfg);

    DetectionResult result;
    result.degraded_confidence = spec.whole_sequence_fallback;
    result.sequence_score =
        *std::max_element(window_scores.begin(), window_scores.end());

    // Token score = mean over windows covering the token.
    const std::size_t n = ranks.ranks.size();
    result.token_scores.assign(n, 0.0);
    std::vector<int> cover(n, 0);
    for (std::size_t w = 0; w < spec.window_starts.size(); ++w) {
        const std::size_t start = spec.window_starts[w];
        const std::size_t stop =
            std::min(n, start + static_cast<std::size_t>(spec.window_len));
        for (std::size_t t = start; t < stop; ++t) {
            result.token_scores[t] += window_scores[w];
            cover[t]++;
        }
    }
    for (std::size_t t = 0; t < n; ++t) {
        if (cover[t] > 0) result.token_scores[t] /= cover[t];
    }

    const std::vector<double> smoothed =
        median_smooth(result.token_scores, cfg.smoothing_len);
    result.token_labels.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        result.token_labels[t] = smoothed[t] >= cfg.threshold_tau ? 1 : 0;
    }

    const std::vector<std::uint8_t> merged =
        merge_short_runs(result.token_labels, cfg.min_segment_tokens);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && merged[j] == merged[i]) ++j;
        if (merged[i]) {
            double mean = 0.0;
            for (std::size_t t = i; t < j; ++t) mean += result.token_scores[t];
            mean /= static_cast<double>(j - i);
            result.segments.push_back(Segment{ranks.token_spans[i],
                                              ranks.token_spans[j - 1] + 1, mean});
        }
        i = j;
    }
    return result;
}

} // namespace freqmark
