#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "freqmark/stft.hpp"

namespace freqmark {

// Maximal run of watermark-positive tokens. Indices are source token
// indices (token_spans values); end is exclusive.
struct Segment {
    std::size_t start = 0;
    std::size_t end = 0;
    double mean_score = 0.0;
};

struct DetectionResult {
    std::vector<double> token_scores;  // in [0,1], one per scored token
    std::vector<std::uint8_t> token_labels; // smoothed score >= tau
    std::vector<Segment> segments;     // short runs merged away
    double sequence_score = 0.0;       // max window score
    bool degraded_confidence = false;  // whole-sequence fallback was used
};

// Full detection pipeline: STFT -> window scores -> per-token mean over
// covering windows -> median smoothing -> threshold -> segment merging.
// token_labels come straight from the threshold (so label true implies
// smoothed score >= tau); segments additionally merge runs shorter than
// min_segment_tokens into their surroundings.
DetectionResult detect(const RankSequence& ranks, const StftConfig& cfg);

// Median filter with clamped edges; length must be odd.
std::vector<double> median_smooth(const std::vector<double>& values, int length);

} // namespace freqmark
