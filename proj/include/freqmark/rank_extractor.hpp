#pragma once

#include <span>
#include <vector>

#include "freqmark/lm_backend.hpp"

namespace freqmark {

// Per-token observed ranks reconstructed from text: the detector's input
// waveform. ranks[i] is 1-based; out_of_top_k_rank(k) marks tokens absent
// from the backend's top-k candidates.
struct RankSequence {
    std::vector<int> ranks;
    std::vector<std::size_t> token_spans; // source token index per rank
    std::size_t context_prefix_length = 0;
};

// Re-scores each token at position t >= context_prefix_length against
// next_candidates(tokens[0..t-1], k). Positions are independent given the
// observed text and are scored in parallel; output order is deterministic.
RankSequence extract(const LmBackend& backend, std::span<const Token> tokens,
                     std::size_t context_prefix_length, int k = kMaxCandidates);

} // namespace freqmark
