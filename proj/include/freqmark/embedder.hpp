#pragma once

#include <span>
#include <vector>

#include "freqmark/guiding_signal.hpp"
#include "freqmark/lm_backend.hpp"

namespace freqmark {

struct EmbedConfig {
    GuidingSignal signal;
    int max_tokens = 1;
    int k = kMaxCandidates;       // candidates requested per step
    std::size_t phase_offset = 0; // starting index into the signal
};

struct WatermarkedOutput {
    std::vector<Token> tokens;  // prompt followed by generated tokens
    std::vector<int> ranks_used; // 1-based, one per generated token
    std::size_t prompt_length = 0;
    std::size_t phase_offset = 0;

    std::span<const Token> generated() const {
        return std::span<const Token>(tokens).subspan(prompt_length);
    }
};

// Autoregressive generation that selects, at generated position i, the
// candidate at rank amplitude_at(signal, phase_offset + i). Stops at
// max_tokens or the backend's end-of-sequence token.
WatermarkedOutput embed(const LmBackend& backend, std::span<const Token> prompt,
                        const EmbedConfig& cfg);

// Greedy (rank-1) continuation; the unwatermarked negative class.
std::vector<Token> generate_unwatermarked(const LmBackend& backend,
                                          std::span<const Token> prompt,
                                          int max_tokens);

} // namespace freqmark
