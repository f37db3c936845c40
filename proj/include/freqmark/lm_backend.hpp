#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "freqmark/token.hpp"

namespace freqmark {

// Per-token statistics produced by score_sequence.
struct TokenScore {
    double logprob = 0.0; // conditional log p(token | context)
    int rank = 0;         // 1-based; out_of_top_k_rank(k) if absent from top-k
    double entropy = 0.0; // entropy of the truncated, renormalized candidates
};

// Abstraction over an autoregressive language model that exposes ranked
// top-k next-token candidates with log-probabilities. Implementations are
// immutable after construction; concurrent read-only calls are safe.
class LmBackend {
public:
    virtual ~LmBackend() = default;

    // Returns min(k, vocab size) candidates for the next token given the
    // context (empty context = begin-of-sequence state). Probabilities are
    // softmax over the full vocabulary before truncation.
    virtual RankedCandidates next_candidates(std::span<const Token> context,
                                             int k) const = 0;

    virtual std::size_t vocab_size() const = 0;

    // Maps a surface form to a Token; nullopt for out-of-vocabulary words.
    virtual std::optional<Token> lookup(std::string_view text) const = 0;

    // End-of-sequence token id, if the backend has one.
    virtual std::optional<std::uint32_t> eos_id() const { return std::nullopt; }
};

// Log-probability penalty applied below the k-th candidate when the
// observed token is outside the top-k.
inline constexpr double kOutOfTopKLogprobPenalty = 2.302585092994046; // ln 10

// Per-token conditional statistics for a whole sequence: logprob, 1-based
// rank among the backend's candidates, and entropy of the truncated
// renormalized candidate distribution. Out-of-top-k tokens get the
// sentinel rank and logprob = (k-th candidate logprob) - penalty.
std::vector<TokenScore> score_sequence(const LmBackend& backend,
                                       std::span<const Token> tokens,
                                       int k = kMaxCandidates);

// Converts raw logits over an explicit candidate set into RankedCandidates:
// softmax over all supplied logits, then top-k by probability with
// ascending-id tie-break. Used by logit-producing backends and tests.
RankedCandidates candidates_from_logits(std::span<const Token> tokens,
                                        std::span<const double> logits,
                                        int k,
                                        std::size_t position = 0);

// Maps surface strings onto backend tokens; unknown words keep their text
// with kUnknownTokenId.
std::vector<Token> tokens_from_texts(const LmBackend& backend,
                                     std::span<const std::string> texts);

} // namespace freqmark
