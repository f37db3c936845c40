#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace freqmark {

// Default ceiling on candidates per step. Matches the remote API's
// logprobs=5 limit; the signal amplitude range lives inside it.
inline constexpr int kMaxCandidates = 5;

// Rank assigned to a token that falls outside the top-k candidate list.
inline constexpr int out_of_top_k_rank(int k) { return k + 1; }

// Vocabulary id for words a backend does not know. Such tokens never
// match any candidate and always score as out-of-top-k.
inline constexpr std::uint32_t kUnknownTokenId =
    std::numeric_limits<std::uint32_t>::max();

struct Token {
    std::uint32_t id = kUnknownTokenId;
    std::string text;

    bool known() const { return id != kUnknownTokenId; }
    bool operator==(const Token& other) const = default;
};

struct Candidate {
    Token token;
    double logprob = 0.0; // natural log, always <= 0
};

// Top-k next-token candidates for one context position, sorted by
// logprob descending, ties broken by ascending token id.
struct RankedCandidates {
    std::size_t position = 0;
    std::vector<Candidate> candidates;
};

} // namespace freqmark
