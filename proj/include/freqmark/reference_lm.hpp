#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "freqmark/lm_backend.hpp"

namespace freqmark {

struct ReferenceLmConfig {
    int order = 3;            // n-gram order, >= 1
    std::string corpus_path;  // UTF-8 plain text, whitespace-tokenized
    std::uint64_t seed = 0;   // recorded for provenance; the model is
                              // deterministic and does not consume it
    double smoothing = 0.01;  // add-lambda mass per vocabulary entry
};

// Deterministic seeded n-gram reference model. Counts of orders 1..n are
// interpolated: P_m(w|h) = (c(h,w) + beta * P_{m-1}(w|h')) / (c(h) + beta)
// with beta = lambda * V and P_1 the add-lambda unigram. Every context
// yields a full-vocabulary distribution, so ranks 1..K_max stay meaningful
// even off the training data.
class ReferenceLm : public LmBackend {
public:
    explicit ReferenceLm(const ReferenceLmConfig& config);

    RankedCandidates next_candidates(std::span<const Token> context,
                                     int k) const override;
    std::size_t vocab_size() const override { return vocab_.size(); }
    std::optional<Token> lookup(std::string_view text) const override;

    // Full-vocabulary distribution for the context; sums to 1.
    std::vector<double> distribution(std::span<const Token> context) const;

    // Whitespace-split, lowercased. Unknown words keep their text with
    // kUnknownTokenId.
    std::vector<Token> tokenize(std::string_view text) const;

    const std::vector<std::string>& vocabulary() const { return vocab_; }
    const ReferenceLmConfig& config() const { return config_; }

private:
    struct ContextCounts {
        std::uint64_t total = 0;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> next; // (id, count)
    };

    ReferenceLmConfig config_;
    std::vector<std::string> vocab_; // sorted; id = index
    std::unordered_map<std::string, std::uint32_t> vocab_index_;
    std::vector<double> unigram_; // add-lambda unigram probabilities
    // counts_[m-2]: contexts of length m-1 for order m in 2..order
    std::vector<std::unordered_map<std::string, ContextCounts>> counts_;

    // Packs token ids into an exact byte key (no hash collisions).
    static std::string context_key(std::span<const Token> context);
};

// Lowercases and splits on whitespace; the reference tokenization rule.
std::vector<std::string> split_words(std::string_view text);

} // namespace freqmark
