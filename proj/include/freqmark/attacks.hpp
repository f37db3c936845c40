#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "freqmark/embedder.hpp"
#include "freqmark/lm_backend.hpp"

namespace freqmark {

enum class AttackKind {
    none,
    copy_paste,
    substitution,
    paraphrase_hook,
    translation_hook,
};

std::string to_string(AttackKind kind);
AttackKind attack_kind_from_string(const std::string& name);

struct AttackConfig {
    AttackKind kind = AttackKind::none;
    double rate = 0.0;      // fraction of watermarked tokens affected
    std::uint64_t seed = 0;
    int segment_len_min = 20; // copy-paste insert sizes
    int segment_len_max = 100;
};

// Token sequence with per-token origin labels (true = LLM-generated).
// Tokens are surface strings so samples survive serialization; backends
// re-resolve them when scoring.
struct MixedSample {
    std::string id;
    std::vector<std::string> tokens;
    std::vector<std::uint8_t> labels;
    AttackConfig provenance;
};

// Interleaves human and watermarked segments with seeded lengths from
// [segment_len_min, segment_len_max]. Every generated token of the
// watermarked output is used, so the true-label count equals the
// generated-token count; total human tokens never exceed watermarked
// tokens (>= 1:1 ratio).
MixedSample copy_paste(std::span<const std::string> human,
                       const WatermarkedOutput& watermarked,
                       const AttackConfig& cfg);

// Replaces exactly round(rate * true-count) watermarked positions (seeded,
// uniform without replacement) with a different token drawn from the
// backend's top-k at that context. Labels are unchanged.
MixedSample substitute(const MixedSample& sample, const LmBackend& backend,
                       const AttackConfig& cfg);

// Pipes a seeded selection of LLM-labeled sentences through an external
// command (one sentence per stdin line, one transformed sentence per
// stdout line). Re-tokenized output keeps the sentence's label.
MixedSample transform_hook(const MixedSample& sample, const std::string& command,
                           const AttackConfig& cfg);

} // namespace freqmark
