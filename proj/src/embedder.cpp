#include "freqmark/embedder.hpp"

#include <string>

#include "freqmark/errors.hpp"

namespace freqmark {

WatermarkedOutput embed(const LmBackend& backend, std::span<const Token> prompt,
                        const EmbedConfig& cfg) {
    if (cfg.max_tokens < 1) throw Error("embed: max_tokens must be >= 1");
    if (cfg.k < cfg.signal.max_amplitude()) {
        throw Error("embed: k is smaller than the signal's maximum amplitude");
    }

    WatermarkedOutput out;
    out.tokens.assign(prompt.begin(), prompt.end());
    out.prompt_length = prompt.size();
    out.phase_offset = cfg.phase_offset;
    out.ranks_used.reserve(cfg.max_tokens);

    const auto eos = backend.eos_id();
    for (int i = 0; i < cfg.max_tokens; ++i) {
        const int rank = cfg.signal.amplitude_at(cfg.phase_offset + i);
        const RankedCandidates rc = backend.next_candidates(out.tokens, cfg.k);
        if (static_cast<int>(rc.candidates.size()) < rank) {
            throw InsufficientCandidatesError(
                "embed: backend returned " + std::to_string(rc.candidates.size()) +
                " candidates but rank " + std::to_string(rank) +
                " was required at generated position " + std::to_string(i));
        }
        const Token& chosen = rc.candidates[rank - 1].token;
        if (eos && chosen.id == *eos) break; // natural text boundary
        out.tokens.push_back(chosen);
        out.ranks_used.push_back(rank);
    }
    return out;
}

std::vector<Token> generate_unwatermarked(const LmBackend& backend,
                                          std::span<const Token> prompt,
                                          int max_tokens) {
    if (max_tokens < 1) throw Error("generate_unwatermarked: max_tokens must be >= 1");
    std::vector<Token> tokens(prompt.begin(), prompt.end());
    const auto eos = backend.eos_id();
    for (int i = 0; i < max_tokens; ++i) {
        const RankedCandidates rc = backend.next_candidates(tokens, 1);
        if (rc.candidates.empty()) break;
        const Token& chosen = rc.candidates.front().token;
        if (eos && chosen.id == *eos) break;
        tokens.push_back(chosen);
    }
    return tokens;
}

} // namespace freqmark
