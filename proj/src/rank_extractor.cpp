#include "freqmark/rank_extractor.hpp"

#include <atomic>
#include <exception>

#include "freqmark/errors.hpp"

namespace freqmark {

RankSequence extract(const LmBackend& backend, std::span<const Token> tokens,
                     std::size_t context_prefix_length, int k) {
    if (context_prefix_length >= tokens.size()) {
        throw Error("extract: context_prefix_length must be < token count");
    }

    const std::size_t n = tokens.size() - context_prefix_length;
    RankSequence seq;
    seq.context_prefix_length = context_prefix_length;
    seq.ranks.assign(n, 0);
    seq.token_spans.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        seq.token_spans[i] = context_prefix_length + i;
    }

    // A backend failure anywhere rejects the whole sequence; a partial
    // waveform would silently shift every downstream window.
    std::exception_ptr failure = nullptr;
    std::atomic<bool> failed{false};

#pragma omp parallel for schedule(dynamic, 8)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            const std::size_t t = context_prefix_length + static_cast<std::size_t>(i);
            const RankedCandidates rc = backend.next_candidates(tokens.first(t), k);
            int rank = out_of_top_k_rank(k);
            if (tokens[t].known()) {
                for (std::size_t r = 0; r < rc.candidates.size(); ++r) {
                    if (rc.candidates[r].token.id == tokens[t].id) {
                        rank = static_cast<int>(r) + 1;
                        break;
                    }
                }
            }
            seq.ranks[static_cast<std::size_t>(i)] = rank;
        } catch (...) {
            bool expected = false;
            if (failed.compare_exchange_strong(expected, true)) {
#pragma omp critical(freqmark_extract_failure)
                failure = std::current_exception();
            }
        }
    }

    if (failure) std::rethrow_exception(failure);
    return seq;
}

} // namespace freqmark
