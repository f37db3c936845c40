#include "freqmark/lm_backend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "freqmark/errors.hpp"

namespace freqmark {

RankedCandidates candidates_from_logits(std::span<const Token> tokens,
                                        std::span<const double> logits,
                                        int k, std::size_t position) {
    if (tokens.size() != logits.size() || tokens.empty()) {
        throw Error("candidates_from_logits: tokens/logits size mismatch");
    }
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (double z : logits) denom += std::exp(z - max_logit);
    const double log_denom = std::log(denom) + max_logit;

    std::vector<std::size_t> order(tokens.size());
    std::iota(order.begin(), order.end(), 0);
    const auto better = [&](std::size_t a, std::size_t b) {
        if (logits[a] != logits[b]) return logits[a] > logits[b];
        return tokens[a].id < tokens[b].id;
    };
    const std::size_t take = std::min<std::size_t>(k, tokens.size());
    std::partial_sort(order.begin(), order.begin() + take, order.end(), better);

    RankedCandidates out;
    out.position = position;
    out.candidates.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.candidates.push_back({tokens[order[i]], logits[order[i]] - log_denom});
    }
    return out;
}

std::vector<TokenScore> score_sequence(const LmBackend& backend,
                                       std::span<const Token> tokens, int k) {
    if (tokens.empty()) throw Error("score_sequence: empty token sequence");

    std::vector<TokenScore> scores(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        const RankedCandidates rc = backend.next_candidates(tokens.first(t), k);
        const auto& cands = rc.candidates;

        // Entropy of the truncated, renormalized candidate distribution.
        double psum = 0.0;
        for (const auto& c : cands) psum += std::exp(c.logprob);
        double entropy = 0.0;
        if (psum > 0.0) {
            for (const auto& c : cands) {
                const double p = std::exp(c.logprob) / psum;
                if (p > 0.0) entropy -= p * std::log(p);
            }
        }

        int rank = out_of_top_k_rank(k);
        double logprob = 0.0;
        bool found = false;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (tokens[t].known() && cands[i].token.id == tokens[t].id) {
                rank = static_cast<int>(i) + 1;
                logprob = cands[i].logprob;
                found = true;
                break;
            }
        }
        if (!found) {
            logprob = cands.back().logprob - kOutOfTopKLogprobPenalty;
        }
        scores[t] = TokenScore{logprob, rank, entropy};
    }
    return scores;
}

std::vector<Token> tokens_from_texts(const LmBackend& backend,
                                     std::span<const std::string> texts) {
    std::vector<Token> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        if (auto tok = backend.lookup(text)) {
            out.push_back(*tok);
        } else {
            out.push_back(Token{kUnknownTokenId, text});
        }
    }
    return out;
}

} // namespace freqmark
