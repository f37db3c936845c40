#include "freqmark/reference_lm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "freqmark/errors.hpp"

namespace freqmark {

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::string current;
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!current.empty()) {
                words.push_back(std::move(current));
                current.clear();
            }
        } else {
            current.push_back(static_cast<char>(
                std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
}

ReferenceLm::ReferenceLm(const ReferenceLmConfig& config) : config_(config) {
    if (config.order < 1) throw Error("reference LM: order must be >= 1");
    if (config.smoothing <= 0.0) throw Error("reference LM: smoothing must be > 0");

    std::ifstream in(config.corpus_path, std::ios::binary);
    if (!in) throw Error("reference LM: cannot read corpus: " + config.corpus_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::vector<std::string> words = split_words(buf.str());
    if (words.empty()) throw Error("reference LM: empty corpus: " + config.corpus_path);

    vocab_ = words;
    std::sort(vocab_.begin(), vocab_.end());
    vocab_.erase(std::unique(vocab_.begin(), vocab_.end()), vocab_.end());
    for (std::uint32_t i = 0; i < vocab_.size(); ++i) vocab_index_[vocab_[i]] = i;

    std::vector<std::uint32_t> ids(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) ids[i] = vocab_index_.at(words[i]);

    // Unigram with add-lambda smoothing.
    const double lambda = config.smoothing;
    const double vsize = static_cast<double>(vocab_.size());
    std::vector<std::uint64_t> unigram_counts(vocab_.size(), 0);
    for (std::uint32_t id : ids) unigram_counts[id]++;
    unigram_.resize(vocab_.size());
    const double denom = static_cast<double>(ids.size()) + lambda * vsize;
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
        unigram_[i] = (static_cast<double>(unigram_counts[i]) + lambda) / denom;
    }

    // Higher-order counts.
    counts_.resize(config.order >= 2 ? config.order - 1 : 0);
    for (int m = 2; m <= config.order; ++m) {
        auto& table = counts_[m - 2];
        const std::size_t hist = static_cast<std::size_t>(m - 1);
        std::unordered_map<std::string, std::unordered_map<std::uint32_t, std::uint32_t>> raw;
        for (std::size_t t = hist; t < ids.size(); ++t) {
            std::string key(reinterpret_cast<const char*>(&ids[t - hist]),
                            hist * sizeof(std::uint32_t));
            raw[std::move(key)][ids[t]]++;
        }
        for (auto& [key, nexts] : raw) {
            ContextCounts cc;
            for (auto& [id, count] : nexts) {
                cc.next.emplace_back(id, count);
                cc.total += count;
            }
            std::sort(cc.next.begin(), cc.next.end());
            table.emplace(key, std::move(cc));
        }
    }
}

std::string ReferenceLm::context_key(std::span<const Token> context) {
    std::string key(context.size() * sizeof(std::uint32_t), '\0');
    for (std::size_t i = 0; i < context.size(); ++i) {
        std::memcpy(key.data() + i * sizeof(std::uint32_t), &context[i].id,
                    sizeof(std::uint32_t));
    }
    return key;
}

std::vector<double> ReferenceLm::distribution(std::span<const Token> context) const {
    const double beta = config_.smoothing * static_cast<double>(vocab_.size());
    std::vector<double> dist = unigram_;
    for (int m = 2; m <= config_.order; ++m) {
        const std::size_t hist = static_cast<std::size_t>(m - 1);
        if (context.size() < hist) break;
        const auto& table = counts_[m - 2];
        const auto it = table.find(context_key(context.last(hist)));
        if (it == table.end()) {
            continue; // unseen context: distribution backs off unchanged
        }
        const ContextCounts& cc = it->second;
        const double scale = beta / (static_cast<double>(cc.total) + beta);
        for (double& p : dist) p *= scale;
        const double inv = 1.0 / (static_cast<double>(cc.total) + beta);
        for (const auto& [id, count] : cc.next) {
            dist[id] += static_cast<double>(count) * inv;
        }
    }
    return dist;
}

RankedCandidates ReferenceLm::next_candidates(std::span<const Token> context,
                                              int k) const {
    if (k < 1) throw Error("next_candidates: k must be >= 1");
    const std::vector<double> dist = distribution(context);

    std::vector<std::uint32_t> order(dist.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t take = std::min<std::size_t>(k, dist.size());
    std::partial_sort(order.begin(), order.begin() + take, order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                          if (dist[a] != dist[b]) return dist[a] > dist[b];
                          return a < b;
                      });

    RankedCandidates out;
    out.position = context.size();
    out.candidates.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        const std::uint32_t id = order[i];
        out.candidates.push_back({Token{id, vocab_[id]}, std::log(dist[id])});
    }
    return out;
}

std::optional<Token> ReferenceLm::lookup(std::string_view text) const {
    std::string lowered;
    lowered.reserve(text.size());
    for (char ch : text) {
        lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    const auto it = vocab_index_.find(lowered);
    if (it == vocab_index_.end()) return std::nullopt;
    return Token{it->second, vocab_[it->second]};
}

std::vector<Token> ReferenceLm::tokenize(std::string_view text) const {
    std::vector<Token> out;
    for (auto& word : split_words(text)) {
        const auto it = vocab_index_.find(word);
        if (it != vocab_index_.end()) {
            out.push_back(Token{it->second, vocab_[it->second]});
        } else {
            out.push_back(Token{kUnknownTokenId, std::move(word)});
        }
    }
    return out;
}

} // namespace freqmark
